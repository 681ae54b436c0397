#pragma once

// Minimal SVG output for line plots and interval (caterpillar) plots.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srprior::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Interval {
  std::string label;
  double lower;
  double center;
  double upper;
  std::optional<double> truth;
};

void line_plot(std::ostream& out, const std::string& title, const std::vector<Series>& series,
               const std::string& x_label, const std::string& y_label);

void interval_plot(std::ostream& out, const std::string& title, const std::vector<Interval>& rows);

}  // namespace srprior::cli::svg
