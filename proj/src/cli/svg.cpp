#include "srprior/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace srprior::cli::svg {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

struct Frame {
  Range xr, yr;
  double px(double x) const { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom); }
};

void header(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
}

void axes(std::ostream& out, const Frame& f, const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.xr.lo + k * (f.xr.hi - f.xr.lo) / 4, yv = f.yr.lo + k * (f.yr.hi - f.yr.lo) / 4;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (y0 + y1) / 2 << ")\">" << escape(y_label) << "</text>\n";
}

}  // namespace

void line_plot(std::ostream& out, const std::string& title, const std::vector<Series>& series,
               const std::string& x_label, const std::string& y_label) {
  Frame f;
  for (const auto& s : series) {
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        f.xr.add(s.x[i]);
        f.yr.add(s.y[i]);
      }
    }
  }
  f.xr.finish();
  f.yr.finish();
  header(out, title);
  axes(out, f, x_label, y_label);
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"" << points
            << "\"/>\n";
      }
      points.clear();
    };
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
    }
    flush();
    if (!s.label.empty()) {
      out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 + 14 * k << "\" text-anchor=\"end\" fill=\""
          << color << "\">" << escape(s.label) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

void interval_plot(std::ostream& out, const std::string& title, const std::vector<Interval>& rows) {
  Frame f;
  for (const auto& r : rows) {
    f.xr.add(r.lower);
    f.xr.add(r.upper);
    if (r.truth) f.xr.add(*r.truth);
  }
  f.xr.finish();
  f.yr.lo = 0;
  f.yr.hi = static_cast<double>(rows.size()) + 1;
  header(out, title);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.xr.lo + k * (f.xr.hi - f.xr.lo) / 4;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = f.py(static_cast<double>(rows.size() - i));
    out << "<line x1=\"" << num(f.px(r.lower)) << "\" x2=\"" << num(f.px(r.upper)) << "\" y1=\"" << num(y)
        << "\" y2=\"" << num(y) << "\" stroke=\"" << kColors[0] << "\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << num(f.px(r.center)) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << kColors[0]
        << "\"/>\n";
    if (r.truth) {
      out << "<line x1=\"" << num(f.px(*r.truth)) << "\" x2=\"" << num(f.px(*r.truth)) << "\" y1=\"" << num(y - 6)
          << "\" y2=\"" << num(y + 6) << "\" stroke=\"" << kColors[1] << "\" stroke-width=\"2\"/>\n";
    }
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << escape(r.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace srprior::cli::svg
