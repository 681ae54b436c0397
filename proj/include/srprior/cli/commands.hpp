#pragma once

// Experiment runners behind the `srprior` subcommands. Each writes CSV (and
// SVG) artifacts into an output directory and is deterministic given the
// config and the seed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srprior/cli/config.hpp"

namespace srprior::cli {

struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;  // overrides the config `seed`
  std::filesystem::path out_dir = ".";
  std::optional<long> reps;
  bool desk_scale = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

const std::vector<std::string>& command_names();

/// Loads options.config_path (when set) and runs the named command.
/// Returns the files written, in order.
std::vector<std::filesystem::path> run_command(const std::string& name, const RunOptions& options);
std::vector<std::filesystem::path> run_command(const std::string& name, const Config& config,
                                               const RunOptions& options);

// ---------------------------------------------------------------------------
// Frequentist study

struct FreqCell {
  int n = 0;
  double theta = 0.0;
};

struct FreqRow {
  std::string family;  // poisson | normal
  std::string prior;   // proposed | jeffreys
  int n = 0;
  double theta = 0.0;
  int reps = 0;
  double rmse = 0.0;
  double relative_rmse = 0.0;  // rmse / |theta|; nan at theta = 0
  double coverage = 0.0;
  double coverage_se = 0.0;  // binomial standard error
};

struct CoverageSettings {
  std::string family = "poisson";
  std::vector<FreqCell> cells;
  int reps = 100;
  long iters = 5000;
  long burn_in = 1000;
  double sigma = 1.0;        // normal family only
  double proposal_sd = 0.0;  // 0 picks sqrt(max(xbar, 1/n) / n) or sigma / sqrt(n)
  unsigned threads = 0;
};

std::vector<FreqCell> desk_poisson_cells();
std::vector<FreqCell> full_poisson_cells();
std::vector<FreqCell> normal_cells();

/// Two rows per cell (proposed, then jeffreys). Cell i draws its data from
/// derived_rng(seed, i), so the result does not depend on the thread count.
std::vector<FreqRow> coverage_study(const CoverageSettings& settings, std::uint64_t seed);

void write_csv(std::ostream& out, const std::vector<FreqRow>& rows);
std::vector<FreqRow> read_freq_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Credible intervals against known truth

struct IntervalRow {
  int coord = 0;
  double truth = 0.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool contains() const { return lower <= truth && truth <= upper; }
};

void write_csv(std::ostream& out, const std::vector<IntervalRow>& rows);
std::vector<IntervalRow> read_interval_csv(std::istream& in);

}  // namespace srprior::cli
