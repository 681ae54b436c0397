#pragma once

// Marginal likelihoods by quadrature on a prior grid, Bayes factors, the
// Poisson/geometric replication study and the nested binomial comparison.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "srprior/models.hpp"
#include "srprior/prior.hpp"

namespace srprior {

struct BFReport {
  double log_m1 = 0.0;
  double log_m2 = 0.0;
  double log_b12 = 0.0;
  int winner = 1;  // 1 when log_b12 > 0, else 2
};

BFReport make_bf_report(double log_m1, double log_m2);

/// log ∫ l(theta) p(theta) dtheta by the trapezoid rule on the prior grid.
/// Throws AllZeroIntegrand when the integrand vanishes everywhere.
double marginal_likelihood(const ModelSpec& model, const DensityTable& prior, const Dataset& data);

/// Uniform density on [0, 1] with n_cells cells.
DensityTable uniform_unit_density(int n_cells = 10000);

/// Normalized half-line prior on a grid of step <= 1e-3 that extends to
/// max(50, 10 max(data)) or to the support edge, whichever comes first.
DensityTable half_line_marginal_prior(const Eigen::VectorXd& counts,
                                      const PriorSpec& spec = half_line_prior());

BFReport bayes_factor_poisson_vs_geometric(const Dataset& data, const DensityTable& prior1,
                                           const DensityTable& prior2);

struct ReplicationRow {
  double theta = 0.0;
  double phi = 0.0;
  int n = 0;
  int reps = 0;
  // log10 B12 extremes for data drawn from each model.
  double m1_min_log10_bf = 0.0;
  double m1_max_log10_bf = 0.0;
  double m2_min_log10_bf = 0.0;
  double m2_max_log10_bf = 0.0;
  int exceptions_m1 = 0;  // Poisson data, geometric selected
  int exceptions_m2 = 0;  // geometric data, Poisson selected
};

/// reps draws of size n from Poisson(theta) and from Geometric(phi). Draw r
/// uses a generator seeded from (seed, r); the result does not depend on
/// the thread count.
ReplicationRow replication_study(int n, double theta, double phi, int reps, std::uint64_t seed,
                                 unsigned threads = 0);

/// Unit-interval prior with u(theta0) = w, c = 2.
PriorSpec centered_unit_prior(double theta0, double w);

/// sum_x Beta(theta | b + x, b + t - x) Bin(x | t, theta0).
double intrinsic_prior(double theta, double b, int t, double theta0);

/// Bayes factor of the full binomial model under the intrinsic prior against
/// the point null theta = theta0.
double intrinsic_bf10(int y, int n, double b, int t, double theta0);

/// (1 + 1 / B10)^{-1}.
double posterior_prob_m1(double bf10);

struct NestedRow {
  int y = 0;
  double prob_scoring = 0.0;
  double prob_intrinsic = 0.0;
};

struct NestedReport {
  int n = 0;
  double theta0 = 0.0;
  std::vector<NestedRow> rows;
};

NestedReport nested_comparison(int n, double theta0, double w, double b, int t,
                               int points_per_side = 10000);

void write_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
void write_csv(std::ostream& out, const NestedReport& report);
std::vector<ReplicationRow> read_replication_csv(std::istream& in);
NestedReport read_nested_csv(std::istream& in);

/// Per-task generator seeded from (master, index) through std::seed_seq.
Rng derived_rng(std::uint64_t master, std::uint64_t index);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace srprior
