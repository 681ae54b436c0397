#pragma once

// Random-walk Metropolis-Hastings under the scoring-rule prior. Each
// coordinate carries its current u value, so a move only integrates the
// increment theta -> theta'.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "srprior/models.hpp"
#include "srprior/prior.hpp"

namespace srprior {

struct ProposalSpec {
  enum class Kind { RandomWalkGaussian, RandomWalkLogScale };
  Kind kind = Kind::RandomWalkGaussian;
  double sd = 0.1;

  static ProposalSpec gaussian(double sd) { return {Kind::RandomWalkGaussian, sd}; }
  static ProposalSpec log_scale(double sd) { return {Kind::RandomWalkLogScale, sd}; }
};

void validate(const ProposalSpec& proposal);

struct MhState {
  double theta = 0.0;
  double u = 0.0;       // u(theta) under the coordinate prior
  double loglik = 0.0;  // log-likelihood at theta
};

struct MhOutcome {
  MhState state;
  bool accepted = false;
};

/// One Metropolis-Hastings update of a single coordinate. Proposals outside
/// the domain or beyond the prior support are rejected.
MhOutcome mh_step(const MhState& state, const std::function<double(double)>& loglik,
                  const PriorSpec& prior, const ProposalSpec& proposal, Rng& rng);

struct Chain {
  Eigen::MatrixXd draws;       // every iteration, one row each
  std::vector<long> accepted;  // per coordinate, over all iterations
  long burn_in = 0;
  std::uint64_t seed = 0;

  long iterations() const { return static_cast<long>(draws.rows()); }
  Eigen::Index dimension() const { return draws.cols(); }
  /// Rows after the burn-in.
  Eigen::MatrixXd retained() const { return draws.bottomRows(draws.rows() - burn_in); }
};

/// Single-site Metropolis-within-Gibbs: every iteration sweeps the
/// coordinates in order.
Chain run_chain(const ModelSpec& model, const Dataset& data, const std::vector<PriorSpec>& priors,
                const Eigen::VectorXd& init, const std::vector<ProposalSpec>& proposals, long iters,
                long burn_in, std::uint64_t seed);

struct MixturePriors {
  PriorSpec weight;
  PriorSpec mean;
  PriorSpec variance;
};

struct MixtureProposals {
  ProposalSpec weight = ProposalSpec::gaussian(0.05);
  ProposalSpec mean = ProposalSpec::gaussian(0.1);
  ProposalSpec variance = ProposalSpec::log_scale(0.2);
};

/// Chain over (w1, w2, w3, mu1, mu2, mu3, var1, var2, var3). The weights move
/// through (w1, w2) with w3 = 1 - w1 - w2, and the prior factor covers all
/// three weights.
Chain run_mixture_gibbs(const Eigen::VectorXd& data, const MixturePriors& priors,
                        const Eigen::VectorXd& init, const MixtureProposals& proposals, long iters,
                        long burn_in, std::uint64_t seed);

struct ChainSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd lower;  // 2.5% equal-tailed
  Eigen::VectorXd upper;  // 97.5%
  Eigen::VectorXd acceptance_rate;
};

ChainSummary chain_summary(const Chain& chain);

/// Linear interpolation between order statistics (type 7).
double empirical_quantile(std::vector<double> values, double prob);

void write_csv(std::ostream& out, const Chain& chain);
Chain read_chain_csv(std::istream& in);
void write_csv(std::ostream& out, const ChainSummary& summary);
ChainSummary read_summary_csv(std::istream& in);

}  // namespace srprior
