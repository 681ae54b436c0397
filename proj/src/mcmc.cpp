#include "srprior/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "srprior/csv.hpp"

namespace srprior {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Proposal and log q(theta | theta') - log q(theta' | theta).
std::pair<double, double> propose(double theta, const ProposalSpec& q, Rng& rng) {
  std::normal_distribution<double> z(0.0, q.sd);
  if (q.kind == ProposalSpec::Kind::RandomWalkGaussian) return {theta + z(rng), 0.0};
  const double next = theta * std::exp(z(rng));
  return {next, std::log(next) - std::log(theta)};
}

bool accept(double log_alpha, Rng& rng) {
  if (!(log_alpha > kNegInf)) return false;  // also rejects NaN
  if (log_alpha >= 0.0) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng)) < log_alpha;
}

void check_init(const PriorSpec& spec, double theta, Eigen::Index j) {
  if (!in_domain(spec, theta)) {
    throw InitOutOfDomain("coordinate " + std::to_string(j) + " starts outside its domain");
  }
}

double initial_u(const PriorSpec& spec, double theta, Eigen::Index j) {
  check_init(spec, theta, j);
  const double u = u_at(spec, theta);
  if (!std::isfinite(u)) {
    throw InitOutOfDomain("coordinate " + std::to_string(j) + " starts beyond the prior support");
  }
  return u;
}

}  // namespace

void validate(const ProposalSpec& q) {
  if (!(q.sd > 0.0) || !std::isfinite(q.sd)) throw InvalidParameter("proposal sd must be positive");
}

MhOutcome mh_step(const MhState& state, const std::function<double(double)>& loglik,
                  const PriorSpec& prior, const ProposalSpec& proposal, Rng& rng) {
  const auto [next, log_q] = propose(state.theta, proposal, rng);
  PriorRatio pr;
  try {
    pr = log_prior_ratio(prior, state.theta, next, state.u);
  } catch (const DomainExit&) {
    return {state, false};
  }
  double ll = kNegInf;
  if (pr.log_ratio > kNegInf) {
    ll = loglik(next);
  }
  const double log_alpha = (ll - state.loglik) + pr.log_ratio + log_q;
  if (!accept(log_alpha, rng)) return {state, false};
  return {{next, pr.u_to, ll}, true};
}

Chain run_chain(const ModelSpec& model, const Dataset& data, const std::vector<PriorSpec>& priors,
                const Eigen::VectorXd& init, const std::vector<ProposalSpec>& proposals, long iters,
                long burn_in, std::uint64_t seed) {
  const Eigen::Index d = init.size();
  if (static_cast<Eigen::Index>(priors.size()) != d || static_cast<Eigen::Index>(proposals.size()) != d ||
      model.dimension != d) {
    throw DimensionMismatch("init, priors, proposals and model dimension disagree");
  }
  if (!(burn_in >= 0 && iters > burn_in)) throw InvalidParameter("need iters > burn_in >= 0");
  for (const auto& q : proposals) validate(q);

  Eigen::VectorXd theta = init;
  Eigen::VectorXd u(d);
  for (Eigen::Index j = 0; j < d; ++j) u(j) = initial_u(priors[static_cast<size_t>(j)], theta(j), j);
  double ll = model.log_likelihood(theta, data);
  if (!std::isfinite(ll)) throw InitOutOfDomain("log-likelihood is not finite at the initial point");

  Chain chain;
  chain.draws.resize(iters, d);
  chain.accepted.assign(static_cast<size_t>(d), 0);
  chain.burn_in = burn_in;
  chain.seed = seed;
  Rng rng(seed);

  for (long t = 0; t < iters; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::VectorXd trial = theta;
      auto conditional = [&](double value) {
        trial(j) = value;
        return model.log_likelihood(trial, data);
      };
      const auto out = mh_step({theta(j), u(j), ll}, conditional, priors[static_cast<size_t>(j)],
                               proposals[static_cast<size_t>(j)], rng);
      if (out.accepted) {
        theta(j) = out.state.theta;
        u(j) = out.state.u;
        ll = out.state.loglik;
        ++chain.accepted[static_cast<size_t>(j)];
      }
    }
    chain.draws.row(t) = theta.transpose();
  }
  return chain;
}

Chain run_mixture_gibbs(const Eigen::VectorXd& data, const MixturePriors& priors,
                        const Eigen::VectorXd& init, const MixtureProposals& proposals, long iters,
                        long burn_in, std::uint64_t seed) {
  if (data.size() == 0) throw InvalidParameter("mixture data is empty");
  if (init.size() != 9) throw DimensionMismatch("mixture init must have length 9");
  if (!(burn_in >= 0 && iters > burn_in)) throw InvalidParameter("need iters > burn_in >= 0");
  validate(proposals.weight);
  validate(proposals.mean);
  validate(proposals.variance);
  for (int i = 0; i < 3; ++i) {
    if (!(init(i) > 0.0 && init(i) < 1.0)) throw SimplexViolation("initial weight outside (0, 1)");
  }
  if (std::abs(init.head<3>().sum() - 1.0) > 1e-9) throw SimplexViolation("initial weights do not sum to 1");

  Eigen::VectorXd theta = init;
  theta(2) = 1.0 - theta(0) - theta(1);
  Eigen::VectorXd u(9);
  for (int i = 0; i < 9; ++i) {
    const PriorSpec& spec = i < 3 ? priors.weight : (i < 6 ? priors.mean : priors.variance);
    u(i) = initial_u(spec, theta(i), i);
  }
  double ll = loglik_mixture3(theta, data);
  if (!std::isfinite(ll)) throw InitOutOfDomain("log-likelihood is not finite at the initial point");

  Chain chain;
  chain.draws.resize(iters, 9);
  chain.accepted.assign(9, 0);
  chain.burn_in = burn_in;
  chain.seed = seed;
  Rng rng(seed);

  auto loglik_at = [&](Eigen::VectorXd trial) {
    try {
      return loglik_mixture3(trial, data);
    } catch (const SimplexViolation&) {
      return kNegInf;
    } catch (const NonPositiveVariance&) {
      return kNegInf;
    }
  };

  for (long t = 0; t < iters; ++t) {
    // Weights: move w1 or w2 and let w3 absorb the change. w3 counts as
    // accepted once per iteration in which it moved.
    bool w3_moved = false;
    for (int i = 0; i < 2; ++i) {
      const auto [next, log_q] = propose(theta(i), proposals.weight, rng);
      const double w3_next = 1.0 - next - theta(1 - i);
      if (!in_domain(priors.weight, next) || !in_domain(priors.weight, w3_next)) continue;
      const auto ri = log_prior_ratio(priors.weight, theta(i), next, u(i));
      const auto r3 = log_prior_ratio(priors.weight, theta(2), w3_next, u(2));
      if (!(ri.log_ratio > kNegInf && r3.log_ratio > kNegInf)) continue;
      Eigen::VectorXd trial = theta;
      trial(i) = next;
      trial(2) = w3_next;
      const double ll_next = loglik_at(trial);
      if (!accept((ll_next - ll) + ri.log_ratio + r3.log_ratio + log_q, rng)) continue;
      theta = trial;
      u(i) = ri.u_to;
      u(2) = r3.u_to;
      ll = ll_next;
      ++chain.accepted[static_cast<size_t>(i)];
      w3_moved = true;
    }
    chain.accepted[2] += w3_moved;
    // Means, then variances.
    for (int i = 3; i < 9; ++i) {
      const PriorSpec& spec = i < 6 ? priors.mean : priors.variance;
      const ProposalSpec& q = i < 6 ? proposals.mean : proposals.variance;
      Eigen::VectorXd trial = theta;
      auto conditional = [&](double value) {
        trial(i) = value;
        return loglik_at(trial);
      };
      const auto out = mh_step({theta(i), u(i), ll}, conditional, spec, q, rng);
      if (out.accepted) {
        theta(i) = out.state.theta;
        u(i) = out.state.u;
        ll = out.state.loglik;
        ++chain.accepted[static_cast<size_t>(i)];
      }
    }
    chain.draws.row(t) = theta.transpose();
  }
  return chain;
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw EmptyChain("no values for a quantile");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ChainSummary chain_summary(const Chain& chain) {
  const long kept = chain.iterations() - chain.burn_in;
  if (kept <= 0) throw EmptyChain("chain has no draws after burn-in");
  const Eigen::MatrixXd r = chain.retained();
  const Eigen::Index d = r.cols();
  ChainSummary s{Eigen::VectorXd(d), Eigen::VectorXd(d), Eigen::VectorXd(d), Eigen::VectorXd(d),
                 Eigen::VectorXd(d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::VectorXd col = r.col(j);
    s.mean(j) = col.mean();
    s.sd(j) = kept > 1 ? std::sqrt((col.array() - s.mean(j)).square().sum() / static_cast<double>(kept - 1))
                       : 0.0;
    std::vector<double> v(col.data(), col.data() + col.size());
    s.lower(j) = empirical_quantile(v, 0.025);
    s.upper(j) = empirical_quantile(std::move(v), 0.975);
    s.acceptance_rate(j) = chain.accepted.empty()
                               ? 0.0
                               : static_cast<double>(chain.accepted[static_cast<size_t>(j)]) /
                                     static_cast<double>(chain.iterations());
  }
  return s;
}

void write_csv(std::ostream& out, const Chain& chain) {
  csv::write_meta(out, "burn_in", std::to_string(chain.burn_in));
  csv::write_meta(out, "seed", std::to_string(chain.seed));
  std::string acc;
  for (size_t j = 0; j < chain.accepted.size(); ++j) {
    if (j) acc += ' ';
    acc += std::to_string(chain.accepted[j]);
  }
  csv::write_meta(out, "accepted", acc);
  std::vector<std::string> row{"iter"};
  for (Eigen::Index j = 0; j < chain.dimension(); ++j) row.push_back("coord_" + std::to_string(j));
  csv::write_row(out, row);
  for (long t = 0; t < chain.iterations(); ++t) {
    row.assign(1, std::to_string(t));
    for (Eigen::Index j = 0; j < chain.dimension(); ++j) row.push_back(csv::format(chain.draws(t, j)));
    csv::write_row(out, row);
  }
}

Chain read_chain_csv(std::istream& in) {
  const auto doc = csv::read(in);
  Chain chain;
  auto meta = [&](const std::string& key) {
    const auto it = doc.meta.find(key);
    if (it == doc.meta.end()) throw CsvError("missing metadata '" + key + "'");
    return it->second;
  };
  chain.burn_in = csv::parse_int(meta("burn_in"));
  chain.seed = static_cast<std::uint64_t>(std::stoull(meta("seed")));
  const std::string acc = meta("accepted");
  if (!acc.empty()) {
    for (const auto& f : csv::split(acc, ' ')) chain.accepted.push_back(csv::parse_int(f));
  }
  if (doc.header.empty() || doc.header[0] != "iter") throw CsvError("chain CSV must start with 'iter'");
  const auto d = static_cast<Eigen::Index>(doc.header.size() - 1);
  chain.draws.resize(static_cast<Eigen::Index>(doc.rows.size()), d);
  for (size_t t = 0; t < doc.rows.size(); ++t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      chain.draws(static_cast<Eigen::Index>(t), j) = csv::parse_double(doc.rows[t][static_cast<size_t>(j + 1)]);
    }
  }
  return chain;
}

void write_csv(std::ostream& out, const ChainSummary& s) {
  csv::write_row(out, {"coord", "mean", "sd", "q025", "q975", "acceptance_rate"});
  for (Eigen::Index j = 0; j < s.mean.size(); ++j) {
    csv::write_row(out, {std::to_string(j), csv::format(s.mean(j)), csv::format(s.sd(j)),
                         csv::format(s.lower(j)), csv::format(s.upper(j)),
                         csv::format(s.acceptance_rate(j))});
  }
}

ChainSummary read_summary_csv(std::istream& in) {
  const auto doc = csv::read(in);
  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  ChainSummary s{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
                 Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& f = doc.rows[static_cast<size_t>(j)];
    if (csv::parse_int(f[doc.column("coord")]) != j) throw CsvError("summary rows out of order");
    s.mean(j) = csv::parse_double(f[doc.column("mean")]);
    s.sd(j) = csv::parse_double(f[doc.column("sd")]);
    s.lower(j) = csv::parse_double(f[doc.column("q025")]);
    s.upper(j) = csv::parse_double(f[doc.column("q975")]);
    s.acceptance_rate(j) = csv::parse_double(f[doc.column("acceptance_rate")]);
  }
  return s;
}

}  // namespace srprior
