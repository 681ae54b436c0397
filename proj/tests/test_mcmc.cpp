#include <doctest.h>

#include <sstream>

#include "srprior/mcmc.hpp"

using namespace srprior;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

ModelSpec target_model(std::function<double(double)> log_density) {
  ModelSpec m;
  m.name = "target";
  m.dimension = 1;
  m.domains = {DomainKind::RealLineSmooth};
  m.log_likelihood = [f = std::move(log_density)](const Eigen::VectorXd& p, const Dataset&) {
    return f(p(0));
  };
  return m;
}

}  // namespace

TEST_CASE("flat prior, constant likelihood and symmetric proposal always accept") {
  Rng rng(1);
  MhState s{0.3, 0.0, 0.0};
  const auto flat = flat_prior(DomainKind::RealLineSmooth);
  for (int k = 0; k < 1000; ++k) {
    const auto out = mh_step(s, [](double) { return 0.0; }, flat, ProposalSpec::gaussian(2.0), rng);
    REQUIRE(out.accepted);
    s = out.state;
  }
}

TEST_CASE("proposals outside the unit interval are rejected") {
  Rng rng(2);
  const auto prior = unit_interval_prior(0.5, 1.14);
  const MhState s{0.5, 1.14, 0.0};
  int outside = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto out = mh_step(s, [](double) { return 0.0; }, prior, ProposalSpec::gaussian(5.0), rng);
    if (!out.accepted) {
      CHECK(out.state.theta == s.theta);
      CHECK(out.state.u == s.u);
      ++outside;
    } else {
      REQUIRE(out.state.theta > 0.0);
      REQUIRE(out.state.theta < 1.0);
    }
  }
  CHECK(outside > 1000);
}

TEST_CASE("detailed balance on a five-state restriction") {
  const Eigen::VectorXd w = vec({1, 3, 2, 5, 4});
  auto logf = [&](double t) {
    if (!(t >= 0.0 && t < 5.0)) return -std::numeric_limits<double>::infinity();
    return std::log(w(static_cast<Eigen::Index>(t)));
  };
  const auto chain = run_chain(target_model(logf), Dataset{}, {flat_prior(DomainKind::RealLineSmooth)},
                               vec({0.5}), {ProposalSpec::gaussian(1.5)}, 1000000, 0, 42);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(5);
  for (long t = 0; t < chain.iterations(); ++t) hist(static_cast<Eigen::Index>(chain.draws(t, 0))) += 1;
  hist /= hist.sum();
  CHECK(total_variation(hist, w / w.sum()) < 0.05);
}

TEST_CASE("prior-only sampling reproduces the tabulated unit-interval prior") {
  const auto prior = unit_interval_prior(0.5, 1.14);
  const auto chain = run_chain(target_model([](double) { return 0.0; }), Dataset{}, {prior}, vec({0.5}),
                               {ProposalSpec::gaussian(0.25)}, 1000000, 0, 7);
  const auto table = normalize(solve_u(prior, 0.5, 1000));

  constexpr int kBins = 20;
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(kBins), mass = Eigen::VectorXd::Zero(kBins);
  for (long t = 0; t < chain.iterations(); ++t) {
    hist(std::min(kBins - 1, static_cast<int>(chain.draws(t, 0) * kBins))) += 1;
  }
  hist /= hist.sum();
  for (Eigen::Index i = 0; i + 1 < table.size(); ++i) {
    const double mid = 0.5 * (table.theta(i) + table.theta(i + 1));
    mass(std::min(kBins - 1, static_cast<int>(mid * kBins))) +=
        0.5 * (table.p(i) + table.p(i + 1)) * (table.theta(i + 1) - table.theta(i));
  }
  CHECK(total_variation(hist, mass) < 0.05);
  const double rate = chain_summary(chain).acceptance_rate(0);
  CHECK(rate > 0.0);
  CHECK(rate < 1.0);
}

TEST_CASE("log-scale proposals carry the Hastings correction") {
  // Gamma(3, 1) target on the half-line.
  ModelSpec m = target_model([](double t) { return 2.0 * std::log(t) - t; });
  const auto chain = run_chain(m, Dataset{}, {flat_prior(DomainKind::PositiveHalfLine)}, vec({1.0}),
                               {ProposalSpec::log_scale(0.8)}, 400000, 1000, 5);
  const auto s = chain_summary(chain);
  CHECK(s.mean(0) == doctest::Approx(3.0).epsilon(0.02));
  CHECK(s.sd(0) == doctest::Approx(std::sqrt(3.0)).epsilon(0.03));
}

TEST_CASE("Poisson chain under a flat half-line prior concentrates at the truth") {
  Rng rng(3);
  const auto data = simulate_poisson(2.5, 100, rng);
  const auto chain = run_chain(poisson_model(), data, {flat_prior(DomainKind::PositiveHalfLine)},
                               vec({1.0}), {ProposalSpec::gaussian(0.3)}, 20000, 10000, 9);
  const auto s = chain_summary(chain);
  CHECK(std::abs(s.mean(0) - 2.5) < 2 * s.sd(0) + 1e-12);
  // Flat prior posterior is Gamma(sum + 1, n).
  CHECK(s.mean(0) == doctest::Approx((data.values.sum() + 1) / 100.0).epsilon(0.01));
}

TEST_CASE("run_chain bookkeeping") {
  const auto model = target_model([](double t) { return -0.5 * t * t; });
  const std::vector<PriorSpec> priors{flat_prior(DomainKind::RealLineSmooth)};
  const std::vector<ProposalSpec> q{ProposalSpec::gaussian(1.0)};

  const auto one = run_chain(model, {}, priors, vec({0.0}), q, 11, 10, 1);
  CHECK(one.retained().rows() == 1);
  CHECK(one.accepted[0] <= 11);

  const auto a = run_chain(model, {}, priors, vec({0.0}), q, 500, 100, 77);
  const auto b = run_chain(model, {}, priors, vec({0.0}), q, 500, 100, 77);
  CHECK(a.draws == b.draws);
  CHECK(a.accepted == b.accepted);
  const auto c = run_chain(model, {}, priors, vec({0.0}), q, 500, 100, 78);
  CHECK(a.draws != c.draws);

  CHECK_THROWS_AS(run_chain(model, {}, priors, vec({0.0}), q, 10, 10, 1), InvalidParameter);
  CHECK_THROWS_AS(run_chain(poisson_model(), {}, {half_line_prior()}, vec({-1.0}), q, 10, 0, 1),
                  InitOutOfDomain);
  CHECK_THROWS_AS(run_chain(poisson_model(), {}, {half_line_prior()}, vec({5.0}), q, 10, 0, 1),
                  InitOutOfDomain);
  CHECK_THROWS_AS(run_chain(model, {}, priors, vec({0.0}), {ProposalSpec::gaussian(0.0)}, 10, 0, 1),
                  InvalidParameter);
}

TEST_CASE("chain draws respect the scoring-rule prior support") {
  const auto prior = real_line_symmetric_prior();
  const double radius = support_radius(prior);
  const auto chain = run_chain(target_model([](double) { return 0.0; }), {}, {prior}, vec({0.0}),
                               {ProposalSpec::gaussian(0.3)}, 50000, 0, 4);
  CHECK(chain.draws.cwiseAbs().maxCoeff() <= radius + prior.max_step);
}

TEST_CASE("half-line chain pushed against the support edge never leaves it") {
  const auto prior = half_line_prior();
  Rng rng(13);
  const auto data = simulate_poisson(2.5, 100, rng);
  const auto chain = run_chain(poisson_model(), data, {prior}, vec({0.8}), {ProposalSpec::gaussian(0.1)},
                               20000, 0, 3);
  CHECK(chain.draws.maxCoeff() <= support_radius(prior) + prior.max_step);
  CHECK(chain.draws.minCoeff() > 0.0);
}

TEST_CASE("mixture Gibbs keeps the weights on the simplex") {
  const Eigen::VectorXd truth = vec({0.25, 0.35, 0.40, -3.5, 0.0, 2.5, 0.5, 0.1, 1.2});
  Rng rng(8);
  const auto data = simulate_mixture3(truth, 300, rng);
  const MixturePriors flat{flat_prior(DomainKind::UnitInterval), flat_prior(DomainKind::RealLineSmooth),
                           flat_prior(DomainKind::PositiveHalfLine)};
  const Eigen::VectorXd init = vec({1.0 / 3, 1.0 / 3, 1.0 / 3, -2, 0.5, 2, 1, 1, 1});
  const auto chain = run_mixture_gibbs(data.values, flat, init, {}, 6000, 3000, 21);
  for (long t = 0; t < chain.iterations(); ++t) {
    const auto w = chain.draws.row(t).head<3>();
    REQUIRE(w.minCoeff() > 0.0);
    REQUIRE(w.maxCoeff() < 1.0);
    REQUIRE(std::abs(w.sum() - 1.0) < 1e-12);
    REQUIRE(chain.draws.row(t).tail<3>().minCoeff() > 0.0);
  }
  const auto s = chain_summary(chain);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(s.mean(3 + j) - truth(3 + j)) < 3 * s.sd(3 + j) + 0.05);
  }

  CHECK_THROWS_AS(run_mixture_gibbs(data.values, flat, vec({0.5, 0.5, 0.5, 0, 0, 0, 1, 1, 1}), {}, 10, 0, 1),
                  SimplexViolation);
  CHECK_THROWS_AS(run_mixture_gibbs(data.values, flat, vec({0.5, 0.5, 0.0, 0, 0, 0, 1, 1, 1}), {}, 10, 0, 1),
                  SimplexViolation);
  CHECK_THROWS_AS(run_mixture_gibbs(data.values, flat, vec({0.2, 0.3, 0.5, 0, 0, 0, 1, -1, 1}), {}, 10, 0, 1),
                  InitOutOfDomain);
}

TEST_CASE("chain_summary") {
  Chain constant;
  constant.draws = Eigen::MatrixXd::Constant(50, 2, 1.5);
  constant.accepted = {0, 0};
  const auto c = chain_summary(constant);
  CHECK(c.mean(0) == 1.5);
  CHECK(c.sd(1) == 0.0);
  CHECK(c.lower(0) == 1.5);
  CHECK(c.upper(0) == 1.5);
  CHECK(c.acceptance_rate(0) == 0.0);

  Chain iid;
  Rng rng(12);
  std::normal_distribution<double> z;
  iid.draws.resize(100000, 1);
  for (Eigen::Index i = 0; i < 100000; ++i) iid.draws(i, 0) = z(rng);
  iid.accepted = {100000};
  const auto s = chain_summary(iid);
  CHECK(std::abs(s.mean(0)) < 0.02);
  CHECK(std::abs(s.sd(0) - 1.0) < 0.02);
  CHECK(s.lower(0) == doctest::Approx(-1.96).epsilon(0.03));

  Chain empty;
  empty.draws.resize(10, 1);
  empty.burn_in = 10;
  CHECK_THROWS_AS(chain_summary(empty), EmptyChain);

  CHECK(empirical_quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(empirical_quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(empirical_quantile({1, 2, 3, 4}, 1.0) == 4.0);
}

TEST_CASE("chain CSV round-trips") {
  Chain chain;
  chain.draws = (Eigen::MatrixXd(3, 2) << 0.1, -2, 1.0 / 3, 4e-300, 5, 6).finished();
  chain.accepted = {2, 1};
  chain.burn_in = 1;
  chain.seed = 99;
  std::stringstream ss;
  write_csv(ss, chain);
  const auto back = read_chain_csv(ss);
  CHECK(back.draws == chain.draws);
  CHECK(back.accepted == chain.accepted);
  CHECK(back.burn_in == 1);
  CHECK(back.seed == 99);

  std::ostringstream head;
  write_csv(head, chain);
  CHECK(head.str().find("iter,coord_0,coord_1\n0,0.10000000000000001,-2\n") != std::string::npos);
}
