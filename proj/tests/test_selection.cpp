#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <sstream>

#include "oracles.hpp"
#include "srprior/selection.hpp"

using namespace srprior;

namespace {

Dataset counts(std::initializer_list<double> v) {
  Dataset d{Eigen::VectorXd(static_cast<Eigen::Index>(v.size())), std::nullopt};
  Eigen::Index i = 0;
  for (double x : v) d.values(i++) = x;
  return d;
}

// The same sum with the Bin(x | t, theta0) weights dropped.
double unweighted_bf10(int y, int n, double b, int t, double theta0) {
  double s = 0.0;
  for (int x = 0; x <= t; ++x) {
    s += std::exp(oracle::log_beta(b + x + y, b + t - x + n - y) - oracle::log_beta(b + x, b + t - x)) /
         (std::pow(theta0, y) * std::pow(1 - theta0, n - y));
  }
  return s;
}

}  // namespace

TEST_CASE("marginal likelihoods against Beta-function closed forms") {
  const auto uniform = uniform_unit_density(10000);
  CHECK(std::exp(marginal_likelihood(binomial_model(1), uniform, counts({1}))) ==
        doctest::Approx(0.5).epsilon(1e-10));

  for (int x : {0, 1, 3, 7}) {
    const double closed = oracle::log_beta(2, x + 1);
    CHECK(std::abs(std::exp(marginal_likelihood(geometric_model(), uniform, counts({double(x)}))) -
                   std::exp(closed)) < 1e-8);
  }
  const auto multi = counts({2, 0, 5});
  CHECK(std::abs(marginal_likelihood(geometric_model(), uniform, multi) - oracle::log_beta(4, 8)) < 1e-8);

  for (int y = 0; y <= 12; ++y) {
    const double closed = std::lgamma(13) - std::lgamma(y + 1) - std::lgamma(13 - y) + oracle::log_beta(y + 1, 13 - y);
    CHECK(std::abs(std::exp(marginal_likelihood(binomial_model(12), uniform, counts({double(y)}))) -
                   std::exp(closed)) < 1e-8);
  }

  // Beta(3, 2)-shaped prior times binomial.
  Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(10001, 0.0, 1.0);
  Eigen::VectorXd log_p(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    log_p(i) = (i == 0 ? -INFINITY : 2 * std::log(theta(i))) + std::log1p(-theta(i)) - oracle::log_beta(3, 2);
  }
  const auto beta_prior = density_from_log(theta, log_p);
  const double closed = std::log(10.0) + oracle::log_beta(5, 5) - oracle::log_beta(3, 2);
  CHECK(std::abs(std::exp(marginal_likelihood(binomial_model(5), beta_prior, counts({2}))) - std::exp(closed)) < 1e-8);
}

TEST_CASE("marginal likelihood errors") {
  DensityTable zero = uniform_unit_density(10);
  zero.log_p.setConstant(-INFINITY);
  zero.p.setZero();
  CHECK_THROWS_AS(marginal_likelihood(geometric_model(), zero, counts({1})), AllZeroIntegrand);
  CHECK_THROWS_AS(marginal_likelihood(mixture3_model(), uniform_unit_density(10), counts({1})), DimensionMismatch);
}

TEST_CASE("Poisson marginal under the half-line prior is stable in the grid extent") {
  const auto data = counts({0, 1, 0, 2, 1});
  const auto spec = half_line_prior();
  const auto t50 = normalize(solve_u(spec, 50.0, 50000));
  const auto t100 = normalize(solve_u(spec, 100.0, 100000));
  const double a = marginal_likelihood(poisson_model(), t50, data);
  const double b = marginal_likelihood(poisson_model(), t100, data);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) < 1e-6);

  const auto grid = half_line_marginal_prior(data.values);
  CHECK(grid.theta(1) - grid.theta(0) <= 1e-3 + 1e-15);
  CHECK(std::abs(trapezoid(grid.theta, grid.p) - 1.0) < 1e-10);
}

TEST_CASE("Bayes factor report") {
  const auto r = make_bf_report(-10.0, -12.5);
  CHECK(r.log_b12 == 2.5);
  CHECK(r.winner == 1);
  CHECK(make_bf_report(-3.0, -1.0).winner == 2);
  // Shifting both marginals leaves the winner unchanged.
  for (double shift : {-700.0, -1.0, 0.0, 35.0, 500.0}) {
    CHECK(make_bf_report(-10.0 + shift, -12.5 + shift).winner == 1);
    CHECK(make_bf_report(-3.0 + shift, -1.0 + shift).winner == 2);
  }

  const auto uniform = uniform_unit_density();
  const auto zeros = counts({0, 0, 0, 0, 0, 0, 0, 0, 1, 0});
  const auto bf = bayes_factor_poisson_vs_geometric(zeros, half_line_marginal_prior(zeros.values), uniform);
  CHECK(bf.log_b12 == bf.log_m1 - bf.log_m2);
}

TEST_CASE("replication study bookkeeping") {
  const auto one = replication_study(20, 0.5, 0.5, 1, 3);
  CHECK(one.reps == 1);
  CHECK((one.exceptions_m1 == 0 || one.exceptions_m1 == 1));
  CHECK((one.exceptions_m2 == 0 || one.exceptions_m2 == 1));
  CHECK(one.m1_min_log10_bf == one.m1_max_log10_bf);

  const auto a = replication_study(30, 0.5, 0.6, 8, 11, 1);
  const auto b = replication_study(30, 0.5, 0.6, 8, 11, 3);
  CHECK(a.m1_min_log10_bf == b.m1_min_log10_bf);
  CHECK(a.m2_max_log10_bf == b.m2_max_log10_bf);
  CHECK(a.exceptions_m1 == b.exceptions_m1);
  CHECK(a.m1_min_log10_bf <= a.m1_max_log10_bf);

  std::stringstream ss;
  write_csv(ss, std::vector<ReplicationRow>{a});
  const auto back = read_replication_csv(ss);
  REQUIRE(back.size() == 1);
  CHECK(back[0].m2_min_log10_bf == a.m2_min_log10_bf);
  CHECK(back[0].exceptions_m2 == a.exceptions_m2);

  CHECK_THROWS_AS(replication_study(10, 1, 0.5, 0, 1), InvalidParameter);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) { if (i == 5) throw InvalidParameter("x"); }),
                  InvalidParameter);
  Rng a = derived_rng(1, 2), b = derived_rng(1, 2), c = derived_rng(1, 3);
  CHECK(a() == b());
  CHECK(derived_rng(1, 2)() != c());
}

TEST_CASE("centered unit prior") {
  const auto s = centered_unit_prior(0.25, 1.5);
  CHECK(s.anchor == 0.25);
  CHECK(s.u_anchor == 1.5);
  CHECK(s.c == 2.0);
  const auto t = solve_u(s, 1.0, 1000);
  Eigen::Index at_min;
  t.u.minCoeff(&at_min);
  CHECK(t.theta(at_min) == doctest::Approx(0.25));
  CHECK(t.u(at_min - 1) > t.u(at_min));
  CHECK(t.u(at_min + 1) > t.u(at_min));

  const auto half = centered_unit_prior(0.5, 1.14);
  const auto ref = unit_interval_prior(0.5, 1.14);
  CHECK(half.anchor == ref.anchor);
  CHECK(half.u_anchor == ref.u_anchor);
  CHECK_THROWS_AS(centered_unit_prior(0.0, 1.5), InvalidSpec);
  CHECK_THROWS_AS(centered_unit_prior(0.3, 0.0), InvalidSpec);
}

TEST_CASE("intrinsic prior") {
  // t = 0 is Beta(b, b).
  for (double th : {0.1, 0.4, 0.77}) {
    const double beta = std::exp(std::log(th) + std::log1p(-th) - oracle::log_beta(2, 2));
    CHECK(intrinsic_prior(th, 2.0, 0, 0.3) == doctest::Approx(beta).epsilon(1e-13));
    CHECK(intrinsic_prior(th, 2.0, 0, 0.3) == doctest::Approx(intrinsic_prior(1 - th, 2.0, 0, 0.3)).epsilon(1e-13));
  }

  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  auto mass = [&](double b, int t, double t0) {
    return gk.integrate([&](double th) { return intrinsic_prior(th, b, t, t0); }, 0.0, 1.0, 10, 1e-13);
  };
  auto mean = [&](double b, int t, double t0) {
    return gk.integrate([&](double th) { return th * intrinsic_prior(th, b, t, t0); }, 0.0, 1.0, 10, 1e-13);
  };
  CHECK(std::abs(mass(1, 8, 0.25) - 1.0) < 1e-8);
  CHECK(mean(1, 8, 0.25) == doctest::Approx(0.3).epsilon(1e-10));

  // b < 1 puts integrable singularities at the endpoints.
  boost::math::quadrature::tanh_sinh<double> ts;
  Rng rng(4);
  std::uniform_real_distribution<double> bd(0.5, 4.0), t0(0.05, 0.95);
  std::uniform_int_distribution<int> td(0, 15);
  for (int k = 0; k < 20; ++k) {
    const double b = bd(rng), th0 = t0(rng);
    const int t = td(rng);
    REQUIRE(std::abs(ts.integrate([&](double th) { return intrinsic_prior(th, b, t, th0); }, 0.0, 1.0) - 1.0) < 1e-6);
  }
}

TEST_CASE("intrinsic Bayes factor matches quadrature") {
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  for (int y = 0; y <= 12; ++y) {
    const double m1 = gk.integrate(
        [&](double th) { return std::exp(loglik_binomial(th, y, 12)) * intrinsic_prior(th, 1, 8, 0.25); }, 0.0,
        1.0, 10, 1e-14);
    const double m0 = std::exp(loglik_binomial(0.25, y, 12));
    const double bf = intrinsic_bf10(y, 12, 1, 8, 0.25);
    CHECK(std::abs(bf - m1 / m0) < 1e-8 * std::max(1.0, bf));
    CHECK(std::abs(posterior_prob_m1(bf) - m1 / (m1 + m0)) < 1e-8);
  }
  // Dropping the mixture weights does not reproduce the marginal ratio.
  const double m1 = gk.integrate(
      [&](double th) { return std::exp(loglik_binomial(th, 3, 12)) * intrinsic_prior(th, 1, 8, 0.25); }, 0.0, 1.0);
  CHECK(std::abs(unweighted_bf10(3, 12, 1, 8, 0.25) - m1 / std::exp(loglik_binomial(0.25, 3, 12))) > 1.0);
}

TEST_CASE("nested comparison curves") {
  const auto report = nested_comparison(12, 0.25, 1.5, 1.0, 8);
  REQUIRE(report.rows.size() == 13);
  auto argmin = [&](auto field) {
    int best = 0;
    for (int y = 1; y <= 12; ++y) {
      if (field(report.rows[static_cast<size_t>(y)]) < field(report.rows[static_cast<size_t>(best)])) best = y;
    }
    return best;
  };
  CHECK(argmin([](const NestedRow& r) { return r.prob_scoring; }) == 3);
  CHECK(argmin([](const NestedRow& r) { return r.prob_intrinsic; }) == 3);
  double worst = 0.0;
  for (const auto& r : report.rows) {
    CHECK(r.prob_scoring > 0.0);
    CHECK(r.prob_scoring < 1.0);
    CHECK(r.prob_intrinsic > 0.0);
    CHECK(r.prob_intrinsic < 1.0);
    worst = std::max(worst, std::abs(r.prob_scoring - r.prob_intrinsic));
  }
  CHECK(worst < 0.15);
  for (int y = 4; y <= 12; ++y) {
    CHECK(report.rows[y].prob_scoring > report.rows[y - 1].prob_scoring);
    CHECK(report.rows[y].prob_intrinsic > report.rows[y - 1].prob_intrinsic);
  }
  for (int y = 2; y >= 0; --y) {
    CHECK(report.rows[y].prob_scoring > report.rows[y + 1].prob_scoring);
    CHECK(report.rows[y].prob_intrinsic > report.rows[y + 1].prob_intrinsic);
  }

  std::stringstream ss;
  write_csv(ss, report);
  const auto back = read_nested_csv(ss);
  CHECK(back.n == 12);
  CHECK(back.rows[5].prob_intrinsic == report.rows[5].prob_intrinsic);
}
