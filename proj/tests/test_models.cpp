#include <doctest.h>

#include <sstream>

#include "srprior/models.hpp"

using namespace srprior;

namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double normal_pdf(double x, double mu, double var) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2 * kPi * var);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd truth_mixture() { return vec({0.25, 0.35, 0.40, -3.5, 0.0, 2.5, 0.5, 0.1, 1.2}); }

}  // namespace

TEST_CASE("Poisson log-likelihood") {
  CHECK(loglik_poisson(1.0, vec({0})) == doctest::Approx(-1.0).epsilon(1e-15));
  const double expected = 5 * std::log(2.5) - 5.0 - std::log(2.0) - std::log(6.0);
  CHECK(loglik_poisson(2.5, vec({2, 3})) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(loglik_poisson(2.5, vec({2, 3})) == doctest::Approx(-2.903452990417225).epsilon(1e-13));
  CHECK_THROWS_AS(loglik_poisson(0.0, vec({1})), NonPositiveTheta);

  // Sample mean 2.5.
  double best = -1e300, arg = 0;
  for (int i = 1; i <= 10000; ++i) {
    const double t = i * 1e-3;
    const double l = loglik_poisson(t, vec({2, 3, 1, 4}));
    if (l > best) best = l, arg = t;
  }
  CHECK(arg == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("normal log-likelihood") {
  CHECK(loglik_normal_known_var(0.0, vec({0}), 1.0) == doctest::Approx(-0.5 * std::log(2 * kPi)));
  CHECK(loglik_normal_known_var(5.0, vec({4, 6}), 1.0) ==
        doctest::Approx(-std::log(2 * kPi) - 1.0).epsilon(1e-14));
  CHECK_THROWS_AS(loglik_normal_known_var(0.0, vec({0}), 0.0), NonPositiveSigma);
}

TEST_CASE("geometric log-likelihood") {
  CHECK(loglik_geometric(0.5, vec({0})) == doctest::Approx(std::log(0.5)));
  CHECK(loglik_geometric(0.2, vec({3, 1})) ==
        doctest::Approx(2 * std::log(0.2) + 4 * std::log(0.8)).epsilon(1e-14));
  CHECK_THROWS_AS(loglik_geometric(1.0, vec({0})), PhiOutOfRange);
  // MLE n / (n + sum x).
  double best = -1e300, arg = 0;
  for (int i = 1; i < 1000; ++i) {
    const double l = loglik_geometric(i * 1e-3, vec({3, 1, 0, 4}));
    if (l > best) best = l, arg = i * 1e-3;
  }
  CHECK(arg == doctest::Approx(4.0 / 12.0).epsilon(3e-3));
}

TEST_CASE("binomial log-likelihood") {
  CHECK(loglik_binomial(0.25, 0, 1) == doctest::Approx(std::log(0.75)));
  CHECK(loglik_binomial(0.25, 3, 12) ==
        doctest::Approx(std::log(220 * std::pow(0.25, 3) * std::pow(0.75, 9))).epsilon(1e-13));
  CHECK(loglik_binomial(0.3, 4, 10) == doctest::Approx(loglik_binomial(0.7, 6, 10)).epsilon(1e-14));
  CHECK(loglik_binomial(0.0, 0, 5) == 0.0);
  CHECK_THROWS_AS(loglik_binomial(0.5, 6, 5), CountOutOfRange);
}

TEST_CASE("Poisson regression log-likelihood") {
  Dataset one{vec({0}), Eigen::MatrixXd::Ones(1, 1)};
  CHECK(loglik_poisson_regression(vec({0}), one) == doctest::Approx(-1.0));
  Dataset two{vec({2}), Eigen::MatrixXd::Constant(1, 1, 2.0)};
  CHECK(loglik_poisson_regression(vec({1}), two) ==
        doctest::Approx(4.0 - std::exp(2.0) - std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(loglik_poisson_regression(vec({1, 2}), two), DimensionMismatch);
  CHECK_THROWS_AS(loglik_poisson_regression(vec({1}), Dataset{vec({1}), std::nullopt}),
                  DimensionMismatch);

  // Gradient vanishes at the maximizer found by Newton's method.
  Rng rng(5);
  const Eigen::VectorXd beta = vec({0.3, -0.2});
  const auto data = simulate_poisson_regression(beta, 200, rng, Eigen::VectorXd::Zero(2));
  const auto& x = *data.covariates;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd mu = (x * b).array().exp();
    const Eigen::VectorXd grad = x.transpose() * (data.values - mu);
    const Eigen::MatrixXd hess = x.transpose() * mu.asDiagonal() * x;
    b += hess.ldlt().solve(grad);
  }
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd up = b, dn = b;
    up(j) += 1e-5;
    dn(j) -= 1e-5;
    const double g = (loglik_poisson_regression(up, data) - loglik_poisson_regression(dn, data)) / 2e-5;
    CHECK(std::abs(g) < 1e-4);
  }
}

TEST_CASE("mixture log-likelihood") {
  const auto truth = truth_mixture();
  const double expected = std::log(0.25 * normal_pdf(0, -3.5, 0.5) + 0.35 * normal_pdf(0, 0, 0.1) +
                                   0.40 * normal_pdf(0, 2.5, 1.2));
  CHECK(loglik_mixture3(truth, vec({0})) == doctest::Approx(expected).epsilon(1e-13));

  const auto degenerate = vec({1, 0, 0, 1.5, 9, 9, 2.0, 1, 1});
  const auto data = vec({0.1, 2.0, -1.0});
  CHECK(loglik_mixture3(degenerate, data) ==
        doctest::Approx(loglik_normal_known_var(1.5, data, std::sqrt(2.0))).epsilon(1e-13));

  const auto permuted = vec({0.40, 0.25, 0.35, 2.5, -3.5, 0.0, 1.2, 0.5, 0.1});
  CHECK(loglik_mixture3(permuted, data) == doctest::Approx(loglik_mixture3(truth, data)).epsilon(1e-14));

  CHECK_THROWS_AS(loglik_mixture3(vec({0.5, 0.5, 0.5, 0, 0, 0, 1, 1, 1}), data), SimplexViolation);
  CHECK_THROWS_AS(loglik_mixture3(vec({0.5, 0.25, 0.25, 0, 0, 0, 1, 0, 1}), data), NonPositiveVariance);
}

TEST_CASE("log-likelihoods match direct evaluation on random configurations") {
  Rng rng(2024);
  std::uniform_real_distribution<double> unif(0.05, 0.95), rate(0.1, 8.0), loc(-3, 3);
  std::uniform_int_distribution<int> count(0, 12);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd counts(6);
    for (auto& x : counts) x = count(rng);
    const double th = rate(rng), phi = unif(rng), mu = loc(rng);

    double pois = 0, geom = 0, norm = 0;
    for (double x : counts) {
      const int k = static_cast<int>(x);
      pois += std::log(std::pow(th, k) * std::exp(-th) / factorial(k));
      geom += std::log(phi * std::pow(1 - phi, k));
      norm += std::log(normal_pdf(x, mu, 2.25));
    }
    REQUIRE(loglik_poisson(th, counts) == doctest::Approx(pois).epsilon(1e-10));
    REQUIRE(loglik_geometric(phi, counts) == doctest::Approx(geom).epsilon(1e-10));
    REQUIRE(loglik_normal_known_var(mu, counts, 1.5) == doctest::Approx(norm).epsilon(1e-10));

    const int n = 12, y = count(rng);
    const double binom = std::log(factorial(n) / (factorial(y) * factorial(n - y)) *
                                  std::pow(phi, y) * std::pow(1 - phi, n - y));
    REQUIRE(loglik_binomial(phi, y, n) == doctest::Approx(binom).epsilon(1e-10));
  }
}

TEST_CASE("simulators") {
  Rng rng(9);
  CHECK(simulate_poisson(0.0, 50, rng).values.isZero());

  const double theta = 3.0;
  const auto big = simulate_poisson(theta, 1000000, rng);
  CHECK(std::abs(big.values.mean() - theta) < 3 * std::sqrt(theta / 1e6));

  Rng a(17), b(17);
  std::vector<int> labels;
  const auto mix = simulate_mixture3(truth_mixture(), 100000, a, &labels);
  CHECK(mix.values == simulate_mixture3(truth_mixture(), 100000, b).values);
  int counts[3] = {0, 0, 0};
  for (int k : labels) counts[k]++;
  CHECK(std::abs(counts[0] / 1e5 - 0.25) < 0.01);
  CHECK(std::abs(counts[1] / 1e5 - 0.35) < 0.01);
  CHECK(std::abs(counts[2] / 1e5 - 0.40) < 0.01);

  const auto geo = simulate_geometric(0.5, 100000, rng);
  CHECK(geo.values.minCoeff() == 0.0);
  CHECK(geo.values.mean() == doctest::Approx(1.0).epsilon(0.02));

  const Eigen::VectorXd beta = vec({-0.8, -0.5, 0, 0.5, 0.8});
  Rng r1(3), r2(3);
  const auto d1 = simulate_poisson_regression(beta, 100, r1, beta);
  const auto d2 = simulate_poisson_regression(beta, 100, r2, beta);
  CHECK(d1.values == d2.values);
  CHECK(*d1.covariates == *d2.covariates);
  CHECK(d1.covariates->rows() == 100);
  CHECK(d1.values.minCoeff() >= 0.0);
}

TEST_CASE("model specs") {
  const auto m = mixture3_model();
  CHECK(m.dimension == 9);
  CHECK(m.domains.size() == 9);
  Rng rng(1);
  const auto d = m.simulate(truth_mixture(), 20, rng);
  CHECK(m.log_likelihood(truth_mixture(), d) == loglik_mixture3(truth_mixture(), d.values));

  const auto r = poisson_regression_model(3);
  CHECK(r.domains.size() == 3);
  const auto reg = r.simulate(vec({0.1, 0.2, 0.3}), 10, rng);
  CHECK(reg.covariates->cols() == 3);
}

TEST_CASE("Jeffreys posteriors") {
  const auto g = jeffreys_posterior_poisson(vec({0}));
  CHECK(g.shape == 0.5);
  CHECK(g.rate == 1.0);
  CHECK(g.mean() == 0.5);
  CHECK(jeffreys_posterior_poisson(vec({2, 3, 2, 3, 2, 3, 2, 3, 2, 3})).mean() == doctest::Approx(2.55));
  // Gamma(1, 1) is exponential.
  const GammaPosterior e{1.0, 1.0};
  CHECK(e.quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const auto n = jeffreys_posterior_normal_mean(vec({5}), 1.0);
  CHECK(n.mean == 5.0);
  CHECK(n.sd == 1.0);
  const auto n100 = jeffreys_posterior_normal_mean(Eigen::VectorXd::Constant(100, 5.0), 1.0);
  CHECK(n100.sd == doctest::Approx(0.1));
  CHECK(n100.quantile(0.975) == doctest::Approx(5.0 + 1.959963984540054 * 0.1).epsilon(1e-12));
}

TEST_CASE("dataset CSV") {
  std::istringstream in("y,x1,x2\n1,0.5,-1\n0,2,3\n");
  const auto d = read_dataset_csv(in);
  REQUIRE(d.size() == 2);
  CHECK(d.values(0) == 1.0);
  CHECK((*d.covariates)(1, 1) == 3.0);

  std::ostringstream out;
  write_csv(out, d);
  CHECK(out.str() == "y,x1,x2\n1,0.5,-1\n0,2,3\n");

  std::istringstream plain("y\n3\n4\n");
  CHECK_FALSE(read_dataset_csv(plain).covariates.has_value());

  std::istringstream missing("x1\n3\n");
  CHECK_THROWS_AS(read_dataset_csv(missing), CsvError);
  std::istringstream extra("y,z\n3,1\n");
  CHECK_THROWS_AS(read_dataset_csv(extra), CsvError);
  std::istringstream ragged("y,x1\n3\n");
  CHECK_THROWS_AS(read_dataset_csv(ragged), CsvError);
}
