#include "srprior/models.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "srprior/csv.hpp"

namespace srprior {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

void require_counts(const Eigen::VectorXd& counts) {
  for (double x : counts) {
    if (!(x >= 0.0) || x != std::floor(x)) {
      throw CountOutOfRange("count data must be nonnegative integers, got " + csv::format(x));
    }
  }
}

double log_factorial_sum(const Eigen::VectorXd& counts) {
  double s = 0.0;
  for (double x : counts) s += std::lgamma(x + 1.0);
  return s;
}

// log sum_i exp(a_i) for three terms.
double log_sum_exp3(double a, double b, double c) {
  const double m = std::max({a, b, c});
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

void check_mixture(const Eigen::VectorXd& params) {
  if (params.size() != 9) throw DimensionMismatch("mixture parameters must have length 9");
  const double sum = params(0) + params(1) + params(2);
  for (int i = 0; i < 3; ++i) {
    if (!(params(i) >= 0.0 && params(i) <= 1.0)) throw SimplexViolation("weight outside [0, 1]");
    if (!(params(6 + i) > 0.0)) throw NonPositiveVariance("mixture variance must be positive");
  }
  if (std::abs(sum - 1.0) > 1e-9) throw SimplexViolation("weights sum to " + csv::format(sum));
}

const Eigen::MatrixXd& covariates_of(const Dataset& data) {
  if (!data.covariates) throw DimensionMismatch("regression needs covariates");
  if (data.covariates->rows() != data.size()) {
    throw DimensionMismatch("covariate rows do not match response length");
  }
  return *data.covariates;
}

// x log y with 0 log 0 = 0, for likelihoods evaluated on closed grids.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

double loglik_poisson(double theta, const Eigen::VectorXd& counts) {
  if (!(theta > 0.0)) throw NonPositiveTheta("Poisson rate must be positive");
  return counts.sum() * std::log(theta) - static_cast<double>(counts.size()) * theta -
         log_factorial_sum(counts);
}

double loglik_normal_known_var(double mu, const Eigen::VectorXd& data, double sigma) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
  const double n = static_cast<double>(data.size());
  const double ss = (data.array() - mu).square().sum();
  return -0.5 * n * (kLogTwoPi + 2.0 * std::log(sigma)) - ss / (2.0 * sigma * sigma);
}

double loglik_geometric(double phi, const Eigen::VectorXd& counts) {
  if (!(phi > 0.0 && phi < 1.0)) throw PhiOutOfRange("phi must lie in (0, 1)");
  return static_cast<double>(counts.size()) * std::log(phi) + counts.sum() * std::log1p(-phi);
}

double loglik_binomial(double theta, int y, int n) {
  if (n < 0 || y < 0 || y > n) throw CountOutOfRange("binomial needs 0 <= y <= n");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidParameter("binomial theta outside [0, 1]");
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0);
  // 0 * log 0 = 0 at the endpoints.
  const double a = y == 0 ? 0.0 : y * std::log(theta);
  const double b = y == n ? 0.0 : (n - y) * std::log1p(-theta);
  return log_choose + a + b;
}

double loglik_poisson_regression(const Eigen::VectorXd& beta, const Dataset& data) {
  const auto& x = covariates_of(data);
  if (x.cols() != beta.size()) throw DimensionMismatch("beta length does not match covariates");
  const Eigen::VectorXd eta = x * beta;
  return data.values.dot(eta) - eta.array().exp().sum() - log_factorial_sum(data.values);
}

double loglik_mixture3(const Eigen::VectorXd& params, const Eigen::VectorXd& data) {
  check_mixture(params);
  double log_w[3], log_sd[3], inv_var[3];
  for (int i = 0; i < 3; ++i) {
    log_w[i] = std::log(params(i));
    log_sd[i] = 0.5 * std::log(params(6 + i));
    inv_var[i] = 1.0 / params(6 + i);
  }
  double total = 0.0;
  for (double x : data) {
    double t[3];
    for (int i = 0; i < 3; ++i) {
      const double z = x - params(3 + i);
      t[i] = log_w[i] - log_sd[i] - 0.5 * kLogTwoPi - 0.5 * z * z * inv_var[i];
    }
    total += log_sum_exp3(t[0], t[1], t[2]);
  }
  return total;
}

// ---------------------------------------------------------------------------

Dataset simulate_poisson(double theta, int n, Rng& rng) {
  if (!(theta >= 0.0)) throw NonPositiveTheta("Poisson rate must be nonnegative");
  Dataset d{Eigen::VectorXd::Zero(n), std::nullopt};
  if (theta == 0.0) return d;
  std::poisson_distribution<long> dist(theta);
  for (int i = 0; i < n; ++i) d.values(i) = static_cast<double>(dist(rng));
  return d;
}

Dataset simulate_normal(double mu, double sigma, int n, Rng& rng) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
  std::normal_distribution<double> dist(mu, sigma);
  Dataset d{Eigen::VectorXd(n), std::nullopt};
  for (int i = 0; i < n; ++i) d.values(i) = dist(rng);
  return d;
}

Dataset simulate_geometric(double phi, int n, Rng& rng) {
  if (!(phi > 0.0 && phi <= 1.0)) throw PhiOutOfRange("phi must lie in (0, 1]");
  // Failures before the first success: P(x) = phi (1 - phi)^x, x >= 0.
  std::geometric_distribution<long> dist(phi);
  Dataset d{Eigen::VectorXd(n), std::nullopt};
  for (int i = 0; i < n; ++i) d.values(i) = static_cast<double>(dist(rng));
  return d;
}

Dataset simulate_binomial(double theta, int trials, int n, Rng& rng) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidParameter("binomial theta outside [0, 1]");
  std::binomial_distribution<int> dist(trials, theta);
  Dataset d{Eigen::VectorXd(n), std::nullopt};
  for (int i = 0; i < n; ++i) d.values(i) = dist(rng);
  return d;
}

Dataset simulate_mixture3(const Eigen::VectorXd& params, int n, Rng& rng, std::vector<int>* labels) {
  check_mixture(params);
  std::discrete_distribution<int> pick({params(0), params(1), params(2)});
  std::normal_distribution<double> z(0.0, 1.0);
  Dataset d{Eigen::VectorXd(n), std::nullopt};
  if (labels) labels->assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const int k = pick(rng);
    if (labels) (*labels)[static_cast<size_t>(i)] = k;
    d.values(i) = params(3 + k) + std::sqrt(params(6 + k)) * z(rng);
  }
  return d;
}

Dataset simulate_poisson_regression(const Eigen::VectorXd& beta, int n, Rng& rng,
                                    const Eigen::VectorXd& covariate_mean, double covariate_scale) {
  if (covariate_mean.size() != beta.size()) {
    throw DimensionMismatch("covariate mean length does not match beta");
  }
  if (!(covariate_scale > 0.0)) throw InvalidParameter("covariate scale must be positive");
  const Eigen::Index k = beta.size();
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(n, k);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) x(i, j) = covariate_mean(j) + covariate_scale * z(rng);
  }
  Dataset d{Eigen::VectorXd(n), x};
  for (int i = 0; i < n; ++i) {
    std::poisson_distribution<long> dist(std::exp(x.row(i).dot(beta)));
    d.values(i) = static_cast<double>(dist(rng));
  }
  return d;
}

// ---------------------------------------------------------------------------

ModelSpec poisson_model() {
  return {"poisson", 1, {DomainKind::PositiveHalfLine},
          [](const Eigen::VectorXd& p, const Dataset& d) {
            // Also defined at theta = 0, the edge of quadrature grids.
            if (p(0) == 0.0) return xlogy(d.values.sum(), 0.0) - log_factorial_sum(d.values);
            return loglik_poisson(p(0), d.values);
          },
          [](const Eigen::VectorXd& p, int n, Rng& rng) { return simulate_poisson(p(0), n, rng); }};
}

ModelSpec normal_model(double sigma) {
  return {"normal", 1, {DomainKind::RealLineSymmetric},
          [sigma](const Eigen::VectorXd& p, const Dataset& d) {
            return loglik_normal_known_var(p(0), d.values, sigma);
          },
          [sigma](const Eigen::VectorXd& p, int n, Rng& rng) {
            return simulate_normal(p(0), sigma, n, rng);
          }};
}

ModelSpec geometric_model() {
  return {"geometric", 1, {DomainKind::UnitInterval},
          [](const Eigen::VectorXd& p, const Dataset& d) {
            const double phi = p(0);
            if (phi == 0.0 || phi == 1.0) {
              return xlogy(static_cast<double>(d.size()), phi) + xlogy(d.values.sum(), 1.0 - phi);
            }
            return loglik_geometric(phi, d.values);
          },
          [](const Eigen::VectorXd& p, int n, Rng& rng) { return simulate_geometric(p(0), n, rng); }};
}

ModelSpec binomial_model(int trials) {
  return {"binomial", 1, {DomainKind::UnitInterval},
          [trials](const Eigen::VectorXd& p, const Dataset& d) {
            double s = 0.0;
            for (double y : d.values) s += loglik_binomial(p(0), static_cast<int>(y), trials);
            return s;
          },
          [trials](const Eigen::VectorXd& p, int n, Rng& rng) {
            return simulate_binomial(p(0), trials, n, rng);
          }};
}

ModelSpec mixture3_model() {
  using K = DomainKind;
  return {"mixture3", 9,
          {K::UnitInterval, K::UnitInterval, K::UnitInterval, K::RealLineSymmetric,
           K::RealLineSymmetric, K::RealLineSymmetric, K::PositiveHalfLine, K::PositiveHalfLine,
           K::PositiveHalfLine},
          [](const Eigen::VectorXd& p, const Dataset& d) { return loglik_mixture3(p, d.values); },
          [](const Eigen::VectorXd& p, int n, Rng& rng) { return simulate_mixture3(p, n, rng); }};
}

ModelSpec poisson_regression_model(int k) {
  return {"poisson-regression", k, std::vector<DomainKind>(static_cast<size_t>(k), DomainKind::RealLineSymmetric),
          [](const Eigen::VectorXd& beta, const Dataset& d) { return loglik_poisson_regression(beta, d); },
          [](const Eigen::VectorXd& beta, int n, Rng& rng) {
            return simulate_poisson_regression(beta, n, rng, beta);
          }};
}

// ---------------------------------------------------------------------------

double GammaPosterior::quantile(double prob) const {
  boost::math::gamma_distribution<double> g(shape, 1.0 / rate);
  return boost::math::quantile(g, prob);
}

double NormalPosterior::quantile(double prob) const {
  boost::math::normal_distribution<double> g(mean, sd);
  return boost::math::quantile(g, prob);
}

GammaPosterior jeffreys_posterior_poisson(const Eigen::VectorXd& counts) {
  if (counts.size() == 0) throw InvalidParameter("need at least one observation");
  require_counts(counts);
  return {counts.sum() + 0.5, static_cast<double>(counts.size())};
}

NormalPosterior jeffreys_posterior_normal_mean(const Eigen::VectorXd& data, double sigma) {
  if (data.size() == 0) throw InvalidParameter("need at least one observation");
  if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
  return {data.mean(), sigma / std::sqrt(static_cast<double>(data.size()))};
}

// ---------------------------------------------------------------------------

Dataset read_dataset_csv(std::istream& in) {
  const auto doc = csv::read(in);
  const std::size_t ycol = doc.column("y");
  std::vector<std::size_t> xcols;
  for (int j = 1;; ++j) {
    const std::string name = "x" + std::to_string(j);
    bool found = false;
    for (std::size_t c = 0; c < doc.header.size(); ++c) {
      if (doc.header[c] == name) {
        xcols.push_back(c);
        found = true;
      }
    }
    if (!found) break;
  }
  for (const auto& h : doc.header) {
    if (h == "y") continue;
    bool known = false;
    for (std::size_t j = 0; j < xcols.size(); ++j) known |= h == "x" + std::to_string(j + 1);
    if (!known) throw CsvError("unexpected column '" + h + "'");
  }
  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  Dataset d{Eigen::VectorXd(n), std::nullopt};
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(xcols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = doc.rows[static_cast<size_t>(i)];
    d.values(i) = csv::parse_double(row[ycol]);
    for (std::size_t j = 0; j < xcols.size(); ++j) {
      x(i, static_cast<Eigen::Index>(j)) = csv::parse_double(row[xcols[j]]);
    }
  }
  if (!xcols.empty()) d.covariates = std::move(x);
  return d;
}

void write_csv(std::ostream& out, const Dataset& d) {
  const Eigen::Index k = d.covariates ? d.covariates->cols() : 0;
  std::vector<std::string> row{"y"};
  for (Eigen::Index j = 0; j < k; ++j) row.push_back("x" + std::to_string(j + 1));
  csv::write_row(out, row);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    row.assign(1, csv::format(d.values(i)));
    for (Eigen::Index j = 0; j < k; ++j) row.push_back(csv::format((*d.covariates)(i, j)));
    csv::write_row(out, row);
  }
}

}  // namespace srprior
