#pragma once

// Sampling models: log-likelihoods, simulators and the exact Jeffreys
// baselines used by the frequentist study.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srprior/prior.hpp"

namespace srprior {

using Rng = std::mt19937_64;

struct Dataset {
  Eigen::VectorXd values;
  std::optional<Eigen::MatrixXd> covariates;  // one row per response

  Eigen::Index size() const { return values.size(); }
};

struct ModelSpec {
  using LogLik = std::function<double(const Eigen::VectorXd& params, const Dataset& data)>;
  using Simulate = std::function<Dataset(const Eigen::VectorXd& params, int n, Rng& rng)>;

  std::string name;
  int dimension = 1;
  std::vector<DomainKind> domains;  // per coordinate
  LogLik log_likelihood;
  Simulate simulate;
};

// ---------------------------------------------------------------------------
// Log-likelihoods

double loglik_poisson(double theta, const Eigen::VectorXd& counts);
double loglik_normal_known_var(double mu, const Eigen::VectorXd& data, double sigma);
double loglik_geometric(double phi, const Eigen::VectorXd& counts);
double loglik_binomial(double theta, int y, int n);
double loglik_poisson_regression(const Eigen::VectorXd& beta, const Dataset& data);

/// Three-component normal mixture. params = (w1, w2, w3, mu1, mu2, mu3,
/// var1, var2, var3).
double loglik_mixture3(const Eigen::VectorXd& params, const Eigen::VectorXd& data);

// ---------------------------------------------------------------------------
// Simulators

Dataset simulate_poisson(double theta, int n, Rng& rng);
Dataset simulate_normal(double mu, double sigma, int n, Rng& rng);
Dataset simulate_geometric(double phi, int n, Rng& rng);
Dataset simulate_binomial(double theta, int trials, int n, Rng& rng);
/// labels, when given, receives the component index of each draw.
Dataset simulate_mixture3(const Eigen::VectorXd& params, int n, Rng& rng,
                          std::vector<int>* labels = nullptr);

/// Rows x_i ~ N(covariate_mean, covariate_scale^2 I); y_i ~ Poisson(exp(x_i . beta)).
Dataset simulate_poisson_regression(const Eigen::VectorXd& beta, int n, Rng& rng,
                                    const Eigen::VectorXd& covariate_mean,
                                    double covariate_scale = 1.0);

// ---------------------------------------------------------------------------
// Model specs

ModelSpec poisson_model();
ModelSpec normal_model(double sigma = 1.0);
ModelSpec geometric_model();
ModelSpec binomial_model(int trials);
ModelSpec mixture3_model();
ModelSpec poisson_regression_model(int k);

// ---------------------------------------------------------------------------
// Jeffreys baselines

struct GammaPosterior {
  double shape;
  double rate;

  double mean() const { return shape / rate; }
  double quantile(double prob) const;
};

struct NormalPosterior {
  double mean;
  double sd;

  double quantile(double prob) const;
};

/// Gamma(sum x + 1/2, n) under pi(theta) ∝ theta^{-1/2}.
GammaPosterior jeffreys_posterior_poisson(const Eigen::VectorXd& counts);

/// N(xbar, sigma^2 / n) under a flat prior.
NormalPosterior jeffreys_posterior_normal_mean(const Eigen::VectorXd& data, double sigma);

// ---------------------------------------------------------------------------
// CSV: a `y` column and optional covariates `x1..xk`.

Dataset read_dataset_csv(std::istream& in);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace srprior
