#include "srprior/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "srprior/csv.hpp"

namespace srprior {

namespace {

constexpr double kLn10 = 2.302585092994045684;

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double log_binom_pmf(int x, int t, double p) {
  const double log_choose = std::lgamma(t + 1.0) - std::lgamma(x + 1.0) - std::lgamma(t - x + 1.0);
  const double a = x == 0 ? 0.0 : x * std::log(p);
  const double b = x == t ? 0.0 : (t - x) * std::log1p(-p);
  return log_choose + a + b;
}

}  // namespace

BFReport make_bf_report(double log_m1, double log_m2) {
  BFReport r{log_m1, log_m2, log_m1 - log_m2, 1};
  r.winner = r.log_b12 > 0.0 ? 1 : 2;
  return r;
}

double marginal_likelihood(const ModelSpec& model, const DensityTable& prior, const Dataset& data) {
  if (model.dimension != 1) throw DimensionMismatch("marginal_likelihood needs a 1-d model");
  if (prior.size() < 2) throw DegenerateMass("prior grid needs at least two points");
  Eigen::VectorXd log_f(prior.size());
  Eigen::VectorXd param(1);
  for (Eigen::Index i = 0; i < prior.size(); ++i) {
    if (!(prior.log_p(i) > -std::numeric_limits<double>::infinity())) {
      log_f(i) = -std::numeric_limits<double>::infinity();
      continue;
    }
    param(0) = prior.theta(i);
    log_f(i) = model.log_likelihood(param, data) + prior.log_p(i);
  }
  const double log_m = log_trapezoid(prior.theta, log_f);
  if (!(log_m > -std::numeric_limits<double>::infinity())) {
    throw AllZeroIntegrand("likelihood times prior vanishes on the whole grid");
  }
  return log_m;
}

DensityTable uniform_unit_density(int n_cells) {
  if (n_cells < 1) throw InvalidParameter("need at least one cell");
  return density_from_log(Eigen::VectorXd::LinSpaced(n_cells + 1, 0.0, 1.0), Eigen::VectorXd::Zero(n_cells + 1));
}

DensityTable half_line_marginal_prior(const Eigen::VectorXd& counts, const PriorSpec& spec) {
  if (spec.kind != DomainKind::PositiveHalfLine) throw InvalidSpec("expected a half-line prior");
  const double top = counts.size() > 0 ? counts.maxCoeff() : 0.0;
  const double extent = std::max(50.0, 10.0 * top);
  const int cells = static_cast<int>(std::ceil(extent / 1e-3));
  return normalize(solve_u(spec, extent, cells));
}

BFReport bayes_factor_poisson_vs_geometric(const Dataset& data, const DensityTable& prior1,
                                           const DensityTable& prior2) {
  return make_bf_report(marginal_likelihood(poisson_model(), prior1, data),
                        marginal_likelihood(geometric_model(), prior2, data));
}

Rng derived_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

ReplicationRow replication_study(int n, double theta, double phi, int reps, std::uint64_t seed,
                                 unsigned threads) {
  if (reps < 1) throw InvalidParameter("reps must be at least 1");
  if (n < 1) throw InvalidParameter("n must be at least 1");
  const auto uniform = uniform_unit_density();
  std::vector<double> from_m1(static_cast<size_t>(reps)), from_m2(static_cast<size_t>(reps));
  parallel_for(static_cast<size_t>(reps), threads, [&](std::size_t r) {
    Rng rng = derived_rng(seed, r);
    const auto d1 = simulate_poisson(theta, n, rng);
    const auto d2 = simulate_geometric(phi, n, rng);
    from_m1[r] = bayes_factor_poisson_vs_geometric(d1, half_line_marginal_prior(d1.values), uniform).log_b12;
    from_m2[r] = bayes_factor_poisson_vs_geometric(d2, half_line_marginal_prior(d2.values), uniform).log_b12;
  });
  ReplicationRow row;
  row.theta = theta;
  row.phi = phi;
  row.n = n;
  row.reps = reps;
  const auto [lo1, hi1] = std::minmax_element(from_m1.begin(), from_m1.end());
  const auto [lo2, hi2] = std::minmax_element(from_m2.begin(), from_m2.end());
  row.m1_min_log10_bf = *lo1 / kLn10;
  row.m1_max_log10_bf = *hi1 / kLn10;
  row.m2_min_log10_bf = *lo2 / kLn10;
  row.m2_max_log10_bf = *hi2 / kLn10;
  row.exceptions_m1 = static_cast<int>(std::count_if(from_m1.begin(), from_m1.end(), [](double b) { return !(b > 0.0); }));
  row.exceptions_m2 = static_cast<int>(std::count_if(from_m2.begin(), from_m2.end(), [](double b) { return b > 0.0; }));
  return row;
}

PriorSpec centered_unit_prior(double theta0, double w) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw InvalidSpec("theta0 must lie in (0, 1)");
  if (!(w > 0.0)) throw InvalidSpec("w must be positive");
  return unit_interval_prior(theta0, w);
}

double intrinsic_prior(double theta, double b, int t, double theta0) {
  if (!(b > 0.0) || t < 0) throw InvalidParameter("intrinsic prior needs b > 0 and t >= 0");
  if (!(theta >= 0.0 && theta <= 1.0)) return 0.0;
  double total = 0.0;
  for (int x = 0; x <= t; ++x) {
    const double a1 = b + x, a2 = b + t - x;
    const double log_beta_pdf = xlogy(a1 - 1.0, theta) + xlogy(a2 - 1.0, 1.0 - theta) - log_beta_fn(a1, a2);
    total += std::exp(log_beta_pdf + log_binom_pmf(x, t, theta0));
  }
  return total;
}

double intrinsic_bf10(int y, int n, double b, int t, double theta0) {
  if (n < 0 || y < 0 || y > n) throw CountOutOfRange("intrinsic_bf10 needs 0 <= y <= n");
  if (!(b > 0.0) || t < 0) throw InvalidParameter("intrinsic prior needs b > 0 and t >= 0");
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw InvalidParameter("theta0 must lie in (0, 1)");
  const double log_null = y * std::log(theta0) + (n - y) * std::log1p(-theta0);
  std::vector<double> terms;
  for (int x = 0; x <= t; ++x) {
    terms.push_back(log_binom_pmf(x, t, theta0) + log_beta_fn(b + x + y, b + t - x + n - y) -
                    log_beta_fn(b + x, b + t - x) - log_null);
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double v : terms) s += std::exp(v - m);
  return std::exp(m) * s;
}

double posterior_prob_m1(double bf10) { return 1.0 / (1.0 + 1.0 / bf10); }

NestedReport nested_comparison(int n, double theta0, double w, double b, int t, int points_per_side) {
  if (n < 1) throw InvalidParameter("n must be at least 1");
  const auto prior = normalize(solve_u(centered_unit_prior(theta0, w), 1.0, points_per_side));
  const auto model = binomial_model(n);
  NestedReport report;
  report.n = n;
  report.theta0 = theta0;
  for (int y = 0; y <= n; ++y) {
    Dataset data{Eigen::VectorXd::Constant(1, y), std::nullopt};
    const double log_m1 = marginal_likelihood(model, prior, data);
    const double log_m0 = loglik_binomial(theta0, y, n);
    const double bf_scoring = std::exp(log_m1 - log_m0);
    report.rows.push_back({y, posterior_prob_m1(bf_scoring), posterior_prob_m1(intrinsic_bf10(y, n, b, t, theta0))});
  }
  return report;
}

void write_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
  using csv::format;
  csv::write_row(out, {"theta", "phi", "n", "reps", "m1_min_log10_bf", "m1_max_log10_bf", "m2_min_log10_bf",
                       "m2_max_log10_bf", "exceptions_m1", "exceptions_m2"});
  for (const auto& r : rows) {
    csv::write_row(out, {format(r.theta), format(r.phi), std::to_string(r.n), std::to_string(r.reps),
                         format(r.m1_min_log10_bf), format(r.m1_max_log10_bf), format(r.m2_min_log10_bf),
                         format(r.m2_max_log10_bf), std::to_string(r.exceptions_m1),
                         std::to_string(r.exceptions_m2)});
  }
}

std::vector<ReplicationRow> read_replication_csv(std::istream& in) {
  const auto doc = csv::read(in);
  std::vector<ReplicationRow> rows;
  for (const auto& f : doc.rows) {
    auto col = [&](const char* name) { return f[doc.column(name)]; };
    ReplicationRow r;
    r.theta = csv::parse_double(col("theta"));
    r.phi = csv::parse_double(col("phi"));
    r.n = static_cast<int>(csv::parse_int(col("n")));
    r.reps = static_cast<int>(csv::parse_int(col("reps")));
    r.m1_min_log10_bf = csv::parse_double(col("m1_min_log10_bf"));
    r.m1_max_log10_bf = csv::parse_double(col("m1_max_log10_bf"));
    r.m2_min_log10_bf = csv::parse_double(col("m2_min_log10_bf"));
    r.m2_max_log10_bf = csv::parse_double(col("m2_max_log10_bf"));
    r.exceptions_m1 = static_cast<int>(csv::parse_int(col("exceptions_m1")));
    r.exceptions_m2 = static_cast<int>(csv::parse_int(col("exceptions_m2")));
    rows.push_back(r);
  }
  return rows;
}

void write_csv(std::ostream& out, const NestedReport& report) {
  csv::write_meta(out, "n", std::to_string(report.n));
  csv::write_meta(out, "theta0", csv::format(report.theta0));
  csv::write_row(out, {"y", "prob_m1_scoring", "prob_m1_intrinsic"});
  for (const auto& r : report.rows) {
    csv::write_row(out, {std::to_string(r.y), csv::format(r.prob_scoring), csv::format(r.prob_intrinsic)});
  }
}

NestedReport read_nested_csv(std::istream& in) {
  const auto doc = csv::read(in);
  NestedReport report;
  const auto n = doc.meta.find("n");
  const auto t0 = doc.meta.find("theta0");
  if (n == doc.meta.end() || t0 == doc.meta.end()) throw CsvError("missing n or theta0 metadata");
  report.n = static_cast<int>(csv::parse_int(n->second));
  report.theta0 = csv::parse_double(t0->second);
  for (const auto& f : doc.rows) {
    report.rows.push_back({static_cast<int>(csv::parse_int(f[doc.column("y")])),
                           csv::parse_double(f[doc.column("prob_m1_scoring")]),
                           csv::parse_double(f[doc.column("prob_m1_intrinsic")])});
  }
  return report;
}

}  // namespace srprior
