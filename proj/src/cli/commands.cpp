#include "srprior/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "srprior/cli/svg.hpp"
#include "srprior/csv.hpp"
#include "srprior/errors.hpp"
#include "srprior/mcmc.hpp"
#include "srprior/models.hpp"
#include "srprior/prior.hpp"
#include "srprior/scoring.hpp"
#include "srprior/selection.hpp"

namespace srprior::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  const Config& config;
  std::uint64_t seed;
  fs::path out;
  std::optional<long> reps;
  bool desk_scale;
  unsigned threads;
  std::vector<fs::path> written;

  template <typename Writer>
  void emit(const std::string& name, Writer&& write) {
    const fs::path path = out / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + path.string() + "'");
    write(file);
    file.close();
    if (!file) throw ConfigError("failed writing '" + path.string() + "'");
    written.push_back(path);
  }
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int positive_int(const Config& cfg, const std::string& key, long fallback) {
  const long v = cfg.get_int(key, fallback);
  if (v <= 0 || v > std::numeric_limits<int>::max()) {
    throw ConfigError("'" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

long burn_in_for(const Config& cfg, long iters) {
  const long burn = cfg.get_int("burn_in", iters / 2);
  if (burn < 0 || burn >= iters) throw ConfigError("'burn_in' must lie in [0, iters)");
  return burn;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return read_dataset_csv(in);
}

// Starting point inside the domain and well inside the prior support.
double clamp_init(const PriorSpec& spec, double guess) {
  const double r = support_radius(spec);
  const double reach = std::isfinite(r) ? 0.9 * r : std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case DomainKind::UnitInterval:
      return std::clamp(guess, std::max(1e-3, spec.anchor - reach), std::min(1.0 - 1e-3, spec.anchor + reach));
    case DomainKind::PositiveHalfLine:
      return std::clamp(guess, std::min(1e-2, 0.5 * reach), reach);
    default:
      return std::clamp(guess, spec.anchor - reach, spec.anchor + reach);
  }
}

std::vector<double> column(const Chain& chain, Eigen::Index j, long max_points) {
  std::vector<double> out;
  const long stride = std::max(1L, chain.iterations() / max_points);
  for (long t = 0; t < chain.iterations(); t += stride) out.push_back(chain.draws(t, j));
  return out;
}

std::vector<double> iota(std::size_t n, long stride) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i) * static_cast<double>(stride);
  return out;
}

void trace_plot(std::ostream& out, const std::string& title, const Chain& chain,
                const std::vector<Eigen::Index>& coords, const std::vector<std::string>& labels) {
  constexpr long kPoints = 2000;
  const long stride = std::max(1L, chain.iterations() / kPoints);
  std::vector<svg::Series> series;
  for (size_t k = 0; k < coords.size(); ++k) {
    auto y = column(chain, coords[k], kPoints);
    series.push_back({labels[k], iota(y.size(), stride), std::move(y)});
  }
  svg::line_plot(out, title, series, "iteration", "value");
}

PriorSpec scoring_prior_for(DomainKind kind, const Config& cfg) {
  const auto u = cfg.find_double("u_anchor");
  const double c = cfg.get_double("c", 2.0);
  switch (kind) {
    case DomainKind::PositiveHalfLine: return u ? half_line_prior(*u, c) : half_line_prior();
    case DomainKind::RealLineSymmetric: return u ? real_line_symmetric_prior(*u, c) : real_line_symmetric_prior();
    case DomainKind::RealLineSmooth: return real_line_smooth_prior(u.value_or(0.01));
    case DomainKind::UnitInterval:
      return unit_interval_prior(cfg.get_double("center", 0.5), cfg.get_double("w", 1.14));
  }
  throw InvalidSpec("unsupported domain");
}

// ---------------------------------------------------------------------------

void solve_prior(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "kind", "center", "w", "u_anchor", "c", "half_width", "points", "max_step", "u_cap",
                     "flat", "plot"});
  const DomainKind kind = parse_domain_kind(cfg.get_string("kind", "unit"));
  PriorSpec spec = cfg.get_bool("flat", false) ? flat_prior(kind, cfg.get_double("center", 0.5))
                                               : scoring_prior_for(kind, cfg);
  spec.max_step = cfg.get_double("max_step", spec.max_step);
  spec.u_cap = cfg.get_double("u_cap", spec.u_cap);
  validate(spec);
  const double default_width = kind == DomainKind::UnitInterval  ? 0.5
                               : kind == DomainKind::RealLineSmooth ? 7.0
                                                                    : 1.0;
  const double half_width = cfg.get_double("half_width", default_width);
  if (!(half_width > 0.0)) throw ConfigError("'half_width' must be positive");
  const int points = positive_int(cfg, "points", kDefaultPointsPerSide);

  const UTable table = solve_u(spec, half_width, points);
  const DensityTable density = normalize(table);
  ctx.emit("utable.csv", [&](std::ostream& o) { write_csv(o, table); });
  ctx.emit("density.csv", [&](std::ostream& o) { write_csv(o, density); });
  ctx.emit("scores.csv", [&](std::ostream& o) { write_csv(o, score_profile(unnormalized_density(table))); });
  ctx.emit("info.csv", [&](std::ostream& o) { write_csv(o, info_functionals(density)); });
  if (cfg.get_bool("plot", true)) {
    std::vector<double> x(density.theta.data(), density.theta.data() + density.size());
    std::vector<double> y(density.p.data(), density.p.data() + density.size());
    ctx.emit("prior.svg", [&](std::ostream& o) {
      svg::line_plot(o, "normalized prior (" + std::string(to_string(kind)) + ")", {{"p", x, y}}, "theta", "p");
    });
  }
}

void sample(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "model", "theta", "n", "sigma", "prior", "domain", "u_anchor", "c", "iters", "burn_in",
                     "proposal_sd", "init", "data"});
  const std::string model_name = cfg.get_string("model", "poisson");
  const double sigma = cfg.get_double("sigma", 1.0);
  if (!(sigma > 0.0)) throw ConfigError("'sigma' must be positive");
  ModelSpec model;
  DomainKind kind;
  if (model_name == "poisson") {
    model = poisson_model();
    kind = DomainKind::PositiveHalfLine;
  } else if (model_name == "normal") {
    model = normal_model(sigma);
    kind = parse_domain_kind(cfg.get_string("domain", "real-symmetric"));
    if (kind != DomainKind::RealLineSymmetric && kind != DomainKind::RealLineSmooth) {
      throw ConfigError("normal mean needs a real-line domain");
    }
  } else {
    throw ConfigError("'model' must be poisson or normal");
  }
  const std::string prior_name = cfg.get_string("prior", "scoring");
  if (prior_name != "scoring" && prior_name != "flat") throw ConfigError("'prior' must be scoring or flat");
  const PriorSpec prior = prior_name == "flat" ? flat_prior(kind) : scoring_prior_for(kind, cfg);

  Dataset data;
  if (cfg.has("data")) {
    data = load_dataset(cfg.get_string("data", ""));
  } else {
    const double truth = cfg.get_double("theta", model_name == "poisson" ? 2.5 : 5.0);
    const int n = positive_int(cfg, "n", 100);
    Rng rng = derived_rng(ctx.seed, 0);
    data = model_name == "poisson" ? simulate_poisson(truth, n, rng) : simulate_normal(truth, sigma, n, rng);
  }
  if (data.size() == 0) throw ConfigError("empty dataset");

  const long iters = cfg.get_int("iters", 100000);
  if (iters <= 0) throw ConfigError("'iters' must be positive");
  const long burn_in = burn_in_for(cfg, iters);
  const double sd = cfg.get_double("proposal_sd", 0.1);
  const double init = clamp_init(prior, cfg.get_double("init", data.values.mean()));
  const Chain chain = run_chain(model, data, {prior}, Eigen::VectorXd::Constant(1, init),
                                {ProposalSpec::gaussian(sd)}, iters, burn_in, ctx.seed);

  ctx.emit("data.csv", [&](std::ostream& o) { write_csv(o, data); });
  ctx.emit("chain.csv", [&](std::ostream& o) { write_csv(o, chain); });
  ctx.emit("summary.csv", [&](std::ostream& o) { write_csv(o, chain_summary(chain)); });
  ctx.emit("trace.svg", [&](std::ostream& o) {
    trace_plot(o, model_name + " posterior trace", chain, {0}, {model_name == "poisson" ? "theta" : "mu"});
  });
}

void mixture(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "n", "weights", "means", "variances", "iters", "burn_in", "weight_center", "weight_w",
                     "weight_sd", "mean_sd", "variance_sd", "data"});
  const auto w = cfg.get_doubles("weights", {0.25, 0.35, 0.40});
  const auto mu = cfg.get_doubles("means", {-3.5, 0.0, 2.5});
  const auto var = cfg.get_doubles("variances", {0.5, 0.1, 1.2});
  if (w.size() != 3 || mu.size() != 3 || var.size() != 3) {
    throw ConfigError("'weights', 'means' and 'variances' need three values each");
  }
  Eigen::VectorXd truth(9);
  truth << to_vector(w), to_vector(mu), to_vector(var);

  Eigen::VectorXd y;
  if (cfg.has("data")) {
    y = load_dataset(cfg.get_string("data", "")).values;
  } else {
    Rng rng = derived_rng(ctx.seed, 0);
    y = simulate_mixture3(truth, positive_int(cfg, "n", 250), rng).values;
  }
  if (y.size() < 3) throw ConfigError("mixture needs at least three observations");

  const MixturePriors priors{unit_interval_prior(cfg.get_double("weight_center", 0.5), cfg.get_double("weight_w", 1.14)),
                             real_line_symmetric_prior(), half_line_prior()};
  MixtureProposals q;
  q.weight.sd = cfg.get_double("weight_sd", q.weight.sd);
  q.mean.sd = cfg.get_double("mean_sd", q.mean.sd);
  q.variance.sd = cfg.get_double("variance_sd", q.variance.sd);

  std::vector<double> sorted(y.data(), y.data() + y.size());
  Eigen::VectorXd init(9);
  init.head<3>().setConstant(1.0 / 3.0);
  for (int j = 0; j < 3; ++j) {
    init(3 + j) = clamp_init(priors.mean, empirical_quantile(sorted, (2.0 * j + 1.0) / 6.0));
    init(6 + j) = clamp_init(priors.variance, 0.5);
  }
  const long iters = cfg.get_int("iters", 10000);
  if (iters <= 0) throw ConfigError("'iters' must be positive");
  const Chain chain = run_mixture_gibbs(y, priors, init, q, iters, burn_in_for(cfg, iters), ctx.seed);

  ctx.emit("data.csv", [&](std::ostream& o) { write_csv(o, Dataset{y, std::nullopt}); });
  ctx.emit("chain.csv", [&](std::ostream& o) { write_csv(o, chain); });
  ctx.emit("summary.csv", [&](std::ostream& o) { write_csv(o, chain_summary(chain)); });
  ctx.emit("trace.svg", [&](std::ostream& o) {
    trace_plot(o, "mixture means", chain, {3, 4, 5}, {"mu1", "mu2", "mu3"});
  });
}

void model_compare(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "thetas", "phis", "ns", "reps"});
  const auto thetas = cfg.get_doubles("thetas", {5, 2, 2, 2, 5});
  const auto phis = cfg.get_doubles("phis", {0.5, 0.5, 0.2, 0.8, 0.8});
  const auto ns = cfg.get_doubles("ns", {30, 100});
  if (thetas.size() != phis.size() || thetas.empty()) throw ConfigError("'thetas' and 'phis' must pair up");
  const long reps = ctx.reps.value_or(cfg.get_int("reps", ctx.desk_scale ? 20 : 100));
  if (reps <= 0) throw ConfigError("reps must be positive");

  std::uint64_t task = 0;
  for (double nd : ns) {
    const int n = static_cast<int>(nd);
    if (n <= 0 || n != nd) throw ConfigError("'ns' must hold positive integers");
    std::vector<ReplicationRow> rows;
    for (size_t i = 0; i < thetas.size(); ++i) {
      const std::uint64_t row_seed = derived_rng(ctx.seed, task++)();
      rows.push_back(replication_study(n, thetas[i], phis[i], static_cast<int>(reps), row_seed, ctx.threads));
    }
    ctx.emit("model_compare_n" + std::to_string(n) + ".csv", [&](std::ostream& o) { write_csv(o, rows); });
  }
}

void nested_binomial(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "n", "theta0", "w", "b", "t", "points"});
  const auto report = nested_comparison(positive_int(cfg, "n", 12), cfg.get_double("theta0", 0.25),
                                        cfg.get_double("w", 1.5), cfg.get_double("b", 1.0), positive_int(cfg, "t", 8),
                                        positive_int(cfg, "points", 10000));
  ctx.emit("nested_binomial.csv", [&](std::ostream& o) { write_csv(o, report); });
  std::vector<double> y, scoring, intrinsic;
  for (const auto& r : report.rows) {
    y.push_back(r.y);
    scoring.push_back(r.prob_scoring);
    intrinsic.push_back(r.prob_intrinsic);
  }
  ctx.emit("nested_binomial.svg", [&](std::ostream& o) {
    svg::line_plot(o, "P(M1 | y)", {{"scoring prior", y, scoring}, {"intrinsic prior", y, intrinsic}}, "y",
                   "posterior probability");
  });
}

void coverage(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "family", "reps", "iters", "burn_in", "sigma", "proposal_sd", "ns", "thetas"});
  CoverageSettings s;
  s.family = cfg.get_string("family", "poisson");
  if (s.family == "poisson") {
    s.cells = ctx.desk_scale ? desk_poisson_cells() : full_poisson_cells();
  } else if (s.family == "normal") {
    s.cells = normal_cells();
  } else {
    throw ConfigError("'family' must be poisson or normal");
  }
  if (cfg.has("ns") || cfg.has("thetas")) {
    // Explicit grid: every (n, theta) pair.
    s.cells.clear();
    for (double n : cfg.get_doubles("ns", {})) {
      if (n <= 0 || n != std::floor(n)) throw ConfigError("'ns' must hold positive integers");
      for (double th : cfg.get_doubles("thetas", {})) s.cells.push_back({static_cast<int>(n), th});
    }
    if (s.cells.empty()) throw ConfigError("'ns' and 'thetas' must both be non-empty");
  }
  const long reps = ctx.reps.value_or(cfg.get_int("reps", ctx.desk_scale ? 100 : 250));
  if (reps <= 0 || reps > std::numeric_limits<int>::max()) throw ConfigError("reps must be positive");
  s.reps = static_cast<int>(reps);
  s.iters = cfg.get_int("iters", s.iters);
  if (s.iters <= 0) throw ConfigError("'iters' must be positive");
  s.burn_in = cfg.has("burn_in") ? burn_in_for(cfg, s.iters) : std::min(s.burn_in, s.iters / 2);
  s.sigma = cfg.get_double("sigma", 1.0);
  s.proposal_sd = cfg.get_double("proposal_sd", 0.0);
  s.threads = ctx.threads;
  const auto rows = coverage_study(s, ctx.seed);
  ctx.emit("coverage_" + s.family + ".csv", [&](std::ostream& o) { write_csv(o, rows); });
}

void poisson_regression(Context& ctx) {
  const Config& cfg = ctx.config;
  cfg.require_known({"seed", "k", "beta", "n", "covariate_scale", "iters", "burn_in", "proposal_sd", "chains", "data",
                     "prior", "default_prior_variance", "trace_iters"});
  const std::string prior_name = cfg.get_string("prior", "scoring");
  if (prior_name != "scoring" && prior_name != "default") throw ConfigError("'prior' must be scoring or default");

  Dataset data;
  Eigen::VectorXd truth;
  if (cfg.has("data")) {
    data = load_dataset(cfg.get_string("data", ""));
    if (!data.covariates || data.covariates->cols() == 0) throw CsvError("regression data needs x1..xk columns");
  } else {
    const auto listed = cfg.get_doubles("beta", {-0.8, -0.5, 0.0, 0.5, 0.8});
    const int k = positive_int(cfg, "k", static_cast<long>(listed.size()));
    if (static_cast<size_t>(k) < listed.size()) throw ConfigError("'k' is smaller than the number of betas");
    truth = Eigen::VectorXd::Zero(k);
    truth.head(static_cast<Eigen::Index>(listed.size())) = to_vector(listed);
    Rng rng = derived_rng(ctx.seed, 0);
    data = simulate_poisson_regression(truth, positive_int(cfg, "n", 100), rng, truth,
                                       cfg.get_double("covariate_scale", 1.0));
  }
  const int k = static_cast<int>(data.covariates->cols());

  ModelSpec model = poisson_regression_model(k);
  std::vector<PriorSpec> priors(static_cast<size_t>(k), real_line_symmetric_prior());
  if (prior_name == "default") {
    // Independent N(0, v) priors folded into the likelihood.
    const double v = cfg.get_double("default_prior_variance", 1e4);
    if (!(v > 0.0)) throw ConfigError("'default_prior_variance' must be positive");
    model.log_likelihood = [v](const Eigen::VectorXd& beta, const Dataset& d) {
      return loglik_poisson_regression(beta, d) - 0.5 * beta.squaredNorm() / v;
    };
    std::fill(priors.begin(), priors.end(), flat_prior(DomainKind::RealLineSymmetric));
  }

  const long iters = cfg.get_int("iters", 50000);
  if (iters <= 0) throw ConfigError("'iters' must be positive");
  const long burn_in = burn_in_for(cfg, iters);
  const std::vector<ProposalSpec> q(static_cast<size_t>(k), ProposalSpec::gaussian(cfg.get_double("proposal_sd", 0.05)));
  const int chains = positive_int(cfg, "chains", 1);

  // Chain 0 starts at zero; further chains start uniformly within half the support.
  std::vector<Chain> runs(static_cast<size_t>(chains));
  parallel_for(runs.size(), ctx.threads, [&](std::size_t c) {
    Eigen::VectorXd init = Eigen::VectorXd::Zero(k);
    if (c > 0) {
      Rng rng = derived_rng(ctx.seed, 1000 + c);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (int j = 0; j < k; ++j) {
        const double r = support_radius(priors[static_cast<size_t>(j)]);
        init(j) = unif(rng) * (std::isfinite(r) ? 0.5 * r : 1.0);
      }
    }
    runs[c] = run_chain(model, data, priors, init, q, iters, burn_in, derived_rng(ctx.seed, 2000 + c)());
  });

  const auto summary = chain_summary(runs[0]);
  std::vector<IntervalRow> intervals;
  std::vector<svg::Interval> bars;
  for (int j = 0; j < k; ++j) {
    const double t = truth.size() ? truth(j) : std::numeric_limits<double>::quiet_NaN();
    intervals.push_back({j, t, summary.mean(j), summary.lower(j), summary.upper(j)});
    bars.push_back({"beta" + std::to_string(j + 1), summary.lower(j), summary.mean(j), summary.upper(j),
                    truth.size() ? std::optional<double>(t) : std::nullopt});
  }

  ctx.emit("data.csv", [&](std::ostream& o) { write_csv(o, data); });
  for (int c = 0; c < chains; ++c) {
    ctx.emit("chain_" + std::to_string(c) + ".csv", [&](std::ostream& o) { write_csv(o, runs[static_cast<size_t>(c)]); });
  }
  ctx.emit("summary.csv", [&](std::ostream& o) { write_csv(o, summary); });
  ctx.emit("intervals.csv", [&](std::ostream& o) { write_csv(o, intervals); });
  ctx.emit("caterpillar.svg", [&](std::ostream& o) { svg::interval_plot(o, "95% credible intervals", bars); });

  const long shown = std::min(iters, cfg.get_int("trace_iters", 10000));
  ctx.emit("traces.svg", [&](std::ostream& o) {
    std::vector<svg::Series> series;
    for (int c = 0; c < chains; ++c) {
      Chain head = runs[static_cast<size_t>(c)];
      head.draws = head.draws.topRows(shown).eval();
      const long stride = std::max(1L, shown / 2000);
      auto y = column(head, 0, 2000);
      series.push_back({"chain " + std::to_string(c), iota(y.size(), stride), std::move(y)});
    }
    svg::line_plot(o, "beta1 traces", series, "iteration", "beta1");
  });
}

using Runner = void (*)(Context&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"solve-prior", solve_prior},     {"sample", sample},
      {"mixture", mixture},             {"model-compare", model_compare},
      {"nested-binomial", nested_binomial}, {"coverage-study", coverage},
      {"poisson-regression", poisson_regression}};
  return table;
}

// ---------------------------------------------------------------------------

struct Estimate {
  double mean;
  double lower;
  double upper;
};

struct CellTotals {
  double sq_error[2] = {0, 0};
  int covered[2] = {0, 0};
};

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve-prior",     "sample",         "mixture",
                                              "model-compare",   "nested-binomial", "coverage-study",
                                              "poisson-regression"};
  return names;
}

std::vector<fs::path> run_command(const std::string& name, const RunOptions& options) {
  const Config cfg = options.config_path ? Config::load(*options.config_path) : Config{};
  return run_command(name, cfg, options);
}

std::vector<fs::path> run_command(const std::string& name, const Config& config, const RunOptions& options) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw ConfigError("unknown command '" + name + "'");
  std::uint64_t seed;
  if (options.seed) {
    seed = *options.seed;
  } else if (config.has("seed")) {
    const long s = config.get_int("seed", 0);
    if (s < 0) throw ConfigError("'seed' must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else {
    throw ConfigError("a seed is required (config key 'seed' or --seed)");
  }
  if (options.reps && *options.reps <= 0) throw ConfigError("--reps must be positive");
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + options.out_dir.string() + "'");
  Context ctx{config, seed, options.out_dir, options.reps, options.desk_scale, options.threads, {}};
  it->second(ctx);
  return ctx.written;
}

// ---------------------------------------------------------------------------

std::vector<FreqCell> desk_poisson_cells() { return {{3, 1.0}, {10, 1.0}, {30, 10.0}, {100, 100.0}}; }

std::vector<FreqCell> full_poisson_cells() {
  std::vector<FreqCell> cells;
  for (int n : {3, 10, 30, 100}) {
    for (double th : {1.0, 10.0, 100.0, 500.0}) cells.push_back({n, th});
  }
  return cells;
}

std::vector<FreqCell> normal_cells() {
  std::vector<FreqCell> cells;
  for (int n : {30, 100}) {
    for (int mu = -5; mu <= 5; ++mu) cells.push_back({n, static_cast<double>(mu)});
  }
  return cells;
}

std::vector<FreqRow> coverage_study(const CoverageSettings& s, std::uint64_t seed) {
  const bool poisson = s.family == "poisson";
  if (!poisson && s.family != "normal") throw InvalidParameter("family must be poisson or normal");
  if (s.reps <= 0) throw InvalidParameter("reps must be positive");
  if (!(s.sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
  for (const auto& c : s.cells) {
    if (c.n <= 0) throw InvalidParameter("cell sample size must be positive");
    if (poisson && !(c.theta > 0.0)) throw NonPositiveTheta("Poisson mean must be positive");
  }
  const PriorSpec prior = poisson ? half_line_prior() : real_line_symmetric_prior();
  const ModelSpec model = poisson ? poisson_model() : normal_model(s.sigma);

  std::vector<CellTotals> totals(s.cells.size());
  parallel_for(s.cells.size(), s.threads, [&](std::size_t i) {
    const FreqCell cell = s.cells[i];
    Rng rng = derived_rng(seed, i);
    CellTotals& t = totals[i];
    for (int r = 0; r < s.reps; ++r) {
      const Dataset data = poisson ? simulate_poisson(cell.theta, cell.n, rng)
                                   : simulate_normal(cell.theta, s.sigma, cell.n, rng);
      const std::uint64_t chain_seed = rng();
      const double xbar = data.values.mean();
      const double sd = s.proposal_sd > 0.0 ? s.proposal_sd
                        : poisson          ? std::sqrt(std::max(xbar, 1.0 / cell.n) / cell.n)
                                           : s.sigma / std::sqrt(static_cast<double>(cell.n));
      const Chain chain = run_chain(model, data, {prior}, Eigen::VectorXd::Constant(1, clamp_init(prior, xbar)),
                                    {ProposalSpec::gaussian(sd)}, s.iters, s.burn_in, chain_seed);
      const auto cs = chain_summary(chain);
      Estimate est[2] = {{cs.mean(0), cs.lower(0), cs.upper(0)}, {}};
      if (poisson) {
        const auto g = jeffreys_posterior_poisson(data.values);
        est[1] = {g.mean(), g.quantile(0.025), g.quantile(0.975)};
      } else {
        const auto g = jeffreys_posterior_normal_mean(data.values, s.sigma);
        est[1] = {g.mean, g.quantile(0.025), g.quantile(0.975)};
      }
      for (int p = 0; p < 2; ++p) {
        t.sq_error[p] += (est[p].mean - cell.theta) * (est[p].mean - cell.theta);
        t.covered[p] += est[p].lower <= cell.theta && cell.theta <= est[p].upper;
      }
    }
  });

  std::vector<FreqRow> rows;
  for (size_t i = 0; i < s.cells.size(); ++i) {
    for (int p = 0; p < 2; ++p) {
      FreqRow row;
      row.family = s.family;
      row.prior = p == 0 ? "proposed" : "jeffreys";
      row.n = s.cells[i].n;
      row.theta = s.cells[i].theta;
      row.reps = s.reps;
      row.rmse = std::sqrt(totals[i].sq_error[p] / s.reps);
      row.relative_rmse = row.theta != 0.0 ? row.rmse / std::abs(row.theta) : std::numeric_limits<double>::quiet_NaN();
      row.coverage = static_cast<double>(totals[i].covered[p]) / s.reps;
      row.coverage_se = std::sqrt(row.coverage * (1.0 - row.coverage) / s.reps);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<FreqRow>& rows) {
  csv::write_row(out, {"family", "prior", "n", "theta", "reps", "rmse", "relative_rmse", "coverage", "coverage_se"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.family, r.prior, std::to_string(r.n), csv::format(r.theta), std::to_string(r.reps),
                         csv::format(r.rmse), csv::format(r.relative_rmse), csv::format(r.coverage),
                         csv::format(r.coverage_se)});
  }
}

std::vector<FreqRow> read_freq_csv(std::istream& in) {
  const auto doc = csv::read(in);
  std::vector<FreqRow> rows;
  for (const auto& f : doc.rows) {
    auto col = [&](const char* name) { return f[doc.column(name)]; };
    FreqRow r;
    r.family = col("family");
    r.prior = col("prior");
    r.n = static_cast<int>(csv::parse_int(col("n")));
    r.theta = csv::parse_double(col("theta"));
    r.reps = static_cast<int>(csv::parse_int(col("reps")));
    r.rmse = csv::parse_double(col("rmse"));
    r.relative_rmse = csv::parse_double(col("relative_rmse"));
    r.coverage = csv::parse_double(col("coverage"));
    r.coverage_se = csv::parse_double(col("coverage_se"));
    rows.push_back(r);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<IntervalRow>& rows) {
  csv::write_row(out, {"coord", "truth", "mean", "q025", "q975", "contains"});
  for (const auto& r : rows) {
    csv::write_row(out, {std::to_string(r.coord), csv::format(r.truth), csv::format(r.mean), csv::format(r.lower),
                         csv::format(r.upper), r.contains() ? "1" : "0"});
  }
}

std::vector<IntervalRow> read_interval_csv(std::istream& in) {
  const auto doc = csv::read(in);
  std::vector<IntervalRow> rows;
  for (const auto& f : doc.rows) {
    auto col = [&](const char* name) { return f[doc.column(name)]; };
    rows.push_back({static_cast<int>(csv::parse_int(col("coord"))), csv::parse_double(col("truth")),
                    csv::parse_double(col("mean")), csv::parse_double(col("q025")), csv::parse_double(col("q975"))});
  }
  return rows;
}

}  // namespace srprior::cli
