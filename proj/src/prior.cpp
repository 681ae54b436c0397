#include "srprior/prior.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "srprior/csv.hpp"

namespace srprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_unit(const PriorSpec& s) { return s.kind == DomainKind::UnitInterval; }

double radicand_at(double u, double c) { return c * std::exp(u) - 2.0 * (1.0 + u); }

// u' jumps at the anchor whenever the slope there is nonzero and the anchor
// has neighbours on both sides.
bool has_kink(const PriorSpec& s) {
  if (s.kind == DomainKind::PositiveHalfLine || s.kind == DomainKind::RealLineSmooth) return false;
  return radicand_at(s.u_anchor, s.c) > kRadicandTol;
}

Eigen::VectorXd solve_branch(const PriorSpec& spec, double extent, int n_points, bool& truncated) {
  const double h = extent / n_points;
  std::vector<double> values{spec.u_anchor};
  values.reserve(static_cast<size_t>(n_points) + 1);
  double u = spec.u_anchor;
  for (int i = 1; i <= n_points; ++i) {
    u = advance_radial(spec, u, (i - 1) * h, i == n_points ? extent : i * h);
    if (!std::isfinite(u)) {
      truncated = true;
      break;
    }
    values.push_back(u);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

bool has_anchor_kink(const PriorSpec& spec) { return has_kink(spec); }

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitInterval: return "unit";
    case DomainKind::PositiveHalfLine: return "half-line";
    case DomainKind::RealLineSymmetric: return "real-symmetric";
    case DomainKind::RealLineSmooth: return "real-smooth";
  }
  return "?";
}

DomainKind parse_domain_kind(std::string_view name) {
  for (auto k : {DomainKind::UnitInterval, DomainKind::PositiveHalfLine,
                 DomainKind::RealLineSymmetric, DomainKind::RealLineSmooth}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidSpec("unknown domain kind '" + std::string(name) +
                    "' (expected unit, half-line, real-symmetric or real-smooth)");
}

void validate(const PriorSpec& s) {
  if (!std::isfinite(s.c) || !std::isfinite(s.u_anchor)) throw InvalidSpec("non-finite constants");
  if (!(s.max_step > 0.0)) throw InvalidSpec("max_step must be positive");
  if (!(s.u_cap > s.u_anchor)) throw InvalidSpec("u_cap must exceed u_anchor");
  if (is_unit(s)) {
    if (!(s.center > 0.0 && s.center < 1.0)) throw InvalidSpec("unit-interval center must lie in (0,1)");
    if (s.anchor != s.center) throw InvalidSpec("unit-interval anchor must equal its center");
  } else if (s.anchor != 0.0) {
    throw InvalidSpec("anchor must be 0 on the half line and the real line");
  }
  if (s.kind == DomainKind::PositiveHalfLine && s.c < 2.0) {
    throw InvalidSpec("half-line prior needs c >= 2");
  }
  const double ceu = s.c * std::exp(s.u_anchor);
  const double rad = ceu - 2.0 * (1.0 + s.u_anchor);
  if (rad < -kRadicandTol) throw InvalidSpec("c*e^u - 2(1+u) < 0 at the anchor");
  if (s.kind == DomainKind::RealLineSmooth && std::abs(rad) > 1e-12 * std::max(1.0, ceu)) {
    throw InvalidSpec("smooth real-line prior needs c*e^u0 = 2 + 2*u0");
  }
  // u must increase away from the anchor; otherwise the radicand can reach
  // zero at a turning point and the monotone branch ends.
  if (ceu < 2.0 - 1e-12) throw InvalidSpec("c*e^u0 < 2: u would decrease away from the anchor");
}

PriorSpec unit_interval_prior(double center, double w) {
  PriorSpec s{DomainKind::UnitInterval, center, 2.0, w, center};
  validate(s);
  return s;
}

PriorSpec half_line_prior(double u0, double c) {
  PriorSpec s{DomainKind::PositiveHalfLine, 0.5, c, u0, 0.0};
  validate(s);
  return s;
}

PriorSpec half_line_prior() { return half_line_prior(solve_half_line_anchor()); }

PriorSpec real_line_symmetric_prior(double u0, double c) {
  PriorSpec s{DomainKind::RealLineSymmetric, 0.5, c, u0, 0.0};
  validate(s);
  return s;
}

PriorSpec real_line_symmetric_prior() { return real_line_symmetric_prior(solve_half_line_anchor()); }

PriorSpec real_line_smooth_prior(double u0) {
  PriorSpec s{DomainKind::RealLineSmooth, 0.5, 2.0 * (1.0 + u0) / std::exp(u0), u0, 0.0};
  validate(s);
  return s;
}

PriorSpec flat_prior(DomainKind kind, double center) {
  PriorSpec s{kind, center, 2.0, 0.0, kind == DomainKind::UnitInterval ? center : 0.0};
  validate(s);
  return s;
}

double solve_half_line_anchor() {
  auto f = [](double u) { return (1.0 + 2.0 * u) * std::exp(-u) - 1.0; };
  double lo = 0.5, hi = 10.0;  // f(lo) > 0 > f(hi), f decreasing in between
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double advance_radial(const PriorSpec& spec, double u_from, double r_from, double r_to) {
  const double delta = r_to - r_from;
  if (delta == 0.0) return u_from;
  {
    const auto d = u_derivatives(u_from, spec.c);
    if (d.u1 == 0.0 && d.u2 == 0.0) return u_from;  // flat fixed point
  }
  const auto n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(delta) / spec.max_step * (1 - 1e-12))));
  const double h = delta / static_cast<double>(n);
  double u = u_from;
  for (long i = 0; i < n; ++i) {
    u = step_u(u, spec.c, +1, h, spec.max_step);
    if (!(u <= spec.u_cap)) return kInf;
    if (u < spec.u_anchor) u = spec.u_anchor;  // U attains its minimum at the anchor
  }
  return u;
}

UTable solve_u(const PriorSpec& spec, double half_width, int n_points) {
  validate(spec);
  if (n_points < 2) throw InvalidParameter("n_points must be at least 2");
  if (!(half_width > 0.0)) throw InvalidParameter("half_width must be positive");

  double right = half_width, left = half_width;
  if (is_unit(spec)) {
    right = std::min(half_width, 1.0 - spec.center);
    left = std::min(half_width, spec.center);
  } else if (spec.kind == DomainKind::PositiveHalfLine) {
    left = 0.0;
  }

  UTable t;
  t.spec = spec;
  bool truncated = false;
  const Eigen::VectorXd ur = solve_branch(spec, right, n_points, truncated);
  Eigen::VectorXd ul;
  if (left > 0.0) ul = left == right ? ur : solve_branch(spec, left, n_points, truncated);
  t.truncated = truncated;
  t.step = right / n_points;
  t.step_left = left > 0.0 ? left / n_points : 0.0;

  const Eigen::Index nl = ul.size() > 0 ? ul.size() - 1 : 0;
  const Eigen::Index n = nl + ur.size();
  t.theta.resize(n);
  t.u.resize(n);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const Eigen::Index k = nl - i;  // radial index
    t.theta(i) = spec.anchor - (k == n_points ? left : k * t.step_left);
    t.u(i) = ul(k);
  }
  for (Eigen::Index k = 0; k < ur.size(); ++k) {
    t.theta(nl + k) = spec.anchor + (k == n_points ? right : k * t.step);
    t.u(nl + k) = ur(k);
  }
  t.anchor_index = nl;
  return t;
}

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n < 2) return 0.0;
  return 0.5 * ((x.tail(n - 1) - x.head(n - 1)).array() * (y.tail(n - 1) + y.head(n - 1)).array()).sum();
}

double log_trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& log_f) {
  const double m = log_f.maxCoeff();
  if (!std::isfinite(m)) return m == kInf ? kInf : -kInf;
  const Eigen::VectorXd f = (log_f.array() - m).exp().matrix();
  return m + std::log(trapezoid(x, f));
}

DensityTable normalize(const UTable& table) {
  if (table.size() < 2) throw DegenerateMass("table carries fewer than two finite points");
  DensityTable d;
  d.theta = table.theta;
  d.log_z = log_trapezoid(table.theta, -table.u);
  if (!std::isfinite(d.log_z)) throw DegenerateMass("normalizer is not finite");
  d.log_p = -(table.u.array() + d.log_z).matrix();
  d.p = d.log_p.array().exp().matrix();
  d.kink_index = has_kink(table.spec) ? table.anchor_index : -1;
  return d;
}

DensityTable unnormalized_density(const UTable& table, double shift) {
  DensityTable d;
  d.theta = table.theta;
  d.log_p = -(table.u.array() + shift).matrix();
  d.p = d.log_p.array().exp().matrix();
  d.log_z = 0.0;
  d.kink_index = has_kink(table.spec) ? table.anchor_index : -1;
  return d;
}

DensityTable density_from_log(Eigen::VectorXd theta, Eigen::VectorXd log_p) {
  if (theta.size() != log_p.size()) throw DimensionMismatch("theta and log_p lengths differ");
  DensityTable d;
  d.theta = std::move(theta);
  d.log_p = std::move(log_p);
  d.p = d.log_p.array().exp().matrix();
  return d;
}

bool tail_bound_check(const UTable& table, double p0, double eps_lower) {
  if (table.spec.kind != DomainKind::PositiveHalfLine) {
    throw InvalidSpec("tail bound applies to half-line tables");
  }
  const double log_p0 = std::log(p0);
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    const double lhs = -table.u(i);
    const double rhs = log_p0 - eps_lower * table.theta(i);
    if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) return false;
  }
  return true;
}

double half_line_slope_lower_bound(const PriorSpec& spec) {
  if (spec.c < 2.0) throw InvalidSpec("slope bound needs c >= 2");
  return std::max(0.0, spec.u_anchor);
}

bool in_domain(const PriorSpec& spec, double theta) {
  if (!std::isfinite(theta)) return false;
  switch (spec.kind) {
    case DomainKind::UnitInterval: return theta > kBoundaryGap && theta < 1.0 - kBoundaryGap;
    case DomainKind::PositiveHalfLine: return theta > 0.0;
    default: return true;
  }
}

double u_at(const PriorSpec& spec, double theta) {
  const bool closure_ok = is_unit(spec) ? (theta >= 0.0 && theta <= 1.0)
                          : spec.kind == DomainKind::PositiveHalfLine ? theta >= 0.0
                                                                      : std::isfinite(theta);
  if (!closure_ok) throw DomainExit("theta = " + std::to_string(theta) + " outside the domain");
  return advance_radial(spec, spec.u_anchor, 0.0, std::abs(theta - spec.anchor));
}

double support_radius(const PriorSpec& spec) {
  const auto d = u_derivatives(spec.u_anchor, spec.c);
  if (d.u1 == 0.0 && d.u2 <= 0.0) return kInf;  // flat
  constexpr double kMaxRadius = 1e3;
  double u = spec.u_anchor;
  for (double r = 0.0; r < kMaxRadius; r += spec.max_step) {
    u = advance_radial(spec, u, r, r + spec.max_step);
    if (!std::isfinite(u)) return r;
  }
  return kInf;
}

PriorRatio log_prior_ratio(const PriorSpec& spec, double theta_from, double theta_to, double u_from) {
  if (!in_domain(spec, theta_to)) {
    throw DomainExit("proposal " + std::to_string(theta_to) + " outside the domain");
  }
  if (!std::isfinite(u_from)) throw InvalidParameter("cached u is not finite");
  if (theta_to == theta_from) return {0.0, u_from};
  const double a = spec.anchor;
  const double r_to = std::abs(theta_to - a);
  const double r_from = std::abs(theta_from - a);
  // Integrating towards the anchor runs against the blowup and loses all
  // accuracy near the support edge, so inward moves restart from the anchor.
  const bool restart = (theta_from - a) * (theta_to - a) < 0.0 || r_to < r_from;
  const double u_to = restart ? advance_radial(spec, spec.u_anchor, 0.0, r_to)
                              : advance_radial(spec, u_from, r_from, r_to);
  if (!std::isfinite(u_to)) return {-kInf, kInf};
  return {-(u_to - u_from), u_to};
}

ProductPrior::ProductPrior(std::vector<PriorSpec> specs) : specs_(std::move(specs)) {
  if (specs_.empty()) throw InvalidParameter("product prior needs at least one coordinate");
  for (const auto& s : specs_) validate(s);
}

Eigen::VectorXd ProductPrior::u_at(const Eigen::VectorXd& theta) const {
  if (theta.size() != dimension()) throw DimensionMismatch("product prior dimension");
  Eigen::VectorXd u(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) u(j) = srprior::u_at((*this)[j], theta(j));
  return u;
}

ProductPrior::Ratio ProductPrior::log_ratio(const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                            const Eigen::VectorXd& u_from) const {
  if (from.size() != dimension() || to.size() != dimension() || u_from.size() != dimension()) {
    throw DimensionMismatch("product prior dimension");
  }
  Ratio r{0.0, Eigen::VectorXd(dimension())};
  for (Eigen::Index j = 0; j < dimension(); ++j) {
    const auto pr = log_prior_ratio((*this)[j], from(j), to(j), u_from(j));
    r.log_ratio += pr.log_ratio;
    r.u_to(j) = pr.u_to;
  }
  return r;
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& out, const UTable& t) {
  using csv::format;
  csv::write_meta(out, "kind", to_string(t.spec.kind));
  csv::write_meta(out, "center", format(t.spec.center));
  csv::write_meta(out, "c", format(t.spec.c));
  csv::write_meta(out, "u_anchor", format(t.spec.u_anchor));
  csv::write_meta(out, "anchor", format(t.spec.anchor));
  csv::write_meta(out, "u_cap", format(t.spec.u_cap));
  csv::write_meta(out, "max_step", format(t.spec.max_step));
  csv::write_meta(out, "step", format(t.step));
  csv::write_meta(out, "step_left", format(t.step_left));
  csv::write_meta(out, "anchor_index", std::to_string(t.anchor_index));
  csv::write_meta(out, "truncated", t.truncated ? "1" : "0");
  if (t.normalizer_log) csv::write_meta(out, "normalizer_log", format(*t.normalizer_log));
  out << "theta,u\n";
  for (Eigen::Index i = 0; i < t.size(); ++i) out << format(t.theta(i)) << ',' << format(t.u(i)) << '\n';
}

void write_csv(std::ostream& out, const DensityTable& d) {
  csv::write_meta(out, "logZ", csv::format(d.log_z));
  csv::write_meta(out, "kink_index", std::to_string(d.kink_index));
  out << "theta,p\n";
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    out << csv::format(d.theta(i)) << ',' << csv::format(d.p(i)) << '\n';
  }
}

namespace {
const std::string& meta_or_throw(const csv::Document& doc, const std::string& key) {
  const auto it = doc.meta.find(key);
  if (it == doc.meta.end()) throw CsvError("missing '# " + key + "=' line");
  return it->second;
}

Eigen::VectorXd column_values(const csv::Document& doc, std::string_view name) {
  const auto c = doc.column(name);
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.rows.size()));
  for (size_t i = 0; i < doc.rows.size(); ++i) v(static_cast<Eigen::Index>(i)) = csv::parse_double(doc.rows[i][c]);
  return v;
}
}  // namespace

UTable read_utable_csv(std::istream& in) {
  const auto doc = csv::read(in);
  UTable t;
  t.spec.kind = parse_domain_kind(meta_or_throw(doc, "kind"));
  t.spec.center = csv::parse_double(meta_or_throw(doc, "center"));
  t.spec.c = csv::parse_double(meta_or_throw(doc, "c"));
  t.spec.u_anchor = csv::parse_double(meta_or_throw(doc, "u_anchor"));
  t.spec.anchor = csv::parse_double(meta_or_throw(doc, "anchor"));
  t.spec.u_cap = csv::parse_double(meta_or_throw(doc, "u_cap"));
  t.spec.max_step = csv::parse_double(meta_or_throw(doc, "max_step"));
  t.step = csv::parse_double(meta_or_throw(doc, "step"));
  t.step_left = csv::parse_double(meta_or_throw(doc, "step_left"));
  t.anchor_index = csv::parse_int(meta_or_throw(doc, "anchor_index"));
  t.truncated = meta_or_throw(doc, "truncated") == "1";
  if (const auto it = doc.meta.find("normalizer_log"); it != doc.meta.end()) {
    t.normalizer_log = csv::parse_double(it->second);
  }
  t.theta = column_values(doc, "theta");
  t.u = column_values(doc, "u");
  return t;
}

DensityTable read_density_csv(std::istream& in) {
  const auto doc = csv::read(in);
  DensityTable d;
  d.log_z = csv::parse_double(meta_or_throw(doc, "logZ"));
  d.kink_index = csv::parse_int(meta_or_throw(doc, "kink_index"));
  d.theta = column_values(doc, "theta");
  d.p = column_values(doc, "p");
  d.log_p = d.p.array().log().matrix();
  return d;
}

}  // namespace srprior
