#include "srprior/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "srprior/csv.hpp"

namespace srprior {

namespace {

constexpr double kTinyDensity = 1e-300;

Eigen::Index nearest_index(const Eigen::VectorXd& x, double value) {
  const auto* begin = x.data();
  const auto* end = begin + x.size();
  const auto* it = std::lower_bound(begin, end, value);
  if (it == end) return x.size() - 1;
  if (it != begin && value - *(it - 1) < *it - value) --it;
  return it - begin;
}

// Grid spacing of the 5-point stencil around i, or 0 when the stencil is not
// available (off the grid, uneven spacing, kink inside, non-finite values).
double stencil_step(const Eigen::VectorXd& x, const Eigen::VectorXd& f, Eigen::Index i,
                    Eigen::Index kink) {
  if (i < 2 || i + 2 >= x.size()) return 0.0;
  if (kink > i - 2 && kink < i + 2) return 0.0;
  const double h = x(i + 1) - x(i);
  for (Eigen::Index k = i - 2; k < i + 2; ++k) {
    if (std::abs((x(k + 1) - x(k)) - h) > 1e-9 * h) return 0.0;
  }
  for (Eigen::Index k = i - 2; k <= i + 2; ++k) {
    if (!std::isfinite(f(k))) return 0.0;
  }
  return h;
}

struct Derivs {
  double d1;
  double d2;
};

Derivs five_point(const Eigen::VectorXd& f, Eigen::Index i, double h) {
  const double fm2 = f(i - 2), fm1 = f(i - 1), f0 = f(i), fp1 = f(i + 1), fp2 = f(i + 2);
  return {(fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
          (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)};
}

ScoreBreakdown score_from(const Eigen::VectorXd& theta, const Eigen::VectorXd& log_p,
                          Eigen::Index i, double h) {
  const auto d = five_point(log_p, i, h);
  ScoreBreakdown s;
  s.theta = theta(i);
  s.log_score = -log_p(i);
  s.hyvarinen_score = d.d2 + 0.5 * d.d1 * d.d1;
  s.total = s.log_score + s.hyvarinen_score;
  return s;
}

}  // namespace

ScoreBreakdown score_at(const DensityTable& density, double theta) {
  if (density.size() < 5) throw NearBoundary("density table has fewer than 5 points");
  const Eigen::Index i = nearest_index(density.theta, theta);
  const double h = stencil_step(density.theta, density.log_p, i, density.kink_index);
  if (h <= 0.0) {
    throw NearBoundary("no 5-point stencil around theta = " + csv::format(theta));
  }
  return score_from(density.theta, density.log_p, i, h);
}

std::vector<ScoreBreakdown> score_profile(const DensityTable& density) {
  std::vector<ScoreBreakdown> out;
  for (Eigen::Index i = 0; i < density.size(); ++i) {
    const double h = stencil_step(density.theta, density.log_p, i, density.kink_index);
    if (h > 0.0) out.push_back(score_from(density.theta, density.log_p, i, h));
  }
  return out;
}

double score_identity_residual(const UTable& table) {
  const Eigen::Index kink = has_anchor_kink(table.spec) ? table.anchor_index : -1;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    const double h = stencil_step(table.theta, table.u, i, kink);
    if (h <= 0.0) continue;
    const auto d = five_point(table.u, i, h);
    worst = std::max(worst, std::abs(0.5 * d.d1 * d.d1 - d.d2 + table.u(i)));
  }
  return worst;
}

InfoReport info_functionals(const DensityTable& density) {
  const Eigen::Index n = density.size();
  InfoReport r;
  if (n < 2) return r;
  const auto& x = density.theta;
  const auto& p = density.p;
  Eigen::VectorXd ent(n), fis(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(p(i) >= kTinyDensity)) {
      ent(i) = 0.0;
      fis(i) = 0.0;
      continue;
    }
    const Eigen::Index lo = std::max<Eigen::Index>(i - 1, 0);
    const Eigen::Index hi = std::min<Eigen::Index>(i + 1, n - 1);
    const double dp = (p(hi) - p(lo)) / (x(hi) - x(lo));
    ent(i) = p(i) * std::log(p(i));
    fis(i) = dp * dp / p(i);
  }
  r.entropy_info = trapezoid(x, ent);
  r.fisher_info = trapezoid(x, fis);
  r.combined = r.entropy_info + 0.5 * r.fisher_info;
  return r;
}

double euler_lagrange_crosscheck(const UTable& table, double c) {
  const Eigen::Index n = table.size();
  const Eigen::Index kink = has_anchor_kink(table.spec) ? table.anchor_index : -1;
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (i == kink) continue;
    const double um = table.u(i - 1), u0 = table.u(i), up = table.u(i + 1);
    if (!std::isfinite(um) || !std::isfinite(u0) || !std::isfinite(up)) continue;
    const double pm = std::exp(-(um + 1.0)), p = std::exp(-(u0 + 1.0)), pp = std::exp(-(up + 1.0));
    const double dp = (pp - pm) / (table.theta(i + 1) - table.theta(i - 1));
    // c / (e p) = c e^u and log p = -(u + 1).
    const double rhs = p * p * (c * std::exp(u0) - 2.0 * (u0 + 1.0));
    worst = std::max(worst, std::abs(dp * dp - rhs));
  }
  return worst;
}

std::pair<double, double> convexity_eigenvalues(double p, double p1) {
  if (!(p > 0.0)) throw InvalidParameter("convexity_eigenvalues needs p > 0");
  const double kappa = p1 / p;
  const double a = 0.5 * (2.0 + kappa * kappa);
  const double big = (a + std::sqrt(a * a - 1.0)) / p;
  // The determinant of the Hessian is 1 / p^2.
  return {big, 1.0 / (p * p * big)};
}

void write_csv(std::ostream& out, const std::vector<ScoreBreakdown>& scores) {
  csv::write_row(out, {"theta", "logscore", "hyvarinen", "total"});
  for (const auto& s : scores) {
    csv::write_row(out, {csv::format(s.theta), csv::format(s.log_score),
                         csv::format(s.hyvarinen_score), csv::format(s.total)});
  }
}

void write_csv(std::ostream& out, const InfoReport& r) {
  csv::write_row(out, {"entropy_info", "fisher_info", "combined"});
  csv::write_row(out, {csv::format(r.entropy_info), csv::format(r.fisher_info),
                       csv::format(r.combined)});
}

std::vector<ScoreBreakdown> read_scores_csv(std::istream& in) {
  const auto doc = csv::read(in);
  std::vector<ScoreBreakdown> out;
  for (const auto& f : doc.rows) {
    out.push_back({csv::parse_double(f[doc.column("theta")]), csv::parse_double(f[doc.column("logscore")]),
                   csv::parse_double(f[doc.column("hyvarinen")]), csv::parse_double(f[doc.column("total")])});
  }
  return out;
}

InfoReport read_info_csv(std::istream& in) {
  const auto doc = csv::read(in);
  if (doc.rows.size() != 1) throw CsvError("info CSV must hold exactly one row");
  const auto& f = doc.rows.front();
  return {csv::parse_double(f[doc.column("entropy_info")]), csv::parse_double(f[doc.column("fisher_info")]),
          csv::parse_double(f[doc.column("combined")])};
}

}  // namespace srprior
