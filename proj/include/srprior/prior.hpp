#pragma once

// Scoring-rule priors p(theta) ∝ exp(-u(theta)), where u solves
//
//     u'(theta) = ±sqrt(c e^u - 2 (1 + u)),   u'' = c e^u / 2 - 1,
//
// so that -log p + Hyvarinen(p) is constant in theta. Every supported
// domain is handled through the radial profile U(r), r = |theta - anchor|,
// which is increasing in r and pinned at U(0) = u_anchor.

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srprior/errors.hpp"

namespace srprior {

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kRadicandTol = 1e-12;
inline constexpr double kMaxStep = 1e-3;
inline constexpr double kUCap = 700.0;
inline constexpr double kBoundaryGap = 1e-12;
inline constexpr int kDefaultPointsPerSide = 1000;

// Often quoted for the half-line anchor, but it does not satisfy
// (1+2u)e^{-u} = 1. The solver default is the actual root.
inline constexpr double kQuotedHalfLineAnchor = 1.31;

enum class DomainKind { UnitInterval, PositiveHalfLine, RealLineSymmetric, RealLineSmooth };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

struct PriorSpec {
  DomainKind kind = DomainKind::RealLineSmooth;
  double center = 0.5;  // UnitInterval only
  double c = 2.0;
  double u_anchor = 0.0;
  double anchor = 0.0;  // center for UnitInterval, 0 otherwise
  double u_cap = kUCap;
  double max_step = kMaxStep;
};

// Throws InvalidSpec when the constants do not describe a prior in the class.
void validate(const PriorSpec& spec);

PriorSpec unit_interval_prior(double center, double w);
PriorSpec half_line_prior(double u0, double c = 2.0);
PriorSpec half_line_prior();
PriorSpec real_line_symmetric_prior(double u0, double c = 2.0);
PriorSpec real_line_symmetric_prior();
PriorSpec real_line_smooth_prior(double u0);
PriorSpec flat_prior(DomainKind kind, double center = 0.5);

/// Root u* > 1/2 of (1 + 2u) e^{-u} = 1, by bisection on [0.5, 10].
double solve_half_line_anchor();

// ---------------------------------------------------------------------------
// Taylor kernels

template <typename S>
struct UDerivatives {
  S u1;  // |u'|
  S u2;
  S u3;  // u''' with the sign of u' taken as +1
};

template <typename S>
UDerivatives<S> u_derivatives(S u, S c) {
  using std::exp;
  using std::sqrt;
  const S ceu = c * exp(u);
  S radicand = ceu - S(2) * (S(1) + u);
  if (radicand < S(0)) {
    if (radicand < -S(kRadicandTol)) {
      throw RadicandNegative("c*e^u - 2(1+u) = " + std::to_string(static_cast<double>(radicand)) +
                             " at u = " + std::to_string(static_cast<double>(u)));
    }
    radicand = S(0);
  }
  const S u1 = sqrt(radicand);
  return {u1, S(0.5) * ceu - S(1), S(0.5) * ceu * u1};
}

/// One third-order Taylor step of length eps (signed) on the branch whose
/// slope has sign slope_sign.
template <typename S>
S step_u(S u, S c, int slope_sign, S eps, S max_step = S(kMaxStep)) {
  using std::abs;
  if (abs(eps) > max_step * (S(1) + S(1e-12))) {
    throw InvalidParameter("Taylor step " + std::to_string(static_cast<double>(eps)) +
                           " exceeds max_step");
  }
  const auto d = u_derivatives(u, c);
  const S s = slope_sign >= 0 ? S(1) : S(-1);
  return u + eps * s * d.u1 + S(0.5) * eps * eps * d.u2 + eps * eps * eps / S(6) * s * d.u3;
}

/// Integrates the increasing radial profile from (r_from, u_from) to r_to in
/// uniform sub-steps of at most spec.max_step. Returns +inf once u passes
/// spec.u_cap.
double advance_radial(const PriorSpec& spec, double u_from, double r_from, double r_to);

// ---------------------------------------------------------------------------
// Tables

struct UTable {
  PriorSpec spec;
  Eigen::VectorXd theta;
  Eigen::VectorXd u;
  double step = 0.0;       // spacing right of the anchor
  double step_left = 0.0;  // spacing left of the anchor, 0 without a left branch
  Eigen::Index anchor_index = 0;
  bool truncated = false;  // some branch stopped at u_cap
  std::optional<double> normalizer_log;

  Eigen::Index size() const { return theta.size(); }
  double u_cap() const { return spec.u_cap; }
};

struct DensityTable {
  Eigen::VectorXd theta;
  Eigen::VectorXd p;
  Eigen::VectorXd log_p;
  double log_z = 0.0;
  // Index of a point where the derivative of log p jumps; -1 when smooth.
  Eigen::Index kink_index = -1;

  Eigen::Index size() const { return theta.size(); }
};

/// Tabulates u on n_points grid cells per branch. For the unit interval each
/// branch covers min(half_width, distance to the endpoint).
UTable solve_u(const PriorSpec& spec, double half_width, int n_points = kDefaultPointsPerSide);

/// True when u' changes sign with nonzero magnitude at the anchor.
bool has_anchor_kink(const PriorSpec& spec);

DensityTable normalize(const UTable& table);

/// p = exp(-(u + shift)) without normalization; shift = 1 gives the density
/// whose combined score equals exactly 1.
DensityTable unnormalized_density(const UTable& table, double shift = 1.0);

DensityTable density_from_log(Eigen::VectorXd theta, Eigen::VectorXd log_p);

/// Composite trapezoid on an arbitrary increasing grid.
double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// log ∫ exp(log_f) by the trapezoid rule, shifted by max(log_f).
double log_trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& log_f);

/// Checks exp(-u(theta)) <= p0 exp(-eps_lower theta) on a half-line table.
bool tail_bound_check(const UTable& table, double p0, double eps_lower);

/// Lower bound on u' over a half-line solution: c e^u - 2(1+u) >= u^2 >= u0^2.
double half_line_slope_lower_bound(const PriorSpec& spec);

// ---------------------------------------------------------------------------
// Pointwise evaluation for samplers

bool in_domain(const PriorSpec& spec, double theta);

/// u(theta) integrated from the anchor; +inf beyond the support.
double u_at(const PriorSpec& spec, double theta);

/// Distance from the anchor at which u reaches u_cap (+inf when it never does
/// within 1e3).
double support_radius(const PriorSpec& spec);

struct PriorRatio {
  double log_ratio;  // log p(theta_to) - log p(theta_from)
  double u_to;
};

/// Steps u outward from theta_from to theta_to. Inward moves and anchor
/// crossings restart from the pinned value u_anchor. Throws DomainExit when theta_to is outside the
/// domain; log_ratio is -inf when theta_to lies beyond the support.
PriorRatio log_prior_ratio(const PriorSpec& spec, double theta_from, double theta_to,
                           double u_from);

class ProductPrior {
 public:
  explicit ProductPrior(std::vector<PriorSpec> specs);

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(specs_.size()); }
  const PriorSpec& operator[](Eigen::Index j) const { return specs_[static_cast<size_t>(j)]; }

  Eigen::VectorXd u_at(const Eigen::VectorXd& theta) const;

  struct Ratio {
    double log_ratio;
    Eigen::VectorXd u_to;
  };
  Ratio log_ratio(const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                  const Eigen::VectorXd& u_from) const;

 private:
  std::vector<PriorSpec> specs_;
};

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const UTable& table);
void write_csv(std::ostream& out, const DensityTable& density);
UTable read_utable_csv(std::istream& in);
DensityTable read_density_csv(std::istream& in);

}  // namespace srprior
