#pragma once

// Log and Hyvarinen scores, information functionals and the variational
// checks for solved priors.

#include <iosfwd>
#include <utility>
#include <vector>

#include "srprior/prior.hpp"

namespace srprior {

struct ScoreBreakdown {
  double theta = 0.0;
  double log_score = 0.0;        // -log p
  double hyvarinen_score = 0.0;  // (log p)'' + ((log p)')^2 / 2
  double total = 0.0;
};

struct InfoReport {
  double entropy_info = 0.0;  // ∫ p log p
  double fisher_info = 0.0;   // ∫ (p')^2 / p
  double combined = 0.0;      // entropy_info + fisher_info / 2
};

/// Scores at the grid point nearest to theta using 5-point central
/// differences of log p. Throws NearBoundary when the stencil would leave
/// the grid, cross a kink, or touch a point of zero density.
ScoreBreakdown score_at(const DensityTable& density, double theta);

/// Scores at every grid point that admits a full stencil.
std::vector<ScoreBreakdown> score_profile(const DensityTable& density);

/// Max over stencil-interior points of |u'^2/2 - u'' + u|, with derivatives
/// from 5-point central differences of the table. This is the defining
/// identity written for p = exp(-(u + 1)).
double score_identity_residual(const UTable& table);

InfoReport info_functionals(const DensityTable& density);

/// Max over interior points of |(p')^2 - p^2 (c / (e p) + 2 log p)|, with
/// p = exp(-(u + 1)) and p' from central differences.
double euler_lagrange_crosscheck(const UTable& table, double c);

/// Eigenvalues (larger first) of the Hessian of the Lagrangian
/// p log p + (p')^2 / (2p) in (p, p').
std::pair<double, double> convexity_eigenvalues(double p, double p1);

void write_csv(std::ostream& out, const std::vector<ScoreBreakdown>& scores);
void write_csv(std::ostream& out, const InfoReport& report);
std::vector<ScoreBreakdown> read_scores_csv(std::istream& in);
InfoReport read_info_csv(std::istream& in);

}  // namespace srprior
