#pragma once

#include <vector>

#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"

namespace fcnls {

/// Localized variance weight psi_R with analytic derivatives.  The radial
/// profile is
///   psi(r)  = r^2 / 2                        for r <= R,
///   psi'(r) = r (2 - r/R)^2 (2 r/R - 1)      for R < r <= 2R,
///   psi(r)  = 23 R^2 / 20                    for r >= 2R,
/// which is C^2 with psi'' <= 1, psi'(r) <= r and lap psi <= dim everywhere
/// (lap psi = dim exactly inside R, grad psi = 0 beyond 2R).  A profile
/// returning to zero at 2R cannot keep psi'' <= 1: value matching needs the
/// mean of psi' on [R, 2R] to be -R/2, while psi'' <= 1 with psi'(2R) = 0
/// bounds psi' below by -(2R - r) whose mean is exactly -R/2, leaving no
/// room for psi'(R) = R.  The cap therefore levels off; only grad_psi and
/// lap_psi enter the variance quantities, so the constant is inert.
struct VirialWeight {
  double R = 0.0;
  Field psi;                    ///< real samples of psi_R
  std::vector<Field> grad_psi;  ///< dim real fields, analytic gradient
  Field lap_psi;                ///< real samples of lap psi_R
};

/// Errors: `support_overflow` when 2R > 0.9 L, `bad_radius` when R <= 0.
VirialWeight build_weight(const Grid& g, double R);

/// M_psi[u] = 2 Im integral( conj(u) grad_psi . grad u ) with spectral
/// derivatives.  Real by construction; vanishes for real-valued u.
/// Errors: `grid_mismatch`.
double localized_variance(const Field& u, const VirialWeight& w);

/// Calibration constants of the variance inequality right-hand side.  The
/// analysis fixes only the leading terms; the remainder coefficients are
/// exposed and frozen after one reference run.
struct VirialOptions {
  double c1 = 1.0;        ///< coefficient of R^{-2s}
  double c2 = 1.0;        ///< coefficient of the gradient remainder
  double eps_hat = 0.01;  ///< the small exponent shift in the remainder
};

struct VarianceRow {
  double t;
  double m_psi;
  double dm_dt;      ///< centered finite difference, one-sided at the ends
  double bound_rhs;  ///< 2sB E - 2s(B-2) grad_sq + remainder(R, grad)
};

/// Tabulates the variance inequality along a recorded trajectory, one row
/// per snapshot.  The remainder is
///   c1 / R^{2s} + c2 / R^{(N-1-eps_hat-2b)(p-1-alpha/N)}
///        * grad_norm^{((1+eps_hat)/s)(p-1-alpha/N)}.
/// pre: times strictly increasing and matching fields (else `bad_series`),
/// fields[0] radial within 1e-6 reflection asymmetry (else `not_radial`),
/// s > 1/2 (else `s_too_small`), fields on the weight's grid.
std::vector<VarianceRow> variance_report(const std::vector<double>& times,
                                         const std::vector<Field>& fields,
                                         const VirialWeight& w,
                                         const ProblemParams& params,
                                         const VirialOptions& opts = {});

}  // namespace fcnls
