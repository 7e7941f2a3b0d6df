#pragma once

#include "fcnls/errors.hpp"

namespace fcnls {

/// Parameters of the fractional Choquard model
///
///     i u_t - (-Lap)^s u = eps (I_alpha * |.|^b |u|^p) |x|^b |u|^(p-2) u
///
/// on R^N, where I_alpha is the Riesz potential of order alpha and the
/// inhomogeneous weight |x|^b has b < 0.  eps = +1 is defocusing, -1 focusing.
struct ProblemParams {
  int N = 2;          ///< spatial dimension, >= 2
  double s = 0.8;     ///< fractional Laplacian order, 0 < s < 1
  double b = -0.1;    ///< weight exponent, b < 0
  double alpha = 1.0; ///< Riesz potential order, 0 < alpha < N
  double p = 3.0;     ///< nonlinearity power, p > 1
  int eps = -1;       ///< +1 defocusing, -1 focusing

  bool operator==(const ProblemParams&) const = default;
};

/// Exponents derived from the model parameters.  All are plain algebra on
/// ProblemParams; see derive() for the formulas.
struct DerivedExponents {
  double s_c;        ///< scaling-critical Sobolev index
  double B;          ///< kinetic weight in the Gagliardo-Nirenberg split
  double A;          ///< mass weight, A = 2p - B
  double p_star;     ///< mass-critical power (s_c = 0 there)
  double p_upper;    ///< energy-critical power
  double p_tilde;    ///< lower power threshold 1 + (2b+alpha)/N
  double p_bar;      ///< lower power threshold 1 + (2b+alpha)/(N-2s)
  double riesz_const;      ///< normalization of the Riesz kernel
  double blowup_power_cap; ///< largest p covered by the blow-up argument
};

/// Qualitative placement of a parameter tuple.
struct RegimeFlags {
  bool admissible;        ///< structural constraints all hold
  bool intercritical;     ///< 0 < s_c < s
  bool lwp_window;        ///< local well-posedness hypotheses hold
  bool blowup_window;     ///< blow-up theorem hypotheses hold
  bool defocusing_global; ///< eps = +1 or mass-subcritical power
};

/// Throws Error if the tuple violates a structural constraint.  The error
/// code names the first violated quantity, checked in this order: N >= 2,
/// 0 < s < 1, p > 1, eps in {-1,+1}, then the six positivity requirements
/// -b, alpha, N - alpha, N + b - s, 2s + 2b + alpha, N + alpha + 2b - 2s.
void validate(const ProblemParams& params);

/// True iff validate() would not throw.
bool admissible(const ProblemParams& params);

/// Computes every derived exponent.  Requires an admissible tuple.
DerivedExponents derive(const ProblemParams& params);

/// Normalization constant of the Riesz kernel I_alpha = K |x|^(alpha-N),
///   K = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^(N/2) 2^alpha).
double riesz_normalization(int N, double alpha);

/// Classifies the tuple.  Requires an admissible tuple.
RegimeFlags regime(const ProblemParams& params);

}  // namespace fcnls
