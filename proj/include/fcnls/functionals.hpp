#pragma once

#include "fcnls/groundstate.hpp"
#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"

namespace fcnls {

/// The conserved and variational quantities of one field, evaluated with a
/// single Riesz convolution.  With P = nonlocal and w = |x|^b:
///   energy     E = grad_s_sq + (eps/p) P
///   action     S = mass + grad_s_sq - P/p          (focusing sign)
///   constraint K = (4s/N) (grad_s_sq - (B/(2p)) P)
///   h_value    H = mass + ((B-2)/(2p)) P
struct FunctionalBundle {
  double mass;
  double grad_s_sq;
  double nonlocal;
  double energy;
  double action;
  double constraint;
  double h_value;
};

/// P(u) = integral (I_alpha * w|u|^p) w|u|^p dx, always >= 0.
/// Requires admissible params and an offset grid (w is singular at 0).
double nonlocal_term(const Field& u, const ProblemParams& params);

FunctionalBundle bundle(const Field& u, const ProblemParams& params);

/// Gagliardo-Nirenberg quotient J(u) = ||u||^A ||(-Lap)^(s/2) u||^B / P(u).
/// Errors: zero_field (mass < 1e-14), zero_nonlocal (P <= 0).
double gn_quotient(const Field& u, const ProblemParams& params);

/// Scale-invariant dichotomy indicators against a converged ground state:
///   ME = E(u0)^s_c M(u0)^(s-s_c) / (E(phi)^s_c M(phi)^(s-s_c))
///   G  = ||(-Lap)^(s/2)u0||^s_c ||u0||^(s-s_c) / (same for phi)
/// Errors: negative_energy when E(u0) < 0 (the classifier handles that
/// branch directly), zero_ground_state, not_intercritical.
struct Indicators {
  double me;
  double g;
};

Indicators indicators(const Field& u0, const GroundState& gs, const ProblemParams& params);

}  // namespace fcnls
