#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcnls/evolution.hpp"
#include "fcnls/groundstate.hpp"
#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"

namespace fcnls {

enum class Label { Global, BlowUp, Undetermined };

std::string to_string(Label label);

/// Outcome of the dichotomy decision procedure for one initial datum.
/// me and g are filled only when the indicator branch was reached; reason
/// names the hypothesis that fired (or the one that failed).
struct Verdict {
  Label label = Label::Undetermined;
  std::optional<double> me;
  std::optional<double> g;
  std::string reason;
};

/// Decision procedure, applied in this order:
///   1. defocusing or mass-subcritical power: Global by conservation laws.
///   2. E(u0) < 0: BlowUp when the blow-up window hypotheses hold,
///      otherwise Undetermined.
///   3. indicator branch: ME < 1 and G < 1 -> Global; ME < 1 and G > 1 ->
///      BlowUp inside the blow-up window; anything else Undetermined,
///      including |ME - 1| or |G - 1| within 1e-9 of the untreated boundary.
/// BlowUp verdicts on data with reflection asymmetry above 1e-6 carry a
/// "theory not covering" note: the blow-up argument assumes radial data.
/// Errors: propagates indicator errors (not_intercritical,
/// zero_ground_state, grid_mismatch) and parameter validation errors.
Verdict classify(const Field& u0, const GroundState& gs, const ProblemParams& params);

/// One scale of a dichotomy sweep.  note records a per-row error when a
/// stage threw; observed stays empty in that case.
struct DichotomyRow {
  double lambda = 0.0;
  Verdict predicted;
  std::optional<RunStatus> observed;
  double max_grad_s = 0.0;  ///< max of grad_s over recorded rows
  double t_last = 0.0;      ///< detection time, or the time reached
  bool mismatch = false;
  std::string note;
};

struct DichotomyReport {
  std::vector<DichotomyRow> rows;  ///< sorted by scale
  int confirmations = 0;
  int mismatches = 0;
};

/// Evolves u0 = lambda phi for every scale, records predicted-vs-observed.
/// A definite prediction (Global or BlowUp) whose observed status disagrees
/// is flagged as a mismatch, never dropped.  Rows run on up to
/// FCNLS_THREADS workers (default: hardware concurrency); the report is
/// order-stable regardless of scheduling.
/// Errors: not_focusing when params.eps != -1; per-row errors are recorded
/// in the row and the sweep continues.
DichotomyReport dichotomy_sweep(const GroundState& gs, const ProblemParams& params,
                                const std::vector<double>& scales,
                                const EvolutionConfig& cfg);

/// Draws n_samples random fields on the ground-state grid (Gaussian
/// envelopes times low-order harmonic modulations, fixed generator seeded
/// by `seed`) and returns the largest ratio
///   P(u) / (C ||u||^A ||(-Lap)^(s/2) u||^B),
/// with C the measured sharp constant gs.c_gn_quotient.  The ratio must
/// stay <= 1 by sharpness; 0 by convention when n_samples <= 0.
double gn_sweep(const GroundState& gs, const ProblemParams& params, int n_samples,
                std::uint64_t seed);

}  // namespace fcnls
