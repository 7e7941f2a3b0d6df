#pragma once

#include <functional>
#include <vector>

#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"

namespace fcnls {

/// Controls for the split-step integrator.
struct EvolutionConfig {
  double dt0 = 0.0;    ///< initial step; 0 picks the heuristic 0.1 h^{2s} / pi^{2s}
  double t_end = 1.0;  ///< time horizon, > 0
  double dt_min = 1e-7;              ///< smallest allowed step, < dt0
  double blowup_grad_factor = 10.0;  ///< gradient growth trigger, > 1
  double blowup_linf_factor = 20.0;  ///< amplitude growth trigger, > 1
  int record_every = 1;   ///< record every k-th accepted step
  double virial_R = 0.0;  ///< > 0 adds the localized variance column
  bool dealias = false;   ///< 2/3-rule spectral filter after each step

  bool operator==(const EvolutionConfig&) const = default;
};

enum class RunStatus { Completed, BlowUpDetected, StepUnderflow };

struct TimeSeriesRow {
  double t;
  double mass;
  double energy;
  double grad_s;  ///< homogeneous H^s norm (not squared)
  double linf;
  double m_psi;  ///< NaN unless virial_R was set
  double dt;     ///< step size in force when the row was recorded
};

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  double t_stop = 0.0;  ///< detection time for non-Completed statuses, else t_end
  Field final;
  std::vector<TimeSeriesRow> series;  ///< t strictly increasing
  bool theorem_window = false;  ///< local-theory hypotheses hold for the params
};

/// Exact linear subflow over dt: multiplies mode xi by e^{-i |xi|^{2s} dt}.
/// Unitary on the grid for every dt, positive or negative.
Field linear_step(const Field& u, double dt, const ProblemParams& params);

/// Exact nonlinear subflow over dt: u <- e^{-i eps V dt} u with the real
/// potential V = (I_alpha * w|u|^p) w |u|^{p-2}, w = |x|^b.  V depends only
/// on |u|, which the rotation leaves pointwise invariant.  Offset grid.
Field nonlinear_step(const Field& u, double dt, const ProblemParams& params);

/// Strang splitting [linear dt/2; nonlinear dt; linear dt/2].  A step is
/// rejected and dt halved when it moves the energy by more than
/// 1e-6 (1 + |E|).  BlowUpDetected needs the gradient criterion
/// (grad_s >= blowup_grad_factor x initial) AND either step collapse below
/// dt_min or sup_norm >= blowup_linf_factor x initial; step collapse without
/// the gradient criterion is StepUnderflow.  on_record, when set, receives
/// the state at every recorded row.
/// Errors: `bad_config`, `nonfinite_field` (a sample became non-finite with
/// no gradient growth to blame), plus grid and parameter validation.
RunOutcome evolve(const Field& u0, const ProblemParams& params,
                  const EvolutionConfig& cfg,
                  const std::function<void(double, const Field&)>& on_record = {});

}  // namespace fcnls
