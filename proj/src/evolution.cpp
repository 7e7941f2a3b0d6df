#include "fcnls/evolution.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "fcnls/errors.hpp"
#include "fcnls/functionals.hpp"
#include "fcnls/virial.hpp"
#include "fft.hpp"

namespace fcnls {

namespace detail {
std::shared_ptr<const std::vector<double>> cached_weight(const Grid& g, double exponent);
}

namespace {

bool all_finite(const Field& u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag())) return false;
  return true;
}

// One linear subflow with a precomputed per-mode factor table.
void apply_mode_factors(Field& u, const std::vector<cplx>& factor) {
  detail::fft_inplace(u.grid().dim, u.grid().M, u.data(), -1);
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) u[i] *= factor[i];
  detail::fft_inplace(u.grid().dim, u.grid().M, u.data(), +1);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) u[i] *= inv;
}

std::vector<cplx> phase_table(const std::vector<double>& symbol, double dt,
                              const std::vector<double>* mask) {
  std::vector<cplx> ph(symbol.size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    ph[i] = std::polar(1.0, -symbol[i] * dt);
    if (mask) ph[i] *= (*mask)[i];
  }
  return ph;
}

// 2/3-rule projector: keep modes with |k| <= M/3 along every axis.
std::vector<double> dealias_mask(const Grid& g) {
  std::vector<double> keep_axis(static_cast<std::size_t>(g.M));
  for (int j = 0; j < g.M; ++j) {
    const int k = (j < g.M / 2) ? j : j - g.M;
    keep_axis[static_cast<std::size_t>(j)] = (3 * std::abs(k) <= g.M) ? 1.0 : 0.0;
  }
  std::vector<double> mask(g.size(), 1.0);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (int d = g.dim - 1; d >= 0; --d) {
      mask[i] *= keep_axis[rest % static_cast<std::size_t>(g.M)];
      rest /= static_cast<std::size_t>(g.M);
    }
  }
  return mask;
}

// u <- e^{-i eps V dt} u with V = (I_alpha * w|u|^p) w |u|^{p-2}.
void rotate_nonlinear(Field& u, double dt, const ProblemParams& q,
                      const std::vector<double>& w) {
  const std::size_t n = u.size();
  Field src(u.grid());
  for (std::size_t i = 0; i < n; ++i) src[i] = w[i] * std::pow(std::abs(u[i]), q.p);
  const Field conv = riesz_convolve(src, q.alpha);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(u[i]);
    const double amp = (a == 0.0 && q.p < 2.0) ? 0.0 : std::pow(a, q.p - 2.0);
    const double v = conv[i].real() * w[i] * amp;
    u[i] *= std::polar(1.0, -static_cast<double>(q.eps) * v * dt);
  }
}

double default_dt0(const Grid& g, double s) {
  return 0.1 * std::pow(g.h(), 2.0 * s) / std::pow(M_PI, 2.0 * s);
}

}  // namespace

Field linear_step(const Field& u, double dt, const ProblemParams& params) {
  validate(params);
  const Multiplier m = frac_symbol(u.grid(), 2.0 * params.s);
  Field out = u;
  apply_mode_factors(out, phase_table(m.symbol, dt, nullptr));
  return out;
}

Field nonlinear_step(const Field& u, double dt, const ProblemParams& params) {
  validate(params);
  const auto w = detail::cached_weight(u.grid(), params.b);
  Field out = u;
  rotate_nonlinear(out, dt, params, *w);
  return out;
}

RunOutcome evolve(const Field& u0, const ProblemParams& params,
                  const EvolutionConfig& cfg,
                  const std::function<void(double, const Field&)>& on_record) {
  validate(params);
  validate_grid(u0.grid());
  if (!all_finite(u0))
    throw Error("nonfinite_field", "initial data contains non-finite samples");

  const Grid& g = u0.grid();
  const double dt0 = cfg.dt0 > 0.0 ? cfg.dt0 : default_dt0(g, params.s);
  if (!(cfg.t_end > 0.0))
    throw Error("bad_config", "t_end must be positive");
  if (!(cfg.dt_min > 0.0) || !(cfg.dt_min < dt0))
    throw Error("bad_config", "dt_min must satisfy 0 < dt_min < dt0");
  if (!(cfg.blowup_grad_factor > 1.0) || !(cfg.blowup_linf_factor > 1.0))
    throw Error("bad_config", "blow-up factors must exceed 1");
  if (cfg.record_every < 1)
    throw Error("bad_config", "record_every must be at least 1");

  const std::vector<double> symbol = frac_symbol(g, 2.0 * params.s).symbol;
  const auto weight = detail::cached_weight(g, params.b);
  const std::vector<double> mask = cfg.dealias ? dealias_mask(g) : std::vector<double>{};
  const std::vector<double>* mask_ptr = cfg.dealias ? &mask : nullptr;

  const bool use_virial = cfg.virial_R > 0.0;
  VirialWeight vw;
  if (use_virial) vw = build_weight(g, cfg.virial_R);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RunOutcome out;
  out.theorem_window = regime(params).lwp_window;

  Field u = u0;
  FunctionalBundle fb = bundle(u, params);
  const double grad0 = std::sqrt(fb.grad_s_sq);
  const double sup0 = sup_norm(u);
  double grad_now = grad0;
  double dt = dt0;

  const auto record = [&](double t, double dt_row) {
    out.series.push_back({t, fb.mass, fb.energy, grad_now, sup_norm(u),
                          use_virial ? localized_variance(u, vw) : nan, dt_row});
    if (on_record) on_record(t, u);
  };
  record(0.0, dt);

  double table_dt = dt;
  std::vector<cplx> half = phase_table(symbol, 0.5 * dt, nullptr);
  std::vector<cplx> half_out = phase_table(symbol, 0.5 * dt, mask_ptr);

  double t = 0.0;
  long accepted = 0;
  const double t_eps = 1e-12 * cfg.t_end;
  while (cfg.t_end - t > t_eps) {
    const double dt_try = std::min(dt, cfg.t_end - t);
    if (dt_try != table_dt) {
      table_dt = dt_try;
      half = phase_table(symbol, 0.5 * dt_try, nullptr);
      half_out = phase_table(symbol, 0.5 * dt_try, mask_ptr);
    }

    Field next = u;
    apply_mode_factors(next, half);
    rotate_nonlinear(next, dt_try, params, *weight);
    apply_mode_factors(next, half_out);

    if (!all_finite(next)) {
      if (grad_now >= cfg.blowup_grad_factor * grad0) {
        out.status = RunStatus::BlowUpDetected;
        out.t_stop = t;
        out.final = std::move(u);
        return out;
      }
      throw Error("nonfinite_field", "field became non-finite during a step");
    }

    const FunctionalBundle fb_next = bundle(next, params);
    if (std::abs(fb_next.energy - fb.energy) > 1e-6 * (1.0 + std::abs(fb.energy))) {
      dt = 0.5 * dt_try;
      if (dt < cfg.dt_min) {
        out.status = grad_now >= cfg.blowup_grad_factor * grad0
                         ? RunStatus::BlowUpDetected
                         : RunStatus::StepUnderflow;
        out.t_stop = t;
        out.final = std::move(u);
        return out;
      }
      continue;
    }

    t += dt_try;
    u = std::move(next);
    fb = fb_next;
    grad_now = std::sqrt(fb.grad_s_sq);
    ++accepted;

    const bool detect = grad_now >= cfg.blowup_grad_factor * grad0 &&
                        sup_norm(u) >= cfg.blowup_linf_factor * sup0;
    const bool last = !(cfg.t_end - t > t_eps);
    if (detect || last || accepted % cfg.record_every == 0) record(t, dt_try);
    if (detect) {
      out.status = RunStatus::BlowUpDetected;
      out.t_stop = t;
      out.final = std::move(u);
      return out;
    }
  }

  out.status = RunStatus::Completed;
  out.t_stop = t;
  out.final = std::move(u);
  return out;
}

}  // namespace fcnls
