#include "fcnls/virial.hpp"

#include <cmath>
#include <cstddef>

#include "fcnls/errors.hpp"
#include "fcnls/functionals.hpp"

namespace fcnls {

namespace {

// Transition profile on sigma = r/R in (1, 2]:
//   f(sigma)  = psi'(r) / R = sigma (2 - sigma)^2 (2 sigma - 1)
//   f'(sigma) = psi''(r)    = 8 sigma^3 - 27 sigma^2 + 24 sigma - 4
// f(1) = 1 and f'(1) = 1 match the inner quadratic to second order; both
// f and f' vanish at sigma = 2.
double profile_f(double sigma) {
  const double d = 2.0 - sigma;
  return sigma * d * d * (2.0 * sigma - 1.0);
}

double profile_fp(double sigma) {
  return ((8.0 * sigma - 27.0) * sigma + 24.0) * sigma - 4.0;
}

// psi(r) / R^2 on the transition region, from the antiderivative of f in
// t = sigma - 1: 1/2 + t + t^2/2 - t^3 - t^4/4 + (2/5) t^5.
double profile_value(double sigma) {
  const double t = sigma - 1.0;
  return 0.5 + t * (1.0 + t * (0.5 + t * (-1.0 + t * (-0.25 + 0.4 * t))));
}

}  // namespace

VirialWeight build_weight(const Grid& g, double R) {
  validate_grid(g);
  if (!(R > 0.0)) throw Error("bad_radius", "virial radius must be positive");
  if (2.0 * R > 0.9 * g.L)
    throw Error("support_overflow", "weight support 2R exceeds 0.9 L");

  VirialWeight w;
  w.R = R;
  w.psi = Field(g);
  w.lap_psi = Field(g);
  w.grad_psi.assign(static_cast<std::size_t>(g.dim), Field(g));

  const std::size_t n = g.size();
  std::vector<double> x(static_cast<std::size_t>(g.dim));
  std::vector<int> idx(static_cast<std::size_t>(g.dim), 0);
  const double plateau = 23.0 / 20.0 * R * R;
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      x[static_cast<std::size_t>(d)] = g.coord(idx[static_cast<std::size_t>(d)]);
      r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
    }
    const double r = std::sqrt(r2);
    double value, dpsi_over_r, lap;
    if (r <= R) {
      value = 0.5 * r2;
      dpsi_over_r = 1.0;
      lap = static_cast<double>(g.dim);
    } else if (r < 2.0 * R) {
      const double sigma = r / R;
      value = R * R * profile_value(sigma);
      const double f = profile_f(sigma);
      dpsi_over_r = f / sigma;
      lap = profile_fp(sigma) + (g.dim - 1) * f / sigma;
    } else {
      value = plateau;
      dpsi_over_r = 0.0;
      lap = 0.0;
    }
    w.psi[i] = value;
    w.lap_psi[i] = lap;
    for (int d = 0; d < g.dim; ++d)
      w.grad_psi[static_cast<std::size_t>(d)][i] =
          dpsi_over_r * x[static_cast<std::size_t>(d)];

    for (int d = g.dim - 1; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < g.M) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
  return w;
}

double localized_variance(const Field& u, const VirialWeight& w) {
  if (!(u.grid() == w.psi.grid()))
    throw Error("grid_mismatch", "field and virial weight live on different grids");
  const Grid& g = u.grid();
  const std::size_t n = g.size();
  cplx total = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const Field du = partial_derivative(u, d);
    const Field& gp = w.grad_psi[static_cast<std::size_t>(d)];
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(u[i]) * gp[i].real() * du[i];
    total += acc;
  }
  const double cell = std::pow(g.h(), g.dim);
  return 2.0 * cell * total.imag();
}

std::vector<VarianceRow> variance_report(const std::vector<double>& times,
                                         const std::vector<Field>& fields,
                                         const VirialWeight& w,
                                         const ProblemParams& params,
                                         const VirialOptions& opts) {
  validate(params);
  if (params.s <= 0.5)
    throw Error("s_too_small", "variance inequality needs s > 1/2");
  if (times.empty() || times.size() != fields.size())
    throw Error("bad_series", "times and fields must match and be non-empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error("bad_series", "times must be strictly increasing");
  if (reflection_asymmetry(fields[0]) >= 1e-6)
    throw Error("not_radial", "initial data is not radially symmetric");

  const DerivedExponents d = derive(params);
  const double pow_r = (params.N - 1.0 - opts.eps_hat - 2.0 * params.b) *
                       (params.p - 1.0 - params.alpha / params.N);
  const double pow_g = (1.0 + opts.eps_hat) / params.s *
                       (params.p - 1.0 - params.alpha / params.N);

  const std::size_t n = times.size();
  std::vector<VarianceRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FunctionalBundle fb = bundle(fields[i], params);
    const double grad_norm = std::sqrt(fb.grad_s_sq);
    VarianceRow& row = rows[i];
    row.t = times[i];
    row.m_psi = localized_variance(fields[i], w);
    row.bound_rhs = 2.0 * params.s * d.B * fb.energy -
                    2.0 * params.s * (d.B - 2.0) * fb.grad_s_sq +
                    opts.c1 / std::pow(w.R, 2.0 * params.s) +
                    opts.c2 / std::pow(w.R, pow_r) * std::pow(grad_norm, pow_g);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = (i + 1 == n) ? i : i + 1;
    rows[i].dm_dt =
        (lo == hi) ? 0.0
                   : (rows[hi].m_psi - rows[lo].m_psi) / (times[hi] - times[lo]);
  }
  return rows;
}

}  // namespace fcnls
