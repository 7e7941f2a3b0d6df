#include "fcnls/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <tuple>
#include <utility>
#include <vector>

#include "fcnls/functionals.hpp"

namespace fcnls {

namespace detail {
std::shared_ptr<const std::vector<double>> cached_weight(const Grid& g, double exponent);
}

namespace {

// N(phi) = (I_alpha * w|phi|^p) w sign(phi) |phi|^(p-1) for real phi.
Field nonlinearity(const Field& phi, const ProblemParams& q, const std::vector<double>& w) {
  const Grid& g = phi.grid();
  Field src(g);
  for (std::size_t i = 0; i < phi.size(); ++i)
    src[i] = w[i] * std::pow(std::abs(phi[i].real()), q.p);
  Field conv = riesz_convolve(src, q.alpha);
  Field out(g);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double v = phi[i].real();
    const double mag = std::pow(std::abs(v), q.p - 1.0);
    out[i] = conv[i].real() * w[i] * (v < 0.0 ? -mag : mag);
  }
  return out;
}

// Average over the 2^dim reflections x -> +-x, which map offset nodes onto
// nodes exactly; also discards stray imaginary parts.
void symmetrize(Field& u) {
  const Grid& g = u.grid();
  const int M = g.M;
  auto refl = [&](int i) { return g.offset ? (M - 1 - i) : ((M - i) % M); };
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c) {
        const int ra = refl(a), rc = refl(c);
        if (std::make_pair(a, c) > std::make_pair(ra, rc)) continue;
        const std::size_t i1 = static_cast<std::size_t>(a) * M + c;
        const std::size_t i2 = static_cast<std::size_t>(a) * M + rc;
        const std::size_t i3 = static_cast<std::size_t>(ra) * M + c;
        const std::size_t i4 = static_cast<std::size_t>(ra) * M + rc;
        const double v = 0.25 * (u[i1].real() + u[i2].real() + u[i3].real() + u[i4].real());
        u[i1] = v;
        u[i2] = v;
        u[i3] = v;
        u[i4] = v;
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e) {
          const int ra = refl(a), rc = refl(c), re = refl(e);
          if (std::make_tuple(a, c, e) > std::make_tuple(ra, rc, re)) continue;
          const std::size_t idx[8] = {
              (static_cast<std::size_t>(a) * M + c) * M + e,
              (static_cast<std::size_t>(a) * M + c) * M + re,
              (static_cast<std::size_t>(a) * M + rc) * M + e,
              (static_cast<std::size_t>(a) * M + rc) * M + re,
              (static_cast<std::size_t>(ra) * M + c) * M + e,
              (static_cast<std::size_t>(ra) * M + c) * M + re,
              (static_cast<std::size_t>(ra) * M + rc) * M + e,
              (static_cast<std::size_t>(ra) * M + rc) * M + re,
          };
          double v = 0.0;
          for (const std::size_t i : idx) v += u[i].real();
          v *= 0.125;
          for (const std::size_t i : idx) u[i] = v;
        }
  }
}

double real_inner(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].real() * b[i].real();
  return acc * std::pow(a.grid().h(), a.grid().dim);
}

Field default_init(const Grid& g) {
  Field u(g);
  const int M = g.M;
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c) {
        const double x = g.coord(a), y = g.coord(c);
        u[idx++] = std::exp(-0.5 * (x * x + y * y));
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e) {
          const double x = g.coord(a), y = g.coord(c), z = g.coord(e);
          u[idx++] = std::exp(-0.5 * (x * x + y * y + z * z));
        }
  }
  const double m = real_inner(u, u);
  const double sc = 1.0 / std::sqrt(m);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= sc;
  return u;
}

double outer_shell_mass_fraction(const Field& u) {
  const Grid& g = u.grid();
  const double edge = 0.9 * g.L;
  double inner = 0.0, outer = 0.0;
  const int M = g.M;
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c, ++idx) {
        const double v = std::norm(u[idx]);
        if (std::max(std::abs(g.coord(a)), std::abs(g.coord(c))) >= edge)
          outer += v;
        else
          inner += v;
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e, ++idx) {
          const double v = std::norm(u[idx]);
          const double m =
              std::max({std::abs(g.coord(a)), std::abs(g.coord(c)), std::abs(g.coord(e))});
          if (m >= edge)
            outer += v;
          else
            inner += v;
        }
  }
  const double total = inner + outer;
  return total > 0.0 ? outer / total : 0.0;
}

GroundState solve_on_grid(const ProblemParams& q, const Grid& g, const Field* init,
                          const GroundStateOptions& opts) {
  auto w = detail::cached_weight(g, q.b);
  const double gamma = (2.0 * q.p - 1.0) / (2.0 * q.p - 2.0);

  Field phi = init ? *init : default_init(g);
  if (sup_norm(phi) == 0.0) throw Error("zero_init", "initial guess is identically zero");
  symmetrize(phi);

  Multiplier inv{g, {}};
  {
    Multiplier sym = frac_symbol(g, 2.0 * q.s);
    inv.symbol.resize(sym.symbol.size());
    for (std::size_t i = 0; i < sym.symbol.size(); ++i)
      inv.symbol[i] = 1.0 / (sym.symbol[i] + 1.0);
  }

  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    Field nphi = nonlinearity(phi, q, *w);

    Field lphi = frac_laplacian(phi, 2.0 * q.s);
    double res_sup = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      res_sup = std::max(res_sup,
                         std::abs(lphi[i].real() + phi[i].real() - nphi[i].real()));
      scale = std::max(scale, std::abs(nphi[i].real()));
    }
    const double res = scale > 0.0 ? res_sup / scale : res_sup;

    if (res < opts.tol) {
      GroundState gs;
      if (phi[phi.size() / 2].real() < 0.0)
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = -phi[i].real();
      gs.phi = phi;
      gs.residual = res;
      gs.iterations = k;
      gs.mass_phi = real_inner(phi, phi);
      const double gn = homogeneous_norm(phi, q.s);
      gs.grad_s_sq_phi = gn * gn;
      gs.nonlocal_phi = nonlocal_term(phi, q);
      gs.c_gn_formula = gn_constant_formula(q, gs.mass_phi);
      gs.c_gn_quotient = gn_constant_quotient(gs, q);
      return gs;
    }
    if (res >= best) {
      if (++stall >= 50) throw Error("diverged", "residual stopped decreasing");
    } else {
      best = res;
      stall = 0;
    }

    const double num = std::pow(homogeneous_norm(phi, q.s), 2.0) + real_inner(phi, phi);
    const double den = real_inner(nphi, phi);
    if (!(den > 0.0)) throw Error("diverged", "nonlinearity pairing lost positivity");
    const double mk = num / den;

    Field next = apply(inv, nphi);
    const double amp = std::pow(mk, gamma);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = amp * next[i].real();
    symmetrize(next);
    phi = std::move(next);
  }
  throw Error("iteration_cap", "no convergence within the iteration budget");
}

}  // namespace

GroundState solve_ground_state(const ProblemParams& q, const Grid& grid, const Field* init,
                               const GroundStateOptions& opts) {
  validate(q);
  validate_grid(grid);
  const DerivedExponents d = derive(q);
  if (!(q.p > d.p_tilde && q.p < d.p_upper))
    throw Error("p_out_of_window", "ground states need p_tilde < p < p_upper");

  Grid g = grid;
  for (int attempt = 0; attempt < 3; ++attempt) {
    GroundState gs = solve_on_grid(q, g, attempt == 0 ? init : nullptr, opts);
    if (outer_shell_mass_fraction(gs.phi) <= opts.shell_tol) return gs;
    g.L *= 2.0;
  }
  throw Error("box_too_small", "profile keeps reaching the box edge after doubling");
}

double gn_constant_formula(const ProblemParams& q, double mass_phi) {
  const DerivedExponents d = derive(q);
  if (!(d.A > 0.0) || !(d.B > 0.0))
    throw Error("gn_domain", "constant defined only for A > 0 and B > 0");
  if (!(mass_phi > 0.0)) throw Error("gn_domain", "ground-state mass must be positive");
  return (2.0 * q.p / d.A) * std::pow(d.A / d.B, 0.5 * d.B) * std::pow(mass_phi, -(q.p - 1.0));
}

double gn_constant_quotient(const GroundState& gs, const ProblemParams& q) {
  const DerivedExponents d = derive(q);
  if (!(gs.mass_phi > 0.0) || !(gs.grad_s_sq_phi > 0.0) || !(gs.nonlocal_phi > 0.0))
    throw Error("zero_ground_state", "ground state not converged");
  return gs.nonlocal_phi /
         (std::pow(gs.mass_phi, 0.5 * d.A) * std::pow(gs.grad_s_sq_phi, 0.5 * d.B));
}

}  // namespace fcnls
