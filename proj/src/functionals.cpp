#include "fcnls/functionals.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace fcnls {

namespace detail {

// |x|^exponent node samples as a plain real array, cached: the weight is hit
// once per time step and per functional evaluation.
std::shared_ptr<const std::vector<double>> cached_weight(const Grid& g, double exponent) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool, std::uint64_t, std::uint64_t>,
                  std::shared_ptr<const std::vector<double>>>
      cache;
  const auto key = std::make_tuple(g.dim, g.M, g.offset, std::bit_cast<std::uint64_t>(g.L),
                                   std::bit_cast<std::uint64_t>(exponent));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Field w = weight_pow(g, exponent);
  auto flat = std::make_shared<std::vector<double>>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) (*flat)[i] = w[i].real();
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(flat)).first->second;
}

}  // namespace detail

namespace {

void require_offset(const Field& u) {
  if (!u.grid().offset)
    throw Error("offset_grid_required", "singular weight needs cell-centered nodes");
}

}  // namespace

double nonlocal_term(const Field& u, const ProblemParams& q) {
  validate(q);
  require_offset(u);
  const Grid& g = u.grid();
  auto w = detail::cached_weight(g, q.b);
  Field src(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    src[i] = (*w)[i] * std::pow(std::abs(u[i]), q.p);
  Field conv = riesz_convolve(src, q.alpha);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    re += conv[i].real() * src[i].real();
    im += conv[i].imag() * src[i].real();
  }
  const double cell = std::pow(g.h(), g.dim);
  re *= cell;
  im *= cell;
  if (std::abs(im) > 1e-10 * std::abs(re) + 1e-300)
    throw Error("nonlocal_not_real", "imaginary residue in the pairing");
  return std::max(re, 0.0);
}

FunctionalBundle bundle(const Field& u, const ProblemParams& q) {
  const DerivedExponents d = derive(q);
  FunctionalBundle f{};
  Field usq(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) usq[i] = std::norm(u[i]);
  f.mass = integrate(usq).real();
  const double gn = homogeneous_norm(u, q.s);
  f.grad_s_sq = gn * gn;
  f.nonlocal = nonlocal_term(u, q);
  f.energy = f.grad_s_sq + (q.eps / q.p) * f.nonlocal;
  f.action = f.mass + f.grad_s_sq - f.nonlocal / q.p;
  f.constraint = (4.0 * q.s / q.N) * (f.grad_s_sq - d.B / (2.0 * q.p) * f.nonlocal);
  f.h_value = f.mass + (d.B - 2.0) / (2.0 * q.p) * f.nonlocal;
  return f;
}

double gn_quotient(const Field& u, const ProblemParams& q) {
  const DerivedExponents d = derive(q);
  Field usq(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) usq[i] = std::norm(u[i]);
  const double mass = integrate(usq).real();
  if (mass < 1e-14) throw Error("zero_field", "vanishing mass");
  const double P = nonlocal_term(u, q);
  if (P <= 0.0) throw Error("zero_nonlocal", "vanishing interaction term");
  const double gn = homogeneous_norm(u, q.s);
  return std::pow(mass, 0.5 * d.A) * std::pow(gn * gn, 0.5 * d.B) / P;
}

Indicators indicators(const Field& u0, const GroundState& gs, const ProblemParams& q) {
  const DerivedExponents d = derive(q);
  if (!(d.s_c > 0.0 && d.s_c < q.s))
    throw Error("not_intercritical", "indicators need 0 < s_c < s");
  if (!(gs.mass_phi > 0.0) || !std::isfinite(gs.residual) || !(gs.grad_s_sq_phi > 0.0))
    throw Error("zero_ground_state", "ground state not converged");

  const FunctionalBundle f = bundle(u0, q);
  if (f.energy < 0.0)
    throw Error("negative_energy", "E(u0) < 0: use the negative-energy branch");

  // focusing-sign energy of the ground state, from its stored scalars
  const double e_phi = gs.grad_s_sq_phi - gs.nonlocal_phi / q.p;
  const double sc = d.s_c, rest = q.s - d.s_c;
  Indicators out{};
  out.me = std::pow(f.energy, sc) * std::pow(f.mass, rest) /
           (std::pow(e_phi, sc) * std::pow(gs.mass_phi, rest));
  out.g = std::pow(f.grad_s_sq, 0.5 * sc) * std::pow(f.mass, 0.5 * rest) /
          (std::pow(gs.grad_s_sq_phi, 0.5 * sc) * std::pow(gs.mass_phi, 0.5 * rest));
  return out;
}

}  // namespace fcnls
