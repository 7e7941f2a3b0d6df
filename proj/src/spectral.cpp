#include "fcnls/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include "fcnls/model.hpp"
#include "fft.hpp"

namespace fcnls {

namespace {

bool power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes, generated once by Newton iteration on P_n.

struct GaussRule {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        double q0 = 1.0, q1 = x;
        for (int k = 2; k <= n; ++k) {
          double q2 = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        dp = n * (x * q1 - q0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
    }
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
double gauss_integrate(const F& f, double a, double b, int n) {
  const GaussRule& r = gauss_rule(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
  return acc * half;
}

// ---------------------------------------------------------------------------
// Cumulative oscillatory integrals F(X) = int_0^X t^beta g(t) dt with
// g = sin (used for dim 3) or g = J_0 (dim 2).  A cumulative table with
// step `delta` plus a short Gauss tail makes single evaluations O(1); the
// first interval uses the power series of the antiderivative to handle the
// t^beta endpoint.

class OscCumulative {
 public:
  OscCumulative(double beta, bool bessel) : beta_(beta), bessel_(bessel) {}

  double eval(double X) {
    if (X <= 0.0) return 0.0;
    if (X <= base_) return series(X);
    std::lock_guard<std::mutex> lock(mu_);
    const auto j = static_cast<std::size_t>((X - base_) / delta_);
    if (cum_.empty()) cum_.push_back(series(base_));
    while (cum_.size() <= j) {
      const auto k = cum_.size();
      cum_.push_back(cum_.back() + segment(base_ + (k - 1) * delta_, base_ + k * delta_));
    }
    return cum_[j] + segment(base_ + j * delta_, X);
  }

 private:
  double integrand(double t) const {
    const double g = bessel_ ? std::cyl_bessel_j(0.0, t) : std::sin(t);
    return std::pow(t, beta_) * g;
  }

  double segment(double a, double b) const {
    if (b <= a) return 0.0;
    return gauss_integrate([this](double t) { return integrand(t); }, a, b, 16);
  }

  // The antiderivative has a convergent power series; using it on [0, base_]
  // keeps the t^beta endpoint away from the quadrature.
  // sin:  sum (-1)^n X^(beta+2n+2) / ((2n+1)! (beta+2n+2))
  // J_0:  sum (-1)^m X^(beta+2m+1) / (4^m (m!)^2 (beta+2m+1))
  double series(double X) const {
    double acc = 0.0;
    if (bessel_) {
      double c = 1.0;  // (-1)^m / (4^m (m!)^2)
      for (int m = 0; m < 60; ++m) {
        const double e = beta_ + 2.0 * m + 1.0;
        const double term = c * std::pow(X, e) / e;
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc) + 1e-300) break;
        c *= -1.0 / (4.0 * (m + 1.0) * (m + 1.0));
      }
    } else {
      double c = 1.0;  // (-1)^n / (2n+1)!
      for (int n = 0; n < 60; ++n) {
        const double e = beta_ + 2.0 * n + 2.0;
        const double term = c * std::pow(X, e) / e;
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc) + 1e-300) break;
        c *= -1.0 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
      }
    }
    return acc;
  }

  double beta_;
  bool bessel_;
  double base_ = 2.0;
  double delta_ = 0.5;
  std::vector<double> cum_;
  std::mutex mu_;
};

std::shared_ptr<OscCumulative> osc_integral(double beta, bool bessel) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, bool>, std::shared_ptr<OscCumulative>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{bits(beta), bessel}];
  if (!slot) slot = std::make_shared<OscCumulative>(beta, bessel);
  return slot;
}

// ---------------------------------------------------------------------------
// Shared multiplier caches.

using SymbolPtr = std::shared_ptr<const std::vector<double>>;

std::uint64_t grid_key_part(const Grid& g) {
  return (static_cast<std::uint64_t>(g.dim) << 32) ^ static_cast<std::uint64_t>(g.M);
}

SymbolPtr cached_frac_symbol(const Grid& g, double power);
SymbolPtr cached_riesz_symbol(const Grid& g, double alpha);

void fwd(const Grid& g, cplx* d) { detail::fft_inplace(g.dim, g.M, d, -1); }
void inv_scaled(const Grid& g, cplx* d) {
  detail::fft_inplace(g.dim, g.M, d, +1);
  const double sc = 1.0 / static_cast<double>(g.size());
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) d[i] *= sc;
}

// Applies fn(flat_index, |xi|^2) over the frequency lattice.
template <class Fn>
void for_each_freq_sq(const Grid& g, Fn&& fn) {
  const int M = g.M;
  std::vector<double> xi2(M);
  for (int j = 0; j < M; ++j) {
    const double x = g.freq(j);
    xi2[j] = x * x;
  }
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c) fn(idx++, xi2[a] + xi2[c]);
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e) fn(idx++, xi2[a] + xi2[c] + xi2[e]);
  }
}

}  // namespace

void validate_grid(const Grid& g) {
  if (g.dim != 2 && g.dim != 3) throw Error("grid_dim_invalid", "dim must be 2 or 3");
  if (!power_of_two(g.M) || g.M < 16) throw Error("grid_M_invalid", "M must be a power of two >= 16");
  if (!(g.L > 0.0) || !std::isfinite(g.L)) throw Error("grid_L_invalid", "L must be positive and finite");
  const int cap = g.dim == 3 ? 128 : 2048;
  if (g.M > cap) throw Error("grid_too_large", "M exceeds the memory cap for this dimension");
}

Field::Field(const Grid& g, const std::vector<cplx>& values) : grid_(g) {
  validate_grid(g);
  if (values.size() != g.size()) throw Error("field_size_mismatch", "sample count does not match grid");
  v_.assign(values.begin(), values.end());
}

Multiplier frac_symbol(const Grid& g, double power) {
  validate_grid(g);
  if (!(power >= 0.0)) throw Error("order_negative", "multiplier power must be >= 0");
  Multiplier m{g, {}};
  m.symbol.resize(g.size());
  const double half = 0.5 * power;
  for_each_freq_sq(g, [&](std::size_t i, double r2) {
    m.symbol[i] = (power == 0.0) ? 1.0 : (r2 == 0.0 ? 0.0 : std::pow(r2, half));
  });
  return m;
}

namespace {

SymbolPtr cached_frac_symbol(const Grid& g, double power) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, SymbolPtr> cache;
  const auto key = std::make_tuple(grid_key_part(g), bits(g.L), bits(power));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sym = std::make_shared<std::vector<double>>(std::move(frac_symbol(g, power).symbol));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(sym)).first->second;
}

}  // namespace

Field apply(const Multiplier& m, const Field& u) {
  if (!(m.grid == u.grid())) throw Error("multiplier_grid_mismatch", "symbol grid differs from field grid");
  if (m.symbol.size() != u.size()) throw Error("multiplier_size_mismatch", "symbol length differs from field");
  Field v = u;
  fwd(v.grid(), v.data());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= m.symbol[i];
  inv_scaled(v.grid(), v.data());
  return v;
}

Field frac_laplacian(const Field& u, double power) {
  if (!(power >= 0.0)) throw Error("order_negative", "fractional power must be >= 0");
  SymbolPtr sym = cached_frac_symbol(u.grid(), power);
  Field v = u;
  fwd(v.grid(), v.data());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= (*sym)[i];
  inv_scaled(v.grid(), v.data());
  return v;
}

double riesz_multiplier_value(const Grid& g, double alpha, double rho) {
  validate_grid(g);
  if (!(alpha > 0.0 && alpha < g.dim)) throw Error("alpha_out_of_range", "need 0 < alpha < dim");
  const double T = 2.0 * g.L;
  const double K = riesz_normalization(g.dim, alpha);
  if (rho == 0.0) {
    const double omega = (g.dim == 2) ? 2.0 * M_PI : 4.0 * M_PI;
    return K * omega * std::pow(T, alpha) / alpha;
  }
  if (g.dim == 3) {
    auto F = osc_integral(alpha - 2.0, false);
    return 4.0 * M_PI * K * std::pow(rho, -alpha) * F->eval(rho * T);
  }
  auto F = osc_integral(alpha - 1.0, true);
  return 2.0 * M_PI * K * std::pow(rho, -alpha) * F->eval(rho * T);
}

namespace {

// Multiplier on the doubled lattice (2M bins per axis, box half-width 2L).
SymbolPtr cached_riesz_symbol(const Grid& g, double alpha) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, SymbolPtr> cache;
  const auto key = std::make_tuple(grid_key_part(g), bits(g.L), bits(alpha));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const int Mb = 2 * g.M;
  const double L2 = 2.0 * g.L;
  std::size_t n = 1;
  for (int d = 0; d < g.dim; ++d) n *= static_cast<std::size_t>(Mb);
  auto sym = std::make_shared<std::vector<double>>(n);
  std::unordered_map<std::int64_t, double> by_k2;
  by_k2.reserve(16384);
  auto value_for = [&](std::int64_t k2) {
    auto it = by_k2.find(k2);
    if (it != by_k2.end()) return it->second;
    const double rho = M_PI * std::sqrt(static_cast<double>(k2)) / L2;
    const double v = riesz_multiplier_value(g, alpha, rho);
    by_k2.emplace(k2, v);
    return v;
  };
  std::vector<std::int64_t> ksq(Mb);
  for (int j = 0; j < Mb; ++j) {
    const std::int64_t k = (j < Mb / 2) ? j : j - Mb;
    ksq[j] = k * k;
  }
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < Mb; ++a)
      for (int c = 0; c < Mb; ++c) (*sym)[idx++] = value_for(ksq[a] + ksq[c]);
  } else {
    for (int a = 0; a < Mb; ++a)
      for (int c = 0; c < Mb; ++c)
        for (int e = 0; e < Mb; ++e) (*sym)[idx++] = value_for(ksq[a] + ksq[c] + ksq[e]);
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(sym)).first->second;
}

}  // namespace

Field riesz_convolve(const Field& f, double alpha) {
  const Grid& g = f.grid();
  if (!(alpha > 0.0 && alpha < g.dim)) throw Error("alpha_out_of_range", "need 0 < alpha < dim");
  SymbolPtr sym = cached_riesz_symbol(g, alpha);
  const int M = g.M, Mb = 2 * g.M, off = g.M / 2;
  std::size_t nb = 1;
  for (int d = 0; d < g.dim; ++d) nb *= static_cast<std::size_t>(Mb);
  field_vector big(nb, cplx(0.0, 0.0));
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      std::copy_n(f.data() + static_cast<std::size_t>(a) * M, M,
                  big.data() + (static_cast<std::size_t>(a + off) * Mb + off));
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        std::copy_n(f.data() + (static_cast<std::size_t>(a) * M + c) * M, M,
                    big.data() + ((static_cast<std::size_t>(a + off) * Mb + (c + off)) * Mb + off));
  }
  detail::fft_inplace(g.dim, Mb, big.data(), -1);
  const double sc = 1.0 / static_cast<double>(nb);
  for (std::size_t i = 0; i < nb; ++i) big[i] *= (*sym)[i] * sc;
  detail::fft_inplace(g.dim, Mb, big.data(), +1);
  Field out(g);
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      std::copy_n(big.data() + (static_cast<std::size_t>(a + off) * Mb + off), M,
                  out.data() + static_cast<std::size_t>(a) * M);
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        std::copy_n(big.data() + ((static_cast<std::size_t>(a + off) * Mb + (c + off)) * Mb + off), M,
                    out.data() + (static_cast<std::size_t>(a) * M + c) * M);
  }
  return out;
}

namespace {

// Exact average of |x|^e over the unit-corner cube [0,1]^dim, by dyadic
// self-similarity: the integral over [0,1]^dim equals the integral over the
// L-shaped shell [0,1]^dim \ [0,1/2]^dim times 1/(1 - 2^-(dim+e)).
double corner_cube_average(int dim, double e) {
  static std::mutex mu;
  static std::map<std::pair<int, std::uint64_t>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({dim, bits(e)});
    if (it != cache.end()) return it->second;
  }
  const int n = 32;
  const GaussRule& r = gauss_rule(n);
  const double jac = std::pow(0.25, dim);  // (b-a)/2 = 1/4 per axis
  double shell = 0.0;
  for (int mask = 1; mask < (1 << dim); ++mask) {
    double lo[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) lo[d] = (mask >> d & 1) ? 0.5 : 0.0;
    auto node = [&](int d, int i) { return lo[d] + 0.25 + 0.25 * r.x[i]; };
    double acc = 0.0;
    if (dim == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x = node(0, i), y = node(1, j);
          acc += r.w[i] * r.w[j] * std::pow(x * x + y * y, 0.5 * e);
        }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double x = node(0, i), y = node(1, j), z = node(2, k);
            acc += r.w[i] * r.w[j] * r.w[k] * std::pow(x * x + y * y + z * z, 0.5 * e);
          }
    }
    shell += acc * jac;
  }
  const double integral = shell / (1.0 - std::pow(2.0, -(dim + e)));
  std::lock_guard<std::mutex> lock(mu);
  cache.insert_or_assign({dim, bits(e)}, integral);
  return integral;
}

}  // namespace

Field weight_pow(const Grid& g, double exponent) {
  validate_grid(g);
  if (exponent < 0.0 && !g.offset)
    throw Error("weight_requires_offset_grid", "negative exponents need a cell-centered grid");
  if (!(exponent + g.dim > 0.0))
    throw Error("weight_not_integrable", "exponent + dim must be positive");
  const int M = g.M;
  Field w(g);
  std::vector<double> c(M);
  for (int i = 0; i < M; ++i) c[i] = g.coord(i);
  const double h = g.h();
  // Average of |x|^e over one of the 2^dim cells sharing the origin corner.
  const double corner_avg =
      (exponent < 0.0) ? std::pow(h, exponent) * corner_cube_average(g.dim, exponent) : 0.0;
  auto is_corner = [&](double coord) { return std::abs(std::abs(coord) - 0.5 * h) < 1e-12 * h; };
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int cc = 0; cc < M; ++cc) {
        const double r2 = c[a] * c[a] + c[cc] * c[cc];
        if (exponent < 0.0 && is_corner(c[a]) && is_corner(c[cc]))
          w[idx++] = corner_avg;
        else
          w[idx++] = std::pow(r2, 0.5 * exponent);
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int cc = 0; cc < M; ++cc)
        for (int e = 0; e < M; ++e) {
          const double r2 = c[a] * c[a] + c[cc] * c[cc] + c[e] * c[e];
          if (exponent < 0.0 && is_corner(c[a]) && is_corner(c[cc]) && is_corner(c[e]))
            w[idx++] = corner_avg;
          else
            w[idx++] = std::pow(r2, 0.5 * exponent);
        }
  }
  return w;
}

cplx integrate(const Field& u) {
  double re = 0.0, im = 0.0;
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    re += u[i].real();
    im += u[i].imag();
  }
  const double cell = std::pow(u.grid().h(), u.grid().dim);
  return {re * cell, im * cell};
}

double homogeneous_norm(const Field& u, double sigma) {
  if (!(sigma >= 0.0)) throw Error("sigma_negative", "homogeneous order must be >= 0");
  Field v = u;
  fwd(v.grid(), v.data());
  double acc = 0.0;
  for_each_freq_sq(v.grid(), [&](std::size_t i, double r2) {
    const double wgt = (sigma == 0.0) ? 1.0 : (r2 == 0.0 ? 0.0 : std::pow(r2, sigma));
    acc += wgt * std::norm(v[i]);
  });
  const Grid& g = u.grid();
  const double scale = std::pow(g.h(), g.dim) / static_cast<double>(g.size());
  return std::sqrt(acc * scale);
}

Field conj(const Field& u) {
  Field v = u;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(v[i]);
  return v;
}

double sup_norm(const Field& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double reflection_asymmetry(const Field& u) {
  const Grid& g = u.grid();
  const int M = g.M;
  auto refl = [&](int i) { return g.offset ? (M - 1 - i) : ((M - i) % M); };
  double worst = 0.0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c) {
        const cplx d = u[static_cast<std::size_t>(a) * M + c] -
                       u[static_cast<std::size_t>(refl(a)) * M + refl(c)];
        worst = std::max(worst, std::abs(d));
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e) {
          const cplx d = u[(static_cast<std::size_t>(a) * M + c) * M + e] -
                         u[(static_cast<std::size_t>(refl(a)) * M + refl(c)) * M + refl(e)];
          worst = std::max(worst, std::abs(d));
        }
  }
  const double ref = sup_norm(u);
  return ref > 0.0 ? worst / ref : 0.0;
}

Field partial_derivative(const Field& u, int axis) {
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim) throw Error("axis_out_of_range", "derivative axis outside grid dimension");
  Field v = u;
  fwd(g, v.data());
  const int M = g.M;
  std::vector<double> xi(M);
  for (int j = 0; j < M; ++j) xi[j] = g.freq(j);
  std::size_t idx = 0;
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c) {
        const double x = (axis == 0) ? xi[a] : xi[c];
        v[idx] *= cplx(0.0, x);
        ++idx;
      }
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e) {
          const double x = (axis == 0) ? xi[a] : (axis == 1 ? xi[c] : xi[e]);
          v[idx] *= cplx(0.0, x);
          ++idx;
        }
  }
  inv_scaled(g, v.data());
  return v;
}

Field refine_spectral(const Field& u) {
  const Grid& g = u.grid();
  Grid fine = g;
  fine.M = 2 * g.M;
  validate_grid(fine);
  Field v = u;
  fwd(g, v.data());
  Field out(fine);
  const int M = g.M, Mb = fine.M;
  // Offset grids shift nodes by h/2; halving h moves them by -h/4, which is
  // a per-axis modulation of the coefficients.
  const double shift = g.offset ? -0.25 * g.h() : 0.0;
  std::vector<cplx> phase(M);
  std::vector<int> dest(M);
  for (int j = 0; j < M; ++j) {
    const int k = (j < M / 2) ? j : j - M;
    dest[j] = (k >= 0) ? k : k + Mb;
    const double xi = M_PI * k / g.L;
    phase[j] = std::polar(1.0, xi * shift);
  }
  const double amp = std::pow(2.0, g.dim);
  if (g.dim == 2) {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        out[static_cast<std::size_t>(dest[a]) * Mb + dest[c]] =
            amp * phase[a] * phase[c] * v[static_cast<std::size_t>(a) * M + c];
  } else {
    for (int a = 0; a < M; ++a)
      for (int c = 0; c < M; ++c)
        for (int e = 0; e < M; ++e)
          out[(static_cast<std::size_t>(dest[a]) * Mb + dest[c]) * Mb + dest[e]] =
              amp * phase[a] * phase[c] * phase[e] * v[(static_cast<std::size_t>(a) * M + c) * M + e];
  }
  inv_scaled(fine, out.data());
  return out;
}

}  // namespace fcnls
