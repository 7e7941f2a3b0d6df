#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "fcnls/errors.hpp"

namespace fcnls {

using cplx = std::complex<double>;

namespace detail {

void* aligned_malloc(std::size_t bytes);
void aligned_free(void* p) noexcept;

// Field storage goes through the FFT backend's allocator so every buffer
// lands in the same alignment class; transform plans (and therefore output
// bits) then cannot depend on heap layout from run to run.
template <class T>
struct AlignedAlloc {
  using value_type = T;
  AlignedAlloc() = default;
  template <class U>
  AlignedAlloc(const AlignedAlloc<U>&) {}
  T* allocate(std::size_t n) { return static_cast<T*>(aligned_malloc(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { aligned_free(p); }
  template <class U>
  bool operator==(const AlignedAlloc<U>&) const {
    return true;
  }
};

}  // namespace detail

using field_vector = std::vector<cplx, detail::AlignedAlloc<cplx>>;

/// Uniform periodic grid on [-L, L)^dim.  With offset = true the nodes are
/// cell centers, x_i = -L + (i + 1/2) h, so no node coordinate is ever zero
/// and the singular weight |x|^b stays finite on the lattice.
struct Grid {
  int dim = 2;        ///< 2 or 3
  int M = 64;         ///< nodes per axis, power of two, >= 16
  double L = 10.0;    ///< box half-width
  bool offset = true; ///< cell-centered nodes

  double h() const { return 2.0 * L / M; }
  std::size_t size() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(M);
    return n;
  }
  /// Node coordinate along one axis.
  double coord(int i) const { return -L + (i + (offset ? 0.5 : 0.0)) * h(); }
  /// Angular frequency xi_k = pi k / L for FFT bin j (k wraps negative).
  double freq(int j) const {
    const int k = (j < M / 2) ? j : j - M;
    return M_PI * k / L;
  }

  bool operator==(const Grid&) const = default;
};

/// Throws Error on malformed grids (dim, power-of-two M, bounds, memory cap).
void validate_grid(const Grid& g);

/// Complex samples on a Grid, row-major (last axis fastest).
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g) : grid_(g), v_(g.size()) { validate_grid(g); }
  Field(const Grid& g, const std::vector<cplx>& values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }
  field_vector& values() { return v_; }
  const field_vector& values() const { return v_; }

 private:
  Grid grid_;
  field_vector v_;
};

/// Fourier multiplier: real symbol samples on the frequency lattice of a
/// grid, indexed like FFT bins.
struct Multiplier {
  Grid grid;
  std::vector<double> symbol;
};

/// Symbol |xi|^power on the grid's frequency lattice (power = 0 gives the
/// identity; the zero mode maps to 0 for any power > 0).
Multiplier frac_symbol(const Grid& g, double power);

/// IFFT( symbol .* FFT(u) ).  Symbol length must match the grid.
Field apply(const Multiplier& m, const Field& u);

/// (-Lap)^(power/2) u, i.e. the Fourier multiplier |xi|^power.  power >= 0.
Field frac_laplacian(const Field& u, double power);

/// Riesz potential I_alpha * f (0 < alpha < dim) by the truncated-kernel
/// method: f is zero-padded to the doubled box, multiplied in Fourier space
/// by the exact transform of the kernel restricted to the ball |x| <= 2L,
/// and restricted back.  Periodic images of the truncated kernel cannot
/// reach the doubled box, so the result is the free-space convolution up to
/// spectral truncation.  Multipliers are cached per (grid, alpha).
Field riesz_convolve(const Field& f, double alpha);

/// Transform of the ball-truncated Riesz kernel at |xi| = rho >= 0; this is
/// the multiplier riesz_convolve uses on the doubled lattice.  Exposed so
/// tests can probe it against quadrature oracles.
double riesz_multiplier_value(const Grid& g, double alpha, double rho);

/// Samples |x|^exponent on the nodes.  For exponent < 0 the grid must be
/// offset, and the 2^dim cells whose closed cell touches the origin use the
/// exact cell average of |x|^exponent instead of the (nearly singular) node
/// value, which keeps midpoint quadrature of weighted integrals consistent.
Field weight_pow(const Grid& g, double exponent);

/// Midpoint quadrature h^dim * sum of samples.
cplx integrate(const Field& u);

/// L^2 norm of (-Lap)^(sigma/2) u via Parseval; sigma = 0 is the plain L^2
/// norm (zero mode carries weight 1 there, 0 for sigma > 0).
double homogeneous_norm(const Field& u, double sigma);

/// Pointwise helpers used across modules.
Field conj(const Field& u);
double sup_norm(const Field& u);
/// Largest |u(x) - u(-x)| over the lattice, divided by sup |u| (offset grids
/// map nodes exactly under x -> -x).  Used as the radial-data proxy check.
double reflection_asymmetry(const Field& u);

/// Spectral partial derivative along axis (multiplier i xi_axis).
Field partial_derivative(const Field& u, int axis);

/// Trigonometric interpolation onto the grid with 2M nodes per axis (same
/// box): zero-pads the spectrum, exact on band-limited data.
Field refine_spectral(const Field& u);

}  // namespace fcnls
