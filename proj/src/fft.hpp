#pragma once

#include "fcnls/spectral.hpp"

namespace fcnls::detail {

// In-place complex DFT of a dim-dimensional M^dim row-major array.
// sign = -1: forward, unnormalized.  sign = +1: inverse, unnormalized
// (callers divide by M^dim).  Thread-safe: plan creation is serialized,
// execution runs concurrently on distinct arrays.
void fft_inplace(int dim, int M, cplx* data, int sign);

}  // namespace fcnls::detail
