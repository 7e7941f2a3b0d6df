#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>
#include <tuple>

namespace fcnls::detail {

void* aligned_malloc(std::size_t bytes) {
  if (bytes == 0) bytes = 1;
  void* p = fftw_malloc(bytes);
  if (!p) throw std::bad_alloc();
  return p;
}

void aligned_free(void* p) noexcept {
  if (p) fftw_free(p);
}

namespace {

// Plans are keyed by shape, direction and the alignment class of the array
// they were created on; fftw_execute_dft is only valid for arrays of the
// same alignment class.  FFTW_ESTIMATE keeps planning deterministic and
// leaves the array contents untouched during creation.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int dim, int M, int sign, cplx* data) {
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  const int align = fftw_alignment_of(reinterpret_cast<double*>(raw));
  const auto key = std::make_tuple(dim, M, sign, align);
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  int n[3] = {M, M, M};
  fftw_plan plan = fftw_plan_dft(dim, n, raw, raw, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
  if (!plan) throw Error("fft_plan_failed", "could not create transform plan");
  plan_cache.emplace(key, plan);
  return plan;
}

}  // namespace

void fft_inplace(int dim, int M, cplx* data, int sign) {
  fftw_plan plan = plan_for(dim, M, sign, data);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, raw, raw);
}

}  // namespace fcnls::detail
