// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <utility>
#include <mutex>

namespace sqgci::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

struct Plans {
  PlanPair aligned;    // SIMD paths; needs buffers aligned like fftw_malloc
  PlanPair unaligned;  // any buffer
};

// FFTW_ESTIMATE keeps plan selection independent of timing, so repeated runs
// execute the same algorithm and produce bit-identical output. Field storage
// is always aligned, so a given computation always takes the same plan.
const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  double* r = fftw_alloc_real(std::size_t(n) * n);
  fftw_complex* c = fftw_alloc_complex(std::size_t(n) * (n / 2 + 1));
  Plans p;
  for (auto [pair, flags] : {std::pair{&p.aligned, unsigned(FFTW_ESTIMATE)},
                             std::pair{&p.unaligned, unsigned(FFTW_ESTIMATE | FFTW_UNALIGNED)}}) {
    pair->forward = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
    pair->backward = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
  }
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(n, p).first->second;
}

bool aligned(const void* a, const void* b) {
  return fftw_alignment_of(static_cast<double*>(const_cast<void*>(a))) == 0 &&
         fftw_alignment_of(static_cast<double*>(const_cast<void*>(b))) == 0;
}

}  // namespace

void fft_forward(int n, const double* in, std::complex<double>* out) {
  const Plans& p = plans_for(n);
  fftw_execute_dft_r2c(aligned(in, out) ? p.aligned.forward : p.unaligned.forward,
                       const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void fft_backward(int n, std::complex<double>* in, double* out) {
  const Plans& p = plans_for(n);
  fftw_execute_dft_c2r(aligned(in, out) ? p.aligned.backward : p.unaligned.backward,
                       reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace sqgci::detail
