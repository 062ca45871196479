// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SQGCI_SRC_FFT_BACKEND_HPP
#define SQGCI_SRC_FFT_BACKEND_HPP

#include <complex>

namespace sqgci::detail {

// Unnormalized 2-D real-to-complex transform of an n x n row-major array into
// n x (n/2 + 1) coefficients. The input is left untouched.
void fft_forward(int n, const double* in, std::complex<double>* out);

// Unnormalized inverse; destroys `in`.
void fft_backward(int n, std::complex<double>* in, double* out);

}  // namespace sqgci::detail

#endif  // SQGCI_SRC_FFT_BACKEND_HPP
