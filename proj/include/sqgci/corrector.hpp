// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Corrector operators for Lambda acting on a modulated plane wave
// g = a(x) cos(K.x) with an integer carrier K = lambda * xi:
//
//   Lambda g = lambda g + (xi.grad a) sin(K.x) + T1[a] cos(K.x) + T2[a] sin(K.x)
//
// with symbols
//   T1(k) = (|K + k| + |K - k|) / 2 - |K|
//   T2(k) = i ((|K + k| - |K - k|) / 2 - xi.k).

#ifndef SQGCI_CORRECTOR_HPP
#define SQGCI_CORRECTOR_HPP

#include "sqgci/spectral.hpp"

namespace sqgci {

struct Direction {
  double x = 1.0;
  double y = 0.0;

  Direction perp() const noexcept { return {-y, x}; }
  double dot(double k1, double k2) const noexcept { return x * k1 + y * k2; }
};

/// The two wave directions of the construction.
inline constexpr Direction kXi1{0.6, 0.8};
inline constexpr Direction kXi2{1.0, 0.0};
inline constexpr Direction kDirections[2] = {kXi1, kXi2};

/// lambda * xi as an integer wavevector; throws if it is not integral.
Wavevector carrier_vector(int lambda, Direction xi);

double t1_symbol(Wavevector carrier, int k1, int k2);
/// Imaginary part of the T2 symbol (the symbol is purely imaginary).
double t2_symbol(Wavevector carrier, int k1, int k2);

SpectralField t1(const SpectralField& a, Wavevector carrier);
SpectralField t2(const SpectralField& a, Wavevector carrier);
TorusField t1(const TorusField& a, int lambda, Direction xi);
TorusField t2(const TorusField& a, int lambda, Direction xi);

struct ModulatedWave {
  TorusField envelope;
  int carrier = 0;
  Direction direction;

  /// Band r of the envelope satisfies 10 <= r <= lambda / 2.
  bool in_hypothesis() const;
};

struct LeibnizCheck {
  TorusField direct;      // Lambda(a cos) through the Lambda multiplier
  TorusField decomposed;  // four-term expansion
  double relative_error = 0.0;
  bool in_hypothesis = true;
};

/// Computes Lambda(a cos(lambda xi.x)) both ways and throws
/// ErrorCode::consistency if they differ by more than tol (relative sup).
LeibnizCheck lambda_modulated(const ModulatedWave& wave, double tol = 1e-10);

}  // namespace sqgci

#endif  // SQGCI_CORRECTOR_HPP
