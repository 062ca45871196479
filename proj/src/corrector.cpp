// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace sqgci {

Wavevector carrier_vector(int lambda, Direction xi) {
  const double v1 = lambda * xi.x, v2 = lambda * xi.y;
  const double r1 = std::round(v1), r2 = std::round(v2);
  const double tol = 1e-9 * std::max(1.0, std::abs(double(lambda)));
  if (std::abs(v1 - r1) > tol || std::abs(v2 - r2) > tol)
    fail(ErrorCode::invalid_argument,
         "carrier lambda*xi = (" + std::to_string(v1) + ", " + std::to_string(v2) +
             ") is not an integer wavevector");
  return {int(r1), int(r2)};
}

namespace {

// Integer wavevectors have exact squared norms, so sqrt is correctly rounded.
double int_norm(double a, double b) { return std::sqrt(a * a + b * b); }

struct SymbolParts {
  double Kn, Kk, plus, minus, t1;
};

// |K + k| - |K| = (2 K.k + |k|^2) / (|K + k| + |K|) avoids the cancellation
// of the naive difference when |k| << |K|.
SymbolParts symbol_parts(Wavevector carrier, int k1, int k2) {
  const double K1 = carrier.k1, K2 = carrier.k2;
  SymbolParts p;
  p.Kn = int_norm(K1, K2);
  const double kk = double(k1) * k1 + double(k2) * k2;
  p.Kk = K1 * k1 + K2 * k2;
  p.plus = int_norm(K1 + k1, K2 + k2);
  p.minus = int_norm(K1 - k1, K2 - k2);
  p.t1 = 0.5 * ((2.0 * p.Kk + kk) / (p.plus + p.Kn) + (kk - 2.0 * p.Kk) / (p.minus + p.Kn));
  return p;
}

}  // namespace

double t1_symbol(Wavevector carrier, int k1, int k2) { return symbol_parts(carrier, k1, k2).t1; }

double t2_symbol(Wavevector carrier, int k1, int k2) {
  const SymbolParts p = symbol_parts(carrier, k1, k2);
  // (|K+k| - |K-k|)/2 - K.k/|K| = K.k (2 |K| - sum) / (sum |K|)
  const double sum = p.plus + p.minus;
  return -2.0 * p.Kk * p.t1 / (sum * p.Kn);
}

SpectralField t1(const SpectralField& a, Wavevector carrier) {
  SpectralField out = a;
  out.multiply([carrier](int k1, int k2) { return t1_symbol(carrier, k1, k2); });
  return out;
}

SpectralField t2(const SpectralField& a, Wavevector carrier) {
  SpectralField out = a;
  out.multiply([carrier](int k1, int k2) { return Complex(0.0, t2_symbol(carrier, k1, k2)); });
  return out;
}

TorusField t1(const TorusField& a, int lambda, Direction xi) {
  TorusField out = inverse(t1(transform(a), carrier_vector(lambda, xi)));
  out.set_band_limit(a.band_limit());
  return out;
}

TorusField t2(const TorusField& a, int lambda, Direction xi) {
  TorusField out = inverse(t2(transform(a), carrier_vector(lambda, xi)));
  out.set_band_limit(a.band_limit());
  return out;
}

bool ModulatedWave::in_hypothesis() const {
  const double r = band_of(envelope);
  return r >= 10.0 && r <= 0.5 * carrier;
}

LeibnizCheck lambda_modulated(const ModulatedWave& wave, double tol) {
  const TorusField& a = wave.envelope;
  const int n = a.n();
  const Wavevector K = carrier_vector(wave.carrier, wave.direction);
  const double band = band_of(a);
  if (!(band + K.norm() < n / 2.0))
    fail(ErrorCode::aliasing, "modulated wave does not fit below the grid Nyquist frequency");

  // a cos(K.x) has coefficients (c(k - K) + c(k + K)) / 2, exact on this grid
  // since band + |K| < n / 2; the Lambda multiplier acts on that spectrum.
  // Only the stored half plane k2 >= 0 is written; the conjugate partner of a
  // skipped target is written from -m.
  const SpectralField as = transform(a);
  const int R = int(std::ceil(band));
  auto at = [n](SpectralField& f, int k1, int k2) -> Complex* {
    return k2 < 0 ? nullptr : &f.raw((k1 % n + n) % n, k2);
  };
  SpectralField lg(n);
  for (int m1 = -R; m1 <= R; ++m1)
    for (int m2 = -R; m2 <= R; ++m2) {
      const Complex am = as.coeff(m1, m2);
      if (am == Complex(0.0)) continue;
      if (Complex* c = at(lg, m1 + K.k1, m2 + K.k2)) *c += 0.5 * am;
      if (Complex* c = at(lg, m1 - K.k1, m2 - K.k2)) *c += 0.5 * am;
    }
  lg.multiply([](int k1, int k2) { return std::sqrt(double(k1) * k1 + double(k2) * k2); });

  LeibnizCheck out;
  out.in_hypothesis = wave.in_hypothesis();
  out.direct = inverse(lg);

  // Four-term side: with p = (|K| + T1) a and q = (xi.grad + T2) a,
  // p cos + q sin has coefficient (p - iq)/2 at m + K and (p + iq)/2 at m - K.
  const double lam = K.norm();
  for (int m1 = -R; m1 <= R; ++m1)
    for (int m2 = -R; m2 <= R; ++m2) {
      const Complex am = as.coeff(m1, m2);
      if (am == Complex(0.0)) continue;
      const Complex p = (lam + t1_symbol(K, m1, m2)) * am;
      const Complex q =
          Complex(0.0, wave.direction.x * m1 + wave.direction.y * m2 + t2_symbol(K, m1, m2)) * am;
      const Complex iq(-q.imag(), q.real());
      if (Complex* c = at(lg, m1 + K.k1, m2 + K.k2)) *c -= 0.5 * (p - iq);
      if (Complex* c = at(lg, m1 - K.k1, m2 - K.k2)) *c -= 0.5 * (p + iq);
    }
  const TorusField diff = inverse(std::move(lg));
  out.decomposed = out.direct - diff;
  const double scale = std::max(sup_norm(out.direct), 1e-300);
  out.relative_error = sup_norm(diff) / scale;
  if (out.relative_error > tol)
    fail(ErrorCode::consistency,
         "Lambda decomposition of the modulated wave disagrees: relative error " +
             std::to_string(out.relative_error));
  return out;
}

}  // namespace sqgci
