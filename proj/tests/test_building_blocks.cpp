// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sqgci/building_blocks.hpp"

using namespace sqgci;

namespace {

TorusField random_poly(int n, double r, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectralField s(n);
  const int R = int(std::floor(r));
  for (int k1 = -R; k1 <= R; ++k1)
    for (int k2 = 0; k2 <= R; ++k2)
      if (k1 * k1 + k2 * k2 <= r * r && (k2 > 0 || k1 > 0)) s.set_coeff(k1, k2, {g(rng), g(rng)});
  TorusField f = inverse(s);
  f.set_band_limit(r);
  return f;
}

// Mean-zero stress scaled to ||G||_X = ratio * delta.
TorusField scaled_stress(int n, double r, unsigned seed, double target) {
  TorusField g = random_poly(n, r, seed);
  return g * (target / x_norm(g));
}

double vec_sup(const VectorField& v) { return std::max(sup_norm(v.x), sup_norm(v.y)); }

}  // namespace

TEST_CASE("amplitudes from a vanishing stress are constant") {
  const AmplitudePair a = make_amplitudes(TorusField(64), 0.3017, 20, 2.0, Parity::A);
  const double want = std::sqrt(2.0 * 0.3017 * 2.0 / 100.0);
  CHECK(want == doctest::Approx(0.1099).epsilon(1e-3));
  for (int j = 0; j < 2; ++j)
    for (double v : a[j].values()) CHECK(v == doctest::Approx(want).epsilon(1e-15));
  CHECK(a.min_radicand == doctest::Approx(2.0));
}

TEST_CASE("radicand bounds and positivity") {
  const int n = 64;
  const double delta = 0.4;
  const TorusField g = scaled_stress(n, 6.0, 3, delta);
  for (Parity p : {Parity::A, Parity::B}) {
    const AmplitudePair a = make_amplitudes(g, delta, 20, 2.0, p);
    // radicand >= c0 - ||R_j G||_inf / delta >= c0 - ||G||_X / delta = 1
    CHECK(a.min_radicand >= 1.0 - 1e-12);
    CHECK(a.stress_ratio == doctest::Approx(1.0));
    // a_j^2 reproduces the designed quadratic exactly.
    for (int j = 0; j < 2; ++j) {
      const TorusField r = apply_multiplier(g, symbols::odd_riesz(j + 1));
      const double s = p == Parity::A ? -1.0 : 1.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double want = 2.0 * delta / 100.0 * (2.0 + s * r.values()[i] / delta);
        CHECK(a[j].values()[i] * a[j].values()[i] == doctest::Approx(want).epsilon(1e-13));
      }
    }
  }
  try {
    (void)make_amplitudes(scaled_stress(n, 6.0, 4, 20.0 * delta), delta, 20, 2.0, Parity::A);
    FAIL("expected positivity failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::positivity);
  }
}

TEST_CASE("increment from constant amplitudes") {
  const int n = 512;
  const AmplitudePair a = make_amplitudes(TorusField(n), 0.3017, 20, 2.0, Parity::A);
  const Increment inc = make_increment(a, 20, std::sqrt(12.0 * 20.0));
  CHECK(inc.carriers[0] == Wavevector{60, 80});
  CHECK(inc.carriers[1] == Wavevector{100, 0});
  CHECK(sup_norm(inc.M) == doctest::Approx(0.2198).epsilon(1e-3));
  CHECK(inc.M(0, 0) == doctest::Approx(sup_norm(inc.M)).epsilon(1e-15));
  CHECK(inc.leakage < 1e-14);

  const NonlinearDecomposition d = decompose_nonlinear(inc);
  CHECK(vec_sup(d[Part::main]) == 0.0);
  CHECK(vec_sup(d[Part::no]) < 1e-14);
  CHECK(reconstruction_error(inc, d) < 1e-12);
}

TEST_CASE("increment support and size") {
  const int n = 512;
  const double delta = 0.35;
  const TorusField g = scaled_stress(n, 5.0, 8, 0.5 * delta);
  const AmplitudePair a = make_amplitudes(g, delta, 20, 2.0, Parity::B);
  const Increment inc = make_increment(a, 20, std::sqrt(12.0 * 20.0));
  CHECK(inc.leakage < 1e-12);
  const double scaled = sup_norm(inc.M) * std::sqrt(20.0 / delta);
  CHECK(scaled > 0.1);
  CHECK(scaled < 2.0);
  CHECK_THROWS_AS(make_increment(a, 20, 25.0), Error);       // r >= lambda
  CHECK_THROWS_AS(make_increment(a, 60, 10.0), Error);       // band above Nyquist
}

TEST_CASE("single-direction product is a pure curl") {
  const int n = 512;
  const double c = 0.3;
  const int lam = 20;
  const TorusField M = plane_wave(n, {5 * lam, 0}, Phase::cosine, c);
  const VectorField q = nonlinear_term(M);
  const double a = 5.0 * lam * c;
  double err = sup_norm(q.x);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double t = 100.0 * h * i;
      err = std::max(err, std::abs(q.y(i, j) + a * a * std::sin(t) * std::cos(t)));
    }
  CHECK(err < 1e-10 * a * a);
  CHECK(sup_norm(gradient_part(q)) < 1e-12 * a * a);
  CHECK(sup_norm(nonlinear_term(TorusField(n)).x) == 0.0);
}

TEST_CASE("decomposition reproduces the brute-force product") {
  struct Case {
    int n, lambda;
    unsigned seed;
    Parity parity;
  };
  for (Case c : {Case{512, 20, 1, Parity::A}, Case{512, 20, 2, Parity::B},
                 Case{1024, 36, 3, Parity::A}, Case{2048, 64, 4, Parity::B}}) {
    const double delta = 0.3;
    const double r = std::sqrt(0.6 * c.lambda * c.lambda);
    const TorusField g = scaled_stress(c.n, 0.3 * r, c.seed, 0.8 * delta);
    const AmplitudePair a = make_amplitudes(g, delta, c.lambda, 2.0, c.parity);
    const Increment inc = make_increment(a, c.lambda, r);
    const NonlinearDecomposition d = decompose_nonlinear(inc);
    CHECK(reconstruction_error(inc, d) < 1e-10);
    // The curl part carries no gradient component.
    CHECK(sup_norm(d.potential(Part::curl)) < 1e-10 * vec_sup(d[Part::curl]));
  }
}

TEST_CASE("main term cancels the stress up to the sharp cutoff remainder") {
  const int n = 512;
  const int lambda = 20;
  const double delta = 0.3, r = std::sqrt(12.0 * 20.0);
  const TorusField g = scaled_stress(n, 4.0, 17, 0.7 * delta);
  for (Parity p : {Parity::A, Parity::B}) {
    const AmplitudePair a = make_amplitudes(g, delta, lambda, 2.0, p);
    const Increment inc = make_increment(a, lambda, r);
    const NonlinearDecomposition d = decompose_nonlinear(inc);
    const double sigma = p == Parity::A ? -2.0 : 2.0;
    TorusField r0 = g;
    r0.add_scaled(sigma, d.potential(Part::main));

    // Designed remainder: lambda_c / 2 Delta^{-1} div sum_j xi_j^perp (xi_j.grad)(e_j^2 - a_j^2)
    // times -sigma / 2, with a_j^2 evaluated from its closed form.
    VectorField v{TorusField(n), TorusField(n)};
    for (int j = 0; j < 2; ++j) {
      const TorusField rj = apply_multiplier(g, symbols::odd_riesz(j + 1));
      TorusField diff = dealiased_product(inc.envelopes[std::size_t(j)], inc.envelopes[std::size_t(j)]);
      const double s = p == Parity::A ? -1.0 : 1.0;
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff.values()[i] -= 2.0 * delta / (5.0 * lambda) * (2.0 + s * rj.values()[i] / delta);
      const Direction xi = kDirections[j], pp = xi.perp();
      const VectorField gr = gradient(diff);
      for (std::size_t i = 0; i < diff.size(); ++i) {
        const double dd = xi.x * gr.x.values()[i] + xi.y * gr.y.values()[i];
        v.x.values()[i] += pp.x * dd;
        v.y.values()[i] += pp.y * dd;
      }
    }
    TorusField designed = gradient_part(v);
    designed *= -0.25 * 5.0 * lambda * sigma;
    CHECK(sup_norm(r0 - designed) < 1e-12 * x_norm(g));
    // And it is small compared with the stress it cancels.
    CHECK(x_norm(r0) < 0.05 * x_norm(g));
  }
}

TEST_CASE("kappa calibration selects 1") {
  const KappaCalibration k = calibrate_kappa();
  CHECK(k.kappa == 1.0);
  CHECK(k.residual[0] < 1e-2);
  CHECK(k.residual[1] > 0.5);
}
