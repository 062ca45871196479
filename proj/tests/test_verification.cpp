// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <utility>

#include "sqgci/corrector.hpp"
#include "sqgci/verification.hpp"

using namespace sqgci;

namespace {

using Coeffs = std::map<std::pair<int, int>, Complex>;

// Naive DFT of a real field; keeps coefficients above 1e-14.
Coeffs naive_dft(const TorusField& f) {
  const int n = f.n();
  Coeffs c;
  for (int k1 = -n / 2 + 1; k1 < n / 2; ++k1)
    for (int k2 = -n / 2 + 1; k2 < n / 2; ++k2) {
      Complex acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += f(i, j) * std::polar(1.0, -kTwoPi * (double(k1) * i + double(k2) * j) / n);
      acc /= double(n) * n;
      if (std::abs(acc) > 1e-14) c[{k1, k2}] = acc;
    }
  return c;
}

double inv_norm(int k1, int k2) {
  const double r = std::hypot(double(k1), double(k2));
  return r > 0.0 ? 1.0 / r : 0.0;
}

// Commutator by explicit convolution of coefficient lists.
TorusField oracle_commutator(const TorusField& theta, const TorusField& psi) {
  const Coeffs th = naive_dft(theta), ps = naive_dft(psi);
  Coeffs out;
  for (const auto& [p, cp] : ps)
    for (const auto& [q, cq] : th) {
      const int k1 = p.first + q.first, k2 = p.second + q.second;
      // grad psi at p is i p cp; symbol of grad-perp Lambda^{-1} is i(-k2, k1)/|k|
      const Complex g1 = Complex(0, p.first) * cp, g2 = Complex(0, p.second) * cp;
      const Complex first = Complex(0, 1) * (-double(k2) * g1 + double(k1) * g2) * inv_norm(k1, k2) * cq;
      const Complex u1 = Complex(0, -double(q.second)) * inv_norm(q.first, q.second) * cq;
      const Complex u2 = Complex(0, double(q.first)) * inv_norm(q.first, q.second) * cq;
      out[{k1, k2}] += first - (u1 * g1 + u2 * g2);
    }
  const int n = theta.n();
  TorusField f(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (const auto& [k, c] : out)
        acc += c * std::polar(1.0, kTwoPi * (double(k.first) * i + double(k.second) * j) / n);
      f(i, j) = acc.real();
    }
  return f;
}

double pair(const TorusField& a, const TorusField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s / double(a.size());
}

}  // namespace

TEST_CASE("test function bank") {
  const TestFunctionBank bank;
  CHECK(bank.k_test() == 8);
  int count = 0;
  for (int k1 = -8; k1 <= 8; ++k1)
    for (int k2 = -8; k2 <= 8; ++k2)
      if ((k1 || k2) && k1 * k1 + k2 * k2 <= 64) ++count;
  CHECK(bank.size() == std::size_t(count));  // cos and sin over the half plane
  CHECK_THROWS_AS(TestFunctionBank(0), Error);
  const TorusField f = bank.field(1, 32);
  CHECK(sup_norm(f) == doctest::Approx(1.0));
}

TEST_CASE("commutator closed form and oracle") {
  const int n = 16;
  const TorusField theta = plane_wave(n, {1, 0}, Phase::cosine);
  const TorusField psi = plane_wave(n, {0, 1}, Phase::cosine);
  const TorusField c = commutator(theta, psi);
  const double a = 1.0 / std::sqrt(2.0) - 1.0;
  const TorusField want = TorusField::sample(n, [a](double x, double y) {
    return a * std::sin(x) * std::sin(y);
  });
  CHECK(sup_norm(c - want) < 1e-14);
  CHECK(sup_norm(c - oracle_commutator(theta, psi)) < 1e-13);

  const TorusField th = random_band_limited(n, 3.0, 5);
  TorusField ps = random_band_limited(n, 2.0, 6);
  const TorusField got = commutator(th, ps);
  REQUIRE(got.n() == n);
  CHECK(sup_norm(got - oracle_commutator(th, ps)) < 1e-10 * sup_norm(got));

  TorusField one(n);
  for (double& v : one.values()) v = 1.0;
  CHECK(sup_norm(commutator(th, one)) == 0.0);
}

TEST_CASE("commutator gains smoothness as the test function band shrinks") {
  const int n = 256;
  const TorusField theta = random_band_limited(n, 60.0, 11);
  double prev = 1e300;
  for (int kp : {16, 4, 1}) {
    const TorusField psi = plane_wave(n, {kp, 0}, Phase::cosine);
    const double ratio = sup_norm(commutator(theta, psi)) / (sup_norm(theta) * kp);
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("single modes are exact stationary solutions") {
  const TestFunctionBank bank;
  for (Wavevector k : {Wavevector{1, 0}, Wavevector{3, 4}, Wavevector{-2, 7}}) {
    const TorusField theta = plane_wave(64, k, Phase::cosine, 0.7);
    CHECK(sup_norm(transport(theta)) < 1e-12);
    CHECK(weak_residual(theta, TorusField(64), 0.0, 1.0, bank).max_normalized < 1e-12);
    // With damping the balancing force is nu Lambda^gamma theta.
    const TorusField f = apply_multiplier(theta, symbols::fractional_laplacian(0.8)) * 0.3;
    CHECK(weak_residual(theta, f, 0.3, 0.8, bank).max_normalized < 1e-10);
  }
}

TEST_CASE("shifted-spectrum residual matches the grid path") {
  const int n = 64;
  const TorusField theta = random_band_limited(n, 9.0, 21);
  const TorusField f = random_band_limited(n, 5.0, 22);
  const TestFunctionBank bank(4);
  const WeakResidual w = weak_residual(theta, f, 0.2, 1.3, bank);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double d = weak_residual_direct(theta, f, 0.2, 1.3, bank.modes()[i]);
    CHECK(w.raw[i] == doctest::Approx(d).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("integration by parts identity of the weak form") {
  const int n = 64;
  for (unsigned seed : {1u, 2u, 3u}) {
    const TorusField theta = random_band_limited(n, 7.0, seed);
    const TorusField psi = random_band_limited(n, 4.0, seed + 100);
    const TorusField ux = apply_multiplier(theta, symbols::riesz(2)) * -1.0;
    const TorusField uy = apply_multiplier(theta, symbols::riesz(1));
    const VectorField gp = gradient(psi);
    double lhs = 0.0;  // mean of theta u . grad psi; the total band 18 stays below n
    for (std::size_t i = 0; i < theta.size(); ++i)
      lhs += theta.values()[i] *
             (ux.values()[i] * gp.x.values()[i] + uy.values()[i] * gp.y.values()[i]);
    lhs /= double(theta.size());
    const double rhs = -0.5 * pair(theta, commutator(theta, psi));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("stress-equation residual of engine states") {
  ParamSchedule p;
  p.lambda0 = 8;
  const IterState s0 = init_state(p, InitRecipe{}, 0);
  CHECK(pm4_residual(s0, p.nu, p.gamma).max() < 1e-9);
  const HalfStep a = half_step(s0, p, EngineOptions{});
  CHECK(pm4_residual(a.state, p.nu, p.gamma).max() < 1e-9);
  const HalfStep b = half_step(a.state, p, EngineOptions{});
  CHECK(pm4_residual(b.state, p.nu, p.gamma).max() < 1e-9);

  // A perpendicular-gradient perturbation leaves the residual unchanged.
  IterState t = b.state;
  const TorusField h = random_band_limited(t.grid(), 6.0, 9);
  t.G += gradient_part(perp_gradient(h));
  CHECK(pm4_residual(t, p.nu, p.gamma).max() < 1e-9);

  // A gradient perturbation is detected.
  const double eps = 1e-2;
  t = b.state;
  t.G.add_scaled(eps, plane_wave(t.grid(), {10, 0}, Phase::cosine));
  const Pm4Residual bad = pm4_residual(t, p.nu, p.gamma);
  CHECK(bad.eq1 > 1e-6);
  CHECK(bad.eq2 < 1e-9);

  // Engine outputs reproduce their predicted weak residual.
  const TestFunctionBank bank;
  const EngineResidual e = engine_residual(b.state, p.nu, p.gamma, bank);
  CHECK(e.max_prediction_error < 1e-9);
  CHECK(e.max_bound_ratio <= 1.0);
}

TEST_CASE("stress-equation residual with damping") {
  ParamSchedule p;
  p.lambda0 = 8;
  p.nu = 0.05;
  const IterState s0 = init_state(p, InitRecipe{}, 0);
  CHECK(pm4_residual(s0, p.nu, p.gamma).max() < 1e-9);
  const HalfStep a = half_step(s0, p, EngineOptions{});
  CHECK(a.report.GD_X > 0.0);
  CHECK(pm4_residual(a.state, p.nu, p.gamma).max() < 1e-9);
  const EngineResidual e = engine_residual(a.state, p.nu, p.gamma, TestFunctionBank(4));
  CHECK(e.max_prediction_error < 1e-9);
}

TEST_CASE("corrector bound probes") {
  // Exact symbol value on a single-mode envelope.
  const TorusField a = plane_wave(64, {3, 4}, Phase::cosine);
  const double ratio = sup_norm(t1(a, 100, kXi2)) * 100.0 / 25.0;
  CHECK(ratio == doctest::Approx(0.08004 * 4.0).epsilon(1e-3));

  const BoundProbeReport r = bound_probes();
  REQUIRE(r.rows.size() >= 4);
  for (const BoundProbeRow& row : r.rows) {
    CHECK(row.in_hypothesis);
    CHECK(row.r >= 10.0);
  }
  REQUIRE(!r.excluded.empty());
  CHECK(r.excluded.front().lambda == 64);
  CHECK(r.t1 > 0.0);
  CHECK(r.t1 < 2.0);
  CHECK(r.t2 < 2.0);
  CHECK(r.t2_potential < 10.0);
  CHECK(r.degree_zero < 10.0);
}

TEST_CASE("decay table") {
  std::vector<StageReport> reps(3);
  for (int i = 0; i < 3; ++i) {
    reps[std::size_t(i)].stage = i;
    reps[std::size_t(i)].delta = std::pow(0.5, i);
    reps[std::size_t(i)].Gt_X = 0.4 * std::pow(0.25, i);
  }
  reps[2].GN_X = 0.05;
  const DecayTable t = decay_report(reps);
  CHECK(t.strictly_decreasing);
  CHECK(t.all_ratios_below_one);
  CHECK(t.rows[1].ratio == doctest::Approx(0.25));
  CHECK(t.rows[1].delta_ratio == doctest::Approx(0.5));
  CHECK(t.rows[2].frac_N == doctest::Approx(0.2));
  reps[2].Gt_X = 1.0;
  CHECK_FALSE(decay_report(reps).strictly_decreasing);
  reps.resize(1);
  CHECK_THROWS_AS(decay_report(reps), Error);
}
