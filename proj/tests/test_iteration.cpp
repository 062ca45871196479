// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "sqgci/iteration.hpp"

using namespace sqgci;

namespace {

ParamSchedule params(double alpha, double b, double beta, double gamma) {
  ParamSchedule p;
  p.alpha = alpha;
  p.b = b;
  p.beta = beta;
  p.gamma = gamma;
  return p;
}

}  // namespace

TEST_CASE("parameter window verdicts") {
  const ParamVerdict a = validate_params(params(0.5, 1.01, 0.01, 1.0));
  CHECK(a.valid);
  CHECK(a.window_lo == 0.0);
  CHECK(a.window_hi == doctest::Approx((1.01 * 1.01 - 1.0) / (1.01 * 1.02)).epsilon(1e-12));
  CHECK(a.window_hi == doctest::Approx(0.0195).epsilon(2e-3));

  const ParamVerdict b = validate_params(params(0.6, 1.2, 0.3, 1.0));
  CHECK(b.valid);
  CHECK(b.window_lo == doctest::Approx(0.24));
  CHECK(b.window_hi == doctest::Approx(0.381).epsilon(1e-3));
  CHECK(b.checks[12].rhs == doctest::Approx(0.857).epsilon(1e-3));

  for (double beta : {0.01, 0.2, 0.505, 0.6}) {
    const ParamVerdict c = validate_params(params(0.75, 1.01, beta, 1.0));
    CHECK_FALSE(c.valid);
    CHECK(c.window_empty);
    CHECK(c.window_lo == doctest::Approx(0.505));
    CHECK(c.window_hi == doctest::Approx(0.5048).epsilon(1e-4));
    CHECK(c.message.find("empty") != std::string::npos);
  }
  // The window closes as alpha -> 3/4 when b -> 1.
  double prev = 1.0;
  for (double a3 : {0.6, 0.7, 0.74, 0.749}) {
    const ParamVerdict v = validate_params(params(a3, 1.0001, 0.1, 1.0));
    const double width = v.window_hi - v.window_lo;
    CHECK(width < prev);
    prev = width;
  }
  CHECK_FALSE(validate_params(params(0.6, 1.2, 0.3, 1.5)).valid);  // gamma window
}

TEST_CASE("schedule values and monotonicity") {
  ParamSchedule p = params(0.6, 1.2, 0.4, 1.0);
  CHECK(schedule(p, 0).lambda == 12);
  CHECK(schedule(p, 1).lambda == 20);
  CHECK(schedule(p, 2).lambda == 36);
  CHECK(schedule(p, 1).delta == doctest::Approx(0.3017).epsilon(1e-3));
  CHECK(schedule(p, 2).r == doctest::Approx(std::sqrt(720.0)).epsilon(1e-14));
  CHECK(schedule(p, 2).r == doctest::Approx(26.83).epsilon(1e-3));
  for (int n = 1; n < 8; ++n) {
    const StageScale a = schedule(p, n - 1), b = schedule(p, n);
    CHECK(b.lambda > a.lambda);
    CHECK(b.delta < a.delta);
    CHECK(b.r > double(a.lambda));
    CHECK(b.r < double(b.lambda));
  }
  CHECK_THROWS_AS(schedule(p, 40), Error);
}

TEST_CASE("grid growth of the reference schedule") {
  const ParamSchedule p;
  const int want[] = {256, 512, 1024, 2048, 4096};
  for (int n = 0; n <= 4; ++n) CHECK(required_grid(p, n) == want[n]);
  for (int n = 1; n <= 4; ++n) {
    const StageScale s = schedule(p, n);
    CHECK(required_grid(p, n) / 2 > 2.0 * (5.0 * double(s.lambda) + s.r));
  }
}

TEST_CASE("initial stress scaling law") {
  const int n = 64;
  for (double nu : {0.0, 0.5}) {
    double prev = 0.0;
    for (double amp : {0.4, 0.2}) {
      const TorusField Pi = plane_wave(n, {1, 0}, Phase::cosine, amp);
      const TorusField mu = plane_wave(n, {1, 1}, Phase::cosine, amp);
      const double gt = x_norm(direct_stress_tilde(Pi, mu, nu, 1.0));
      CHECK(gt > 0.0);
      if (prev > 0.0) CHECK(prev / gt >= (nu > 0.0 ? 2.0 : 4.0) * (1.0 - 1e-12));
      prev = gt;
    }
  }
}

TEST_CASE("initial state satisfies the inductive hypotheses") {
  const ParamSchedule p;
  StageReport rep;
  const IterState s = init_state(p, InitRecipe{}, 128, &rep);
  CHECK(s.grid() == 128);
  CHECK(rep.iter1.ok);
  CHECK(rep.iter2.ok);
  CHECK(rep.iter4.ok);
  CHECK(rep.Gt_X <= 0.9 * rep.delta * (1.0 + 1e-12));
  CHECK(rep.amp_mu > 0.0);
  CHECK(rep.amp_mu == doctest::Approx(std::pow(0.9, rep.init_reductions)));
  // Mono-mode Pi self-interaction is a pure curl, so G vanishes for nu = 0.
  CHECK(rep.G_X < 1e-13);

  InitRecipe bad;
  bad.k_mu = bad.k_pi;
  CHECK_THROWS_AS(init_state(p, bad, 128), Error);
  bad = InitRecipe{};
  bad.amp_mu = 0.0;
  CHECK_THROWS_AS(init_state(p, bad, 128), Error);
  bad = InitRecipe{};
  bad.k_mu = {100, 0};
  CHECK_THROWS_AS(init_state(p, bad, 128), Error);
}

TEST_CASE("synthetic step from a vanishing stress") {
  ParamSchedule p;
  IterState s;
  s.n = 0;
  s.eta = TorusField(512);
  s.eta_tilde = TorusField(512);
  s.G = TorusField(512);
  s.Gt = TorusField(512);
  const HalfStep h = half_step(s, p, EngineOptions{});
  const StageReport& r = h.report;
  CHECK(r.GN_X == 0.0);
  CHECK(r.GR0_X == 0.0);
  // Constant envelopes on carriers of equal length give Lambda M = lambda_c M,
  // so 2 Lambda M perp-grad M is a perpendicular gradient and no stress is left.
  const double scale = 5.0 * double(r.lambda) * r.M_sup * r.M_sup;
  CHECK(r.M_sup > 0.0);
  CHECK(r.JNO_X < 1e-13 * scale);
  for (double j : r.JO_X) CHECK(j < 1e-13 * scale);
  CHECK(r.Gt_X < 1e-13 * scale);
  CHECK(r.curl_discarded > 0.1 * scale);
  CHECK(r.eta_unchanged);
}

TEST_CASE("reference half-steps: skip identities, assembly and budgets") {
  ParamSchedule p;
  p.lambda0 = 8;  // keeps both half-steps on a 512 grid
  const EngineOptions opt;
  const IterState s0 = init_state(p, InitRecipe{}, 0);
  CHECK(s0.grid() == 512);

  const HalfStep a = half_step(s0, p, opt);
  CHECK(a.state.n == 1);
  CHECK(a.report.parity == "A");
  CHECK(a.state.eta.identical_to(s0.eta));
  CHECK(a.report.eta_unchanged);
  CHECK_FALSE(a.report.eta_tilde_unchanged);

  const HalfStep b = half_step(a.state, p, opt);
  CHECK(b.report.parity == "B");
  CHECK(b.state.eta_tilde.identical_to(a.state.eta_tilde));
  CHECK(b.report.eta_tilde_unchanged);

  for (const StageReport* r : {&a.report, &b.report}) {
    CHECK(r->assembly_error < 1e-12);
    CHECK(r->reconstruction_error < 1e-12);
    CHECK(r->curl_part_X < 1e-10 * r->M_sup * r->M_sup * 5.0 * double(r->lambda));
    CHECK(r->Gt_X <= r->component_sum() * (1.0 + 1e-12) + r->curl_part_X);
    CHECK(r->leakage < 1e-12);
    CHECK(r->band_discarded < 1e-8);
    CHECK(r->iter1.ok);
    CHECK(r->min_radicand > 0.0);
    CHECK(r->clamped_fraction == 0.0);
    CHECK(std::isfinite(r->Pi_alpha));
  }
  // Nash term of parity A uses eta~ of the incoming state.
  CHECK(a.report.GN_X > 0.0);
  // G picks up the same linear terms with the parity sign.
  CHECK(x_norm(a.state.G) > 0.0);
}

TEST_CASE("resume reproduces a straight run bit for bit") {
  ParamSchedule p;
  p.lambda0 = 8;
  const EngineOptions opt;
  const IterState s0 = init_state(p, InitRecipe{}, 0);
  const RunResult straight = run_from(s0, 2, p, opt);
  const RunResult first = run_from(s0, 1, p, opt);
  const RunResult second = run_from(first.final_state, 2, p, opt);
  CHECK(straight.final_state.eta.identical_to(second.final_state.eta));
  CHECK(straight.final_state.eta_tilde.identical_to(second.final_state.eta_tilde));
  CHECK(straight.final_state.G.identical_to(second.final_state.G));
  CHECK(straight.final_state.Gt.identical_to(second.final_state.Gt));
  CHECK(straight.distinct);
  CHECK(straight.theta.identical_to(second.theta));
}

TEST_CASE("zero stages return the initial pair") {
  ParamSchedule p;
  p.stages = 0;
  const RunResult r = run(p, InitRecipe{}, EngineOptions{});
  CHECK(r.reports.size() == 1);
  CHECK(r.final_state.n == 0);
  CHECK(r.distinct);
  CHECK(sup_norm(r.theta - r.theta_tilde) > 0.0);
}

TEST_CASE("positivity failure aborts unless a floor is set") {
  ParamSchedule p;
  IterState s;
  s.n = 0;
  s.eta = TorusField(512);
  s.eta_tilde = TorusField(512);
  s.G = TorusField(512);
  s.Gt = plane_wave(512, {1, 0}, Phase::cosine, 3.0);
  try {
    (void)half_step(s, p, EngineOptions{});
    FAIL("expected positivity failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::positivity);
  }
  EngineOptions opt;
  opt.radicand_floor = 0.1;
  const HalfStep h = half_step(s, p, opt);
  CHECK(h.report.clamped_fraction > 0.0);
  CHECK(h.report.min_radicand < 0.0);
}
