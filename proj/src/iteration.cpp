// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sqgci {

namespace {

// Stress components are gradient potentials, mean-zero up to round-off. After
// the cancellation in the main term that round-off can exceed the mean
// tolerance of x_norm relative to the tiny remainder, so it is removed first.
double component_x_norm(TorusField f) {
  const double m = f.mean();
  for (double& v : f.values()) v -= m;
  return x_norm(f);
}

Inequality make_check(std::string name, double lhs, double rhs, bool strict = true) {
  Inequality q{std::move(name), lhs, rhs, strict, false};
  q.satisfied = strict ? lhs < rhs : lhs <= rhs;
  return q;
}

// Lambda a perp-grad b, exact on the grid of a (padded internally if needed).
VectorField lambda_perp_product(const TorusField& a, const TorusField& b) {
  const int n = a.n();
  TorusField la = apply_multiplier(a, symbols::fractional_laplacian(1.0));
  la.set_band_limit(band_of(a));
  VectorField pg = perp_gradient(b);
  const double bb = band_of(b);
  pg.x.set_band_limit(bb);
  pg.y.set_band_limit(bb);
  return {resample(dealiased_product(la, pg.x), n), resample(dealiased_product(la, pg.y), n)};
}

// Projects onto |k| <= R and returns the discarded L2 mass relative to
// max(||f||_2, floor); the floor keeps round-off fields from reporting O(1).
double project_band(TorusField& f, double R, double floor = 0.0) {
  SpectralField s = transform(f);
  const double total = s.energy();
  const double r2 = R * R;
  double dropped = 0.0;
  const int n = s.n();
  s.for_each([&](int k1, int k2, Complex& c) {
    if (double(k1) * k1 + double(k2) * k2 > r2) {
      dropped += ((k2 == 0 || k2 == n / 2) ? 1.0 : 2.0) * std::norm(c);
      c = 0.0;
    }
  });
  f = inverse(s);
  f.set_band_limit(R);
  const double denom = std::max(std::sqrt(total), floor);
  return denom > 0.0 ? std::sqrt(dropped) / denom : 0.0;
}

struct Spectra {
  TorusField lam;         // Lambda f
  VectorField perp_grad;  // (-d2 f, d1 f)
};

Spectra lambda_and_perp(const TorusField& f) {
  const SpectralField s = transform(f);
  SpectralField nd2 = derivative(s, 2);
  nd2 *= -1.0;
  return {inverse(apply(s, symbols::fractional_laplacian(1.0))),
          {inverse(nd2), inverse(derivative(s, 1))}};
}

// nu Lambda^{gamma-1} f with the mean removed.
TorusField damping(const TorusField& f, double nu, double gamma) {
  SpectralField s = transform(f);
  const double g1 = gamma - 1.0;
  s.multiply([g1](int k1, int k2) { return std::pow(double(k1) * k1 + double(k2) * k2, 0.5 * g1); });
  TorusField out = inverse(s);
  out *= nu;
  return out;
}

double sup2(const VectorField& v) { return std::max(sup_norm(v.x), sup_norm(v.y)); }

int feasible_stage(const ParamSchedule& p, int max_grid) {
  int n = 0;
  try {
    while (required_grid(p, n + 1) <= max_grid) ++n;
  } catch (const Error&) {
  }
  return n;
}

}  // namespace

ParamVerdict validate_params(const ParamSchedule& p) {
  ParamVerdict v;
  const double a = p.alpha, b = p.b, be = p.beta, g = p.gamma;
  const double lo = (2.0 * a - 1.0) * b;
  const double hi1 = (2.0 * b / (2.0 * b - 1.0)) * (1.5 - g);
  const double hi2 = (b * b - 2.0 + 2.0 * a) / (b * (2.0 * b - 1.0));
  v.window_lo = lo;
  v.window_hi = std::min(hi1, hi2);
  v.window_empty = !(v.window_lo < v.window_hi);

  v.checks.push_back(make_check("b > 1", 1.0, b));
  v.checks.push_back(make_check("0 < beta", 0.0, be));
  v.checks.push_back(make_check("beta < 1/2", be, 0.5));
  v.checks.push_back(make_check("1/2 <= alpha", 0.5, a, false));
  v.checks.push_back(make_check("alpha < 3/4", a, 0.75));
  v.checks.push_back(make_check("0 < gamma", 0.0, g));
  v.checks.push_back(make_check("gamma < 2 - alpha", g, 2.0 - a));
  v.checks.push_back(make_check("nu >= 0", 0.0, p.nu, false));
  v.checks.push_back(make_check("c0 >= 2", 2.0, p.c0, false));
  v.checks.push_back(make_check("lambda0 >= 8", 8.0, p.lambda0, false));
  v.checks.push_back(make_check("stages >= 0", 0.0, p.stages, false));
  v.checks.push_back(make_check("(2 alpha - 1) b < beta", lo, be));
  v.checks.push_back(make_check("beta < 2b/(2b-1) (3/2 - gamma)", be, hi1));
  v.checks.push_back(make_check("beta < (b^2 - 2 + 2 alpha)/(b (2b - 1))", be, hi2));
  v.checks.push_back(make_check("alpha < 1/2 + beta/(2b)", a, 0.5 + be / (2.0 * b)));

  v.valid = std::all_of(v.checks.begin(), v.checks.end(),
                        [](const Inequality& q) { return q.satisfied; });
  std::ostringstream msg;
  msg.precision(6);
  if (v.window_empty) {
    msg << "invalid: beta window (" << lo << ", " << v.window_hi << ") is empty";
  } else if (v.valid) {
    msg << "valid: " << lo << " < beta = " << be << " < min{" << hi1 << ", " << hi2 << "}";
  } else {
    msg << "invalid:";
    for (const Inequality& q : v.checks)
      if (!q.satisfied) msg << " [" << q.name << "]";
  }
  v.message = msg.str();
  return v;
}

StageScale schedule(const ParamSchedule& p, int n) {
  if (n < 0) fail(ErrorCode::invalid_argument, "schedule: negative stage index");
  auto lam = [&](int m) {
    const double x = std::ceil(std::pow(double(p.lambda0), std::pow(p.b, m)));
    if (!(x <= double(1 << 30)))
      fail(ErrorCode::invalid_argument, "schedule: lambda_" + std::to_string(m) + " overflows");
    return static_cast<long long>(x);
  };
  StageScale s;
  s.lambda = lam(n);
  s.delta = std::pow(double(s.lambda), -p.beta);
  if (n > 0) s.r = std::sqrt(double(lam(n - 1)) * double(s.lambda));
  return s;
}

int required_grid(const ParamSchedule& p, int n) {
  const StageScale s = schedule(p, n);
  const double band = n == 0 ? 6.0 * double(s.lambda) : 2.0 * (5.0 * double(s.lambda) + s.r);
  int m = 64;
  while (!(m / 2.0 > band)) {
    if (m > (1 << 28)) fail(ErrorCode::aliasing, "required grid overflows");
    m *= 2;
  }
  return m;
}

TorusField IterState::Pi() const {
  TorusField out = eta;
  out += eta_tilde;
  out *= 0.5;
  return out;
}

TorusField IterState::mu() const {
  TorusField out = eta;
  out -= eta_tilde;
  out *= 0.5;
  return out;
}

double StageReport::component_sum() const {
  double s = GD_X + GN_X + GR0_X + JNO_X;
  for (double v : JO_X) s += v;
  return s;
}

TorusField direct_stress(const TorusField& Pi, const TorusField& mu, double nu, double gamma) {
  VectorField v = lambda_perp_product(Pi, Pi);
  v += lambda_perp_product(mu, mu);
  TorusField g = gradient_part(v);
  if (nu != 0.0) g += damping(Pi, nu, gamma);
  return g;
}

TorusField direct_stress_tilde(const TorusField& Pi, const TorusField& mu, double nu, double gamma) {
  VectorField v = lambda_perp_product(mu, Pi);
  v += lambda_perp_product(Pi, mu);
  TorusField g = gradient_part(v);
  if (nu != 0.0) g += damping(mu, nu, gamma);
  return g;
}

void assess(const IterState& s, const ParamSchedule& p, const EngineOptions& opt,
            StageReport& rep) {
  const StageScale sc = schedule(p, s.n);
  rep.stage = s.n;
  rep.lambda = sc.lambda;
  rep.delta = sc.delta;
  rep.r = sc.r;
  rep.grid = s.grid();

  const TorusField Pi = s.Pi();
  const TorusField mu = s.mu();
  const double lam = double(sc.lambda);

  rep.Gt_X = x_norm(s.Gt);
  rep.G_X = x_norm(s.G);
  rep.mu_sup = sup_norm(mu);

  const double band = std::max({transform(Pi).active_radius() / (6.0 * lam),
                                transform(mu).active_radius() / (6.0 * lam),
                                transform(s.G).active_radius() / (12.0 * lam),
                                transform(s.Gt).active_radius() / (12.0 * lam)});
  rep.iter1 = {band <= 1.0, band, 1.0};
  rep.iter2 = {rep.G_X <= 1.0 - std::sqrt(sc.delta), rep.G_X, 1.0 - std::sqrt(sc.delta)};
  rep.iter4 = {rep.Gt_X <= sc.delta, rep.Gt_X, sc.delta};

  const DyadicProfile gp = dyadic_profile(s.G);
  const double exps[3] = {p.beta, 1.0, 2.0};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    rep.iter3_ratio[std::size_t(i)] = gp.holder(exps[i]) / (std::pow(lam, exps[i]) * sc.delta);
    worst = std::max(worst, rep.iter3_ratio[std::size_t(i)]);
  }
  rep.iter3 = {worst <= opt.iter3_constant, worst, opt.iter3_constant};

  rep.Pi_alpha = dyadic_profile(Pi).holder(p.alpha);
  rep.mu_alpha = dyadic_profile(mu).holder(p.alpha);
  rep.G_2am1 = gp.holder(std::max(0.0, 2.0 * p.alpha - 1.0));
}

IterState init_state(const ParamSchedule& p, const InitRecipe& recipe, int n,
                     StageReport* report) {
  if (!(recipe.amp_mu > 0.0))
    fail(ErrorCode::invalid_argument, "init: mu amplitude must be positive");
  if (!(recipe.amp_pi >= 0.0)) fail(ErrorCode::invalid_argument, "init: Pi amplitude must be >= 0");
  if (recipe.k_pi == recipe.k_mu)
    fail(ErrorCode::invalid_argument, "init: Pi and mu wavevectors must differ");
  if (!(recipe.shrink > 0.0 && recipe.shrink < 1.0))
    fail(ErrorCode::invalid_argument, "init: shrink factor must lie in (0, 1)");
  const double lam0 = double(p.lambda0);
  for (Wavevector k : {recipe.k_pi, recipe.k_mu})
    if (k == Wavevector{0, 0} || k.norm() > 6.0 * lam0)
      fail(ErrorCode::invalid_argument, "init: wavevectors must satisfy 0 < |k| <= 6 lambda0");

  if (n == 0) n = required_grid(p, 1);
  const StageScale sc = schedule(p, 0);
  const double gt_bound = (1.0 - recipe.margin) * sc.delta;
  const double g_bound = (1.0 - recipe.margin) * (1.0 - std::sqrt(sc.delta));

  double ap = recipe.amp_pi, am = recipe.amp_mu;
  IterState s;
  int reductions = 0;
  for (;; ++reductions) {
    if (reductions > 5000) fail(ErrorCode::internal, "init: amplitude reduction did not converge");
    const TorusField Pi = plane_wave(n, recipe.k_pi, Phase::cosine, ap);
    const TorusField mu = plane_wave(n, recipe.k_mu, Phase::cosine, am);
    s.n = 0;
    s.eta = Pi + mu;
    s.eta_tilde = Pi - mu;
    const TorusField P = s.Pi(), m = s.mu();
    s.G = direct_stress(P, m, p.nu, p.gamma);
    s.Gt = direct_stress_tilde(P, m, p.nu, p.gamma);
    if (x_norm(s.Gt) <= gt_bound && x_norm(s.G) <= g_bound) break;
    ap *= recipe.shrink;
    am *= recipe.shrink;
  }
  if (report) {
    *report = StageReport{};
    report->parity = "init";
    report->init_reductions = reductions;
    report->amp_pi = ap;
    report->amp_mu = am;
    assess(s, p, EngineOptions{}, *report);
  }
  return s;
}

IterState regrid(const IterState& s, int m) {
  if (m == s.grid()) return s;
  if (m < s.grid()) fail(ErrorCode::invalid_argument, "regrid only enlarges the grid");
  IterState out;
  out.n = s.n;
  out.eta = resample(s.eta, m);
  out.eta_tilde = resample(s.eta_tilde, m);
  out.G = resample(s.G, m);
  out.Gt = resample(s.Gt, m);
  return out;
}

HalfStep half_step(const IterState& in, const ParamSchedule& p, const EngineOptions& opt) {
  const Parity parity = in.parity();
  const int n = in.n;
  const StageScale prev = schedule(p, n);
  const StageScale next = schedule(p, n + 1);
  if (next.lambda > std::numeric_limits<int>::max() / 10)
    fail(ErrorCode::invalid_argument, "half_step: lambda too large");
  const int lambda = int(next.lambda);

  int grid = opt.grid > 0 ? opt.grid : std::max(in.grid(), required_grid(p, n + 1));
  if (grid < required_grid(p, n + 1) || grid > opt.max_grid)
    fail(ErrorCode::aliasing,
         "half-step " + std::to_string(n) + " -> " + std::to_string(n + 1) + " needs grid " +
             std::to_string(required_grid(p, n + 1)) + " (limit " + std::to_string(opt.max_grid) +
             "); maximal feasible state index is " + std::to_string(feasible_stage(p, opt.max_grid)));
  IterState st = regrid(in, grid);
  // Work from sample values only, so a state read back from disk continues
  // bit-identically to the in-memory one.
  for (TorusField* f : {&st.eta, &st.eta_tilde, &st.G, &st.Gt}) f->set_band_limit(std::nullopt);

  HalfStep out;
  StageReport& rep = out.report;
  rep.parity = std::string(to_string(parity));

  Increment inc;
  {
    const AmplitudePair amps = make_amplitudes(st.Gt, prev.delta, lambda, p.c0, parity, opt.kappa,
                                               opt.radicand_floor);
    rep.min_radicand = amps.min_radicand;
    rep.clamped_fraction = amps.clamped_fraction;
    rep.stress_ratio_in = amps.stress_ratio;
    inc = make_increment(amps, lambda, next.r, opt.leakage_tol);
  }
  rep.leakage = inc.leakage;
  rep.M_sup = sup_norm(inc.M);

  const double sigma = parity == Parity::A ? -2.0 : 2.0;
  const double tau = parity == Parity::A ? -1.0 : 1.0;
  const TorusField& w = parity == Parity::A ? st.eta_tilde : st.eta;

  // Direct assembly.
  VectorField q;
  TorusField linear;  // G~_D + G~_N
  double curl_discarded_sup = 0.0;
  {
    const Spectra sm = lambda_and_perp(inc.M);
    TorusField gd = p.nu != 0.0 ? damping(inc.M, p.nu, p.gamma) : TorusField(grid);
    rep.GD_X = component_x_norm(gd);

    VectorField nash{TorusField(grid), TorusField(grid)};
    {
      const Spectra sw = lambda_and_perp(w);
      for (std::size_t i = 0; i < nash.x.size(); ++i) {
        nash.x.values()[i] = sw.lam.values()[i] * sm.perp_grad.x.values()[i] +
                             sm.lam.values()[i] * sw.perp_grad.x.values()[i];
        nash.y.values()[i] = sw.lam.values()[i] * sm.perp_grad.y.values()[i] +
                             sm.lam.values()[i] * sw.perp_grad.y.values()[i];
      }
    }
    TorusField gn = gradient_part(nash);
    rep.GN_X = component_x_norm(gn);
    TorusField curl = curl_part(nash);
    nash = {};

    q = {TorusField(grid), TorusField(grid)};
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      q.x.values()[i] = sm.lam.values()[i] * sm.perp_grad.x.values()[i];
      q.y.values()[i] = sm.lam.values()[i] * sm.perp_grad.y.values()[i];
    }
    curl.add_scaled(sigma, curl_part(q));
    curl_discarded_sup = sup_norm(curl);
    linear = std::move(gd);
    linear += gn;
  }
  const TorusField gq = gradient_part(q);

  out.state.n = n + 1;
  out.state.Gt = st.Gt;
  out.state.Gt += linear;
  out.state.Gt.add_scaled(sigma, gq);
  out.state.G = st.G;
  out.state.G.add_scaled(tau, linear);
  out.state.G.add_scaled(2.0, gq);

  // Decomposed assembly; q is consumed as the reconstruction residual.
  TorusField assembled = std::move(linear);
  const double q_scale = std::max(sup2(q), 1e-300);
  for_each_part(inc, [&](Part part, VectorField&& v) {
    q.x -= v.x;
    q.y -= v.y;
    TorusField j = gradient_part(v);
    v = {};
    switch (part) {
      case Part::curl:
        rep.curl_part_X = sup_norm(j);
        return;
      case Part::main: {
        TorusField r0 = st.Gt;
        r0.add_scaled(sigma, j);
        rep.GR0_X = component_x_norm(r0);
        assembled += r0;
        return;
      }
      case Part::no:
        j *= sigma;
        rep.JNO_X = component_x_norm(j);
        assembled += j;
        return;
      default: {
        j *= sigma;
        rep.JO_X[std::size_t(int(part) - int(Part::o1))] = component_x_norm(j);
        assembled += j;
        return;
      }
    }
  });
  rep.reconstruction_error = sup2(q) / q_scale;
  q = {};
  // Relative to the largest term entering G~; the potential of q scales as q / lambda_c.
  const double assembly_scale =
      std::max({sup_norm(out.state.Gt), sup_norm(st.Gt), 2.0 * q_scale / inc.lambda_c(), 1e-300});
  rep.assembly_error = sup_norm(assembled - out.state.Gt) / assembly_scale;
  if (!(rep.assembly_error <= opt.assembly_tol))
    fail(ErrorCode::consistency, "two-way assembly of G~ disagrees: relative error " +
                                     std::to_string(rep.assembly_error));
  rep.curl_discarded = curl_discarded_sup;

  const double lam = double(lambda);
  double dropped = 0.0;
  if (parity == Parity::A) {
    out.state.eta = st.eta;
    out.state.eta_tilde = st.eta_tilde;
    out.state.eta_tilde.add_scaled(-2.0, inc.M);
    dropped = project_band(out.state.eta_tilde, 6.0 * lam, rep.M_sup);
  } else {
    out.state.eta_tilde = st.eta_tilde;
    out.state.eta = st.eta;
    out.state.eta.add_scaled(2.0, inc.M);
    dropped = project_band(out.state.eta, 6.0 * lam, rep.M_sup);
  }
  dropped = std::max(dropped, project_band(out.state.G, 12.0 * lam, assembly_scale));
  dropped = std::max(dropped, project_band(out.state.Gt, 12.0 * lam, assembly_scale));
  rep.band_discarded = dropped;
  if (dropped > opt.band_tol)
    fail(ErrorCode::band_leakage, "band projection discards " + std::to_string(dropped) +
                                      " of the L2 mass");
  out.increment = std::move(inc.M);
  rep.eta_unchanged = out.state.eta.identical_to(st.eta);
  rep.eta_tilde_unchanged = out.state.eta_tilde.identical_to(st.eta_tilde);

  assess(out.state, p, opt, rep);
  return out;
}

RunResult run_from(IterState start, int target_n, const ParamSchedule& p,
                   const EngineOptions& opt, const StateObserver& observer) {
  RunResult res;
  IterState cur = std::move(start);
  while (cur.n < target_n) {
    HalfStep hs = half_step(cur, p, opt);
    if (observer) observer(hs.state, hs.report, hs.increment);
    res.reports.push_back(std::move(hs.report));
    cur = std::move(hs.state);
  }
  res.theta = apply_multiplier(cur.eta, symbols::fractional_laplacian(1.0));
  res.theta_tilde = apply_multiplier(cur.eta_tilde, symbols::fractional_laplacian(1.0));
  res.forcing = apply_multiplier(cur.G, {[](int k1, int k2) {
                                           return Complex(-(double(k1) * k1 + double(k2) * k2));
                                         },
                                         0.0});
  res.mu_sup = sup_norm(cur.mu());
  res.distinct = res.mu_sup > 0.0;
  res.final_state = std::move(cur);
  return res;
}

RunResult run(const ParamSchedule& p, const InitRecipe& recipe, const EngineOptions& opt,
              const StateObserver& observer) {
  const ParamVerdict v = validate_params(p);
  if (!v.valid) fail(ErrorCode::invalid_params, v.message);
  StageReport r0;
  IterState s0 = init_state(p, recipe, opt.grid, &r0);
  if (observer) observer(s0, r0, TorusField{});
  RunResult res = run_from(std::move(s0), 2 * p.stages, p, opt, observer);
  res.reports.insert(res.reports.begin(), r0);
  return res;
}

}  // namespace sqgci
