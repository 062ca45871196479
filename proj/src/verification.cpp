// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sqgci/corrector.hpp"

namespace sqgci {

namespace {

double l2(const TorusField& f) { return std::sqrt(transform(f).energy()); }

// Coefficient of theta against exp(i p.x) in the normalized pairing.
Complex mode_pairing(const SpectralField& s, Wavevector p) {
  const int h = s.n() / 2;
  if (std::abs(p.k1) >= h || std::abs(p.k2) >= h) return 0.0;
  return std::conj(s.coeff(p.k1, p.k2));
}

// <theta, psi> for a real bank mode, given the coefficient of theta at p.
double real_pairing(Complex conj_c, Phase phase) {
  // cos: (conj c(p) + conj c(-p)) / 2 = Re c(p); sin: -Im c(p).
  return phase == Phase::cosine ? conj_c.real() : conj_c.imag();
}

TorusField to_grid(const TorusField& f, int n) {
  return f.n() == n ? f : resample(f, n);
}

double dot_product_band(const TorusField& a, const TorusField& b) {
  return band_of(a) + band_of(b);
}

// grad-perp Lambda^{-1} . v = -R2 v1 + R1 v2.
TorusField perp_riesz_div(const TorusField& vx, const TorusField& vy) {
  TorusField out = apply_multiplier(vy, symbols::riesz(1));
  out -= apply_multiplier(vx, symbols::riesz(2));
  return out;
}

// Dense window of the full-plane spectrum, indexed by k + offset.
class SpectrumWindow {
 public:
  SpectrumWindow(const SpectralField& s, int radius, int margin)
      : radius_(radius), off_(radius + margin), w_(2 * off_ + 1),
        data_(std::size_t(w_) * std::size_t(w_)), inv_(data_.size()) {
    const double r2 = double(radius) * radius;
    for (int k1 = -off_; k1 <= off_; ++k1)
      for (int k2 = -off_; k2 <= off_; ++k2) {
        const std::size_t i = index(k1, k2);
        const double kk = double(k1) * k1 + double(k2) * k2;
        inv_[i] = kk > 0.0 ? 1.0 / std::sqrt(kk) : 0.0;
        if (kk <= r2) data_[i] = s.coeff(k1, k2);
      }
  }
  std::size_t index(int k1, int k2) const {
    return std::size_t(k1 + off_) * std::size_t(w_) + std::size_t(k2 + off_);
  }
  const Complex& at(int k1, int k2) const { return data_[index(k1, k2)]; }
  double inv_norm(int k1, int k2) const { return inv_[index(k1, k2)]; }
  int radius() const { return radius_; }

 private:
  int radius_, off_, w_;
  std::vector<Complex> data_;
  std::vector<double> inv_;
};

// <theta, C_p theta> for the complex test function exp(i p.x). In Fourier
// space C_p theta(k) = -(k x p)(1/|k| - 1/|k - p|) theta^(k - p).
Complex commutator_pairing(const SpectrumWindow& w, Wavevector p) {
  const int R = w.radius();
  Complex acc = 0.0;
  for (int k1 = -R; k1 <= R; ++k1) {
    const int span = int(std::floor(std::sqrt(double(R) * R - double(k1) * k1)));
    for (int k2 = -span; k2 <= span; ++k2) {
      const Complex& c = w.at(k1, k2);
      if (c == 0.0) continue;
      const int m1 = k1 - p.k1, m2 = k2 - p.k2;
      const Complex& d = w.at(m1, m2);
      if (d == 0.0) continue;
      const double cross = double(k1) * p.k2 - double(k2) * p.k1;
      acc += std::conj(c) * d * (-cross * (w.inv_norm(k1, k2) - w.inv_norm(m1, m2)));
    }
  }
  return acc;
}

double psi_l2() { return std::sqrt(0.5); }

}  // namespace

TestFunctionBank::TestFunctionBank(int k_test) : k_test_(k_test) {
  if (k_test < 1) fail(ErrorCode::invalid_argument, "test bank needs K_test >= 1");
  for (int k2 = 0; k2 <= k_test; ++k2)
    for (int k1 = -k_test; k1 <= k_test; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      if (k1 * k1 + k2 * k2 > k_test * k_test) continue;
      modes_.push_back({{k1, k2}, Phase::cosine});
      modes_.push_back({{k1, k2}, Phase::sine});
    }
}

TorusField TestFunctionBank::field(std::size_t i, int n) const {
  const TestMode& m = modes_.at(i);
  TorusField f = plane_wave(n, m.k, m.phase);
  f.set_band_limit(m.k.norm());
  return f;
}

TorusField commutator(const TorusField& theta, const TorusField& psi) {
  TorusField th = theta;
  th.set_band_limit(band_of(theta));
  const VectorField gp = gradient(psi);
  VectorField g{gp.x, gp.y};
  g.x.set_band_limit(band_of(psi));
  g.y.set_band_limit(band_of(psi));

  TorusField px = dealiased_product(th, g.x);
  TorusField py = dealiased_product(th, g.y);
  const int m = px.n();
  TorusField out = perp_riesz_div(px, py);

  // (grad-perp Lambda^{-1} theta) . grad psi
  TorusField ux = apply_multiplier(th, symbols::riesz(2));
  ux *= -1.0;
  TorusField uy = apply_multiplier(th, symbols::riesz(1));
  ux.set_band_limit(band_of(theta));
  uy.set_band_limit(band_of(theta));
  out -= to_grid(dealiased_product(ux, g.x), m);
  out -= to_grid(dealiased_product(uy, g.y), m);

  if (m != theta.n() && dot_product_band(theta, psi) < theta.n() / 2.0)
    out = resample(out, theta.n());
  return out;
}

TorusField transport(const TorusField& theta) {
  TorusField ux = apply_multiplier(theta, symbols::riesz(2));
  ux *= -1.0;
  TorusField uy = apply_multiplier(theta, symbols::riesz(1));
  const VectorField g = gradient(theta);
  const double b = band_of(theta);
  for (TorusField* f : {&ux, &uy}) f->set_band_limit(b);
  VectorField gb = g;
  gb.x.set_band_limit(b);
  gb.y.set_band_limit(b);
  TorusField out = dealiased_product(ux, gb.x);
  out += to_grid(dealiased_product(uy, gb.y), out.n());
  return out;
}

WeakResidual weak_residual(const TorusField& theta, const TorusField& f, double nu, double gamma,
                           const TestFunctionBank& bank) {
  const SpectralField ts = transform(theta);
  const SpectralField fs = transform(f);
  const int radius = std::min(int(std::ceil(ts.active_radius())), ts.n() / 2 - 1);
  const SpectrumWindow win(ts, radius, bank.k_test());
  const double theta2 = ts.energy();
  const double f2 = std::sqrt(fs.energy());

  WeakResidual out;
  for (const TestMode& m : bank.modes()) {
    const Complex bp = commutator_pairing(win, m.k);
    const Complex bm = commutator_pairing(win, {-m.k.k1, -m.k.k2});
    const double comm = m.phase == Phase::cosine ? 0.5 * (bp + bm).real()
                                                 : ((bp - bm) / Complex(0.0, 2.0)).real();
    const double damp = nu != 0.0 ? nu * std::pow(m.k.norm(), gamma) *
                                        real_pairing(mode_pairing(ts, m.k), m.phase)
                                  : 0.0;
    const double force = real_pairing(mode_pairing(fs, m.k), m.phase);
    const double raw = 0.5 * comm + damp - force;
    const double den = theta2 * m.c1_norm() + f2 * psi_l2();
    out.raw.push_back(raw);
    out.normalized.push_back(den > 0.0 ? std::abs(raw) / den : std::abs(raw));
  }
  const auto it = std::max_element(out.normalized.begin(), out.normalized.end());
  out.worst = std::size_t(it - out.normalized.begin());
  out.max_normalized = *it;
  return out;
}

double weak_residual_direct(const TorusField& theta, const TorusField& f, double nu, double gamma,
                            const TestMode& mode) {
  TorusField psi = plane_wave(theta.n(), mode.k, mode.phase);
  psi.set_band_limit(mode.k.norm());
  const TorusField c = commutator(theta, psi);
  const TorusField th = to_grid(theta, c.n());
  double comm = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) comm += th.values()[i] * c.values()[i];
  comm /= double(c.size());
  double rest = 0.0;
  const TorusField lg = apply_multiplier(psi, symbols::fractional_laplacian(gamma));
  for (std::size_t i = 0; i < psi.size(); ++i)
    rest += nu * theta.values()[i] * lg.values()[i] - f.values()[i] * psi.values()[i];
  rest /= double(psi.size());
  return 0.5 * comm + rest;
}

EngineResidual engine_residual(const IterState& s, double nu, double gamma,
                               const TestFunctionBank& bank) {
  const MultiplierSpec lap{[](int k1, int k2) { return Complex(-(double(k1) * k1 + double(k2) * k2)); },
                           0.0};
  const TorusField f = apply_multiplier(s.G, lap);
  const SpectralField dgt = transform(apply_multiplier(s.Gt, lap));
  const double gt_sup = sup_norm(s.Gt);

  EngineResidual out;
  for (int which = 0; which < 2; ++which) {
    const TorusField theta =
        apply_multiplier(which == 0 ? s.eta : s.eta_tilde, symbols::fractional_laplacian(1.0));
    const SpectralField ts = transform(theta);
    const double theta2 = ts.energy();
    const double f2 = l2(f);
    WeakResidual w = weak_residual(theta, f, nu, gamma, bank);
    const double sign = which == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
      const TestMode& m = bank.modes()[i];
      const double kg = std::pow(m.k.norm(), gamma);
      const double predicted =
          sign * real_pairing(mode_pairing(dgt, m.k), m.phase) +
          2.0 * nu * kg * real_pairing(mode_pairing(ts, m.k), m.phase);
      const double den = theta2 * m.c1_norm() + f2 * psi_l2();
      const double scale = den > 0.0 ? den : 1.0;
      out.max_prediction_error =
          std::max(out.max_prediction_error, std::abs(w.raw[i] - predicted) / scale);
      const double bound = m.k.norm() * m.k.norm() * gt_sup + 2.0 * nu * kg * std::sqrt(theta2);
      if (bound > 0.0)
        out.max_bound_ratio = std::max(out.max_bound_ratio, std::abs(w.raw[i]) / bound);
    }
    (which == 0 ? out.theta : out.theta_tilde) = std::move(w);
  }
  return out;
}

Pm4Residual pm4_residual(const IterState& s, double nu, double gamma) {
  const TorusField Pi = s.Pi();
  const TorusField mu = s.mu();
  // div(Lambda a perp-grad b) = grad(Lambda a) . perp-grad b
  auto div_product = [](const TorusField& a, const TorusField& b) {
    // Measured radii: declared limits can be loose enough to force padding.
    const double ba = transform(a).active_radius(), bb = transform(b).active_radius();
    VectorField ga = gradient(apply_multiplier(a, symbols::fractional_laplacian(1.0)));
    VectorField pb = perp_gradient(b);
    ga.x.set_band_limit(ba);
    ga.y.set_band_limit(ba);
    pb.x.set_band_limit(bb);
    pb.y.set_band_limit(bb);
    TorusField out = dealiased_product(ga.x, pb.x);
    out += to_grid(dealiased_product(ga.y, pb.y), out.n());
    return out;
  };
  // div(-nu Lambda^{gamma-1} grad h + grad G) = nu Lambda^{gamma+1} h + Delta G
  auto div_rhs = [&](const TorusField& h, const TorusField& G) {
    SpectralField hs = transform(h);
    hs.multiply([gamma](int k1, int k2) {
      return Complex(std::pow(double(k1) * k1 + double(k2) * k2, 0.5 * (gamma + 1.0)));
    });
    hs *= nu;
    SpectralField gs = transform(G);
    gs.multiply([](int k1, int k2) { return Complex(-(double(k1) * k1 + double(k2) * k2)); });
    gs += hs;
    return inverse(gs);
  };
  // Pointwise size of the product terms, |grad Lambda a| |grad b|; bounds the
  // divergence of each term and keeps pure-curl states from dividing 0 by 0.
  auto term_scale = [](const TorusField& a, const TorusField& b) {
    const VectorField ga = gradient(apply_multiplier(a, symbols::fractional_laplacian(1.0)));
    const VectorField gb = gradient(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double m = std::hypot(ga.x.values()[i], ga.y.values()[i]) *
                       std::hypot(gb.x.values()[i], gb.y.values()[i]);
      acc += m * m;
    }
    return std::sqrt(acc / double(a.size()));
  };
  auto relative = [](const TorusField& lhs, const TorusField& rhs, double scale) {
    const int m = std::max(lhs.n(), rhs.n());
    const TorusField a = to_grid(lhs, m), b = to_grid(rhs, m);
    const double den = l2(a) + l2(b) + scale;
    const double num = l2(a - b);
    return den > 0.0 ? num / den : 0.0;
  };
  const double spp = term_scale(Pi, Pi), smm = term_scale(mu, mu);
  const double smp = term_scale(mu, Pi), spm = term_scale(Pi, mu);
  TorusField l1 = div_product(Pi, Pi);
  l1 += to_grid(div_product(mu, mu), l1.n());
  TorusField l2f = div_product(mu, Pi);
  l2f += to_grid(div_product(Pi, mu), l2f.n());
  return {relative(l1, div_rhs(Pi, s.G), spp + smm), relative(l2f, div_rhs(mu, s.Gt), smp + spm)};
}

TorusField random_band_limited(int n, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectralField s(n);
  const int R = int(std::floor(r));
  for (int k1 = -R; k1 <= R; ++k1)
    for (int k2 = 0; k2 <= R; ++k2)
      if (double(k1) * k1 + double(k2) * k2 <= r * r && (k2 > 0 || k1 > 0))
        s.set_coeff(k1, k2, {g(rng), g(rng)});
  TorusField f = inverse(s);
  f.set_band_limit(r);
  return f;
}

BoundProbeReport bound_probes(const BoundProbeConfig& cfg) {
  BoundProbeReport rep;
  const MultiplierSpec degree_zero[] = {symbols::riesz(1), symbols::riesz(2), symbols::odd_riesz(1),
                                        symbols::odd_riesz(2)};
  std::uint64_t seed = cfg.seed;
  for (int lambda : cfg.lambdas)
    for (double fac : cfg.r_factors) {
      BoundProbeRow row;
      row.lambda = lambda;
      row.r = fac * std::sqrt(double(lambda));
      row.in_hypothesis = row.r >= 10.0 && row.r <= 0.5 * lambda;
      if (!row.in_hypothesis) {
        rep.excluded.push_back(row);
        continue;
      }
      if (!(row.r < cfg.grid / 2.0))
        fail(ErrorCode::aliasing, "bound probe grid too small for the envelope band");
      const double lr = std::log(row.r);
      for (int sample = 0; sample < cfg.samples; ++sample) {
        const TorusField a = random_band_limited(cfg.grid, row.r, seed++);
        const double asup = sup_norm(a);
        for (Direction xi : kDirections) {
          const double lx = lambda * xi.x, ly = lambda * xi.y;
          if (lx != std::floor(lx) || ly != std::floor(ly)) continue;
          const TorusField a1 = t1(a, lambda, xi);
          const TorusField a2 = t2(a, lambda, xi);
          row.t1 = std::max(row.t1, sup_norm(a1) * lambda / (row.r * row.r * asup));
          row.t2 = std::max(row.t2, sup_norm(a2) * double(lambda) * lambda /
                                        (row.r * row.r * row.r * asup));
          const SpectralField s2 = transform(a2);
          double pot = 0.0;
          for (int l = 1; l <= 2; ++l) {
            SpectralField c = derivative(s2, l);
            c.multiply([](int k1, int k2) { return Complex(-1.0 / (double(k1) * k1 + double(k2) * k2)); });
            pot = std::max(pot, x_norm(c));
          }
          row.t2_potential =
              std::max(row.t2_potential, pot * double(lambda) * lambda / (row.r * row.r * asup * lr));
        }
        for (const MultiplierSpec& m : degree_zero)
          row.degree_zero = std::max(row.degree_zero, sup_norm(apply_multiplier(a, m)) / (asup * lr));
      }
      rep.t1 = std::max(rep.t1, row.t1);
      rep.t2 = std::max(rep.t2, row.t2);
      rep.t2_potential = std::max(rep.t2_potential, row.t2_potential);
      rep.degree_zero = std::max(rep.degree_zero, row.degree_zero);
      rep.rows.push_back(row);
    }
  return rep;
}

DecayTable decay_report(const std::vector<StageReport>& reports) {
  if (reports.size() < 2) fail(ErrorCode::invalid_argument, "decay report needs two states");
  DecayTable t;
  t.strictly_decreasing = true;
  t.all_ratios_below_one = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const StageReport& r = reports[i];
    DecayRow row;
    row.n = r.stage;
    row.parity = r.parity;
    row.lambda = r.lambda;
    row.delta = r.delta;
    row.Gt_X = r.Gt_X;
    if (i > 0) {
      const StageReport& q = reports[i - 1];
      row.ratio = q.Gt_X > 0.0 ? r.Gt_X / q.Gt_X : (r.Gt_X > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      row.delta_ratio = r.delta / q.delta;
      if (!(r.Gt_X < q.Gt_X)) t.strictly_decreasing = false;
      if (!(row.ratio < 1.0)) t.all_ratios_below_one = false;
      row.frac_D = r.GD_X / r.delta;
      row.frac_N = r.GN_X / r.delta;
      row.frac_R0 = r.GR0_X / r.delta;
      row.frac_NO = r.JNO_X / r.delta;
      double o = 0.0;
      for (double v : r.JO_X) o += v;
      row.frac_O = o / r.delta;
    }
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace sqgci
