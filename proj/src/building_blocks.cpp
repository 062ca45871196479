// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/building_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sqgci {

std::string_view to_string(Parity p) noexcept { return p == Parity::A ? "A" : "B"; }

std::string_view to_string(Part p) noexcept {
  switch (p) {
    case Part::curl: return "curl";
    case Part::main: return "main";
    case Part::no: return "NO";
    case Part::o1: return "O1";
    case Part::o2: return "O2";
    case Part::o3: return "O3";
    case Part::o4: return "O4";
    case Part::o5: return "O5";
    case Part::o6: return "O6";
  }
  return "?";
}

AmplitudePair make_amplitudes(const TorusField& stress_tilde, double delta_prev, int lambda_next,
                              double c0, Parity parity, double kappa,
                              double radicand_floor) {
  if (!(delta_prev > 0.0) || lambda_next < 1 || !(c0 > 0.0) || !(kappa > 0.0))
    fail(ErrorCode::invalid_argument, "make_amplitudes: delta, lambda, c0 and kappa must be positive");
  const SpectralField spec = transform(stress_tilde);
  if (std::abs(spec.raw(0, 0)) > 1e-9 * (sup_norm(stress_tilde) + 1e-300))
    fail(ErrorCode::invalid_argument, "make_amplitudes: stress must be mean-zero");

  AmplitudePair out;
  out.parity = parity;
  out.delta_prev = delta_prev;
  out.lambda_next = lambda_next;
  out.c0 = c0;
  out.kappa = kappa;
  out.stress_ratio = x_norm(spec) / delta_prev;

  const double sign = parity == Parity::A ? -1.0 : 1.0;
  const double pre = kappa * std::sqrt(2.0 * delta_prev / (5.0 * lambda_next));
  double min_rad = INFINITY;
  std::size_t clamped = 0;
  for (int j = 0; j < 2; ++j) {
    SpectralField r = spec;
    r.multiply([j](int k1, int k2) { return symbols::odd_riesz_symbol(j + 1, k1, k2); });
    TorusField a = inverse(r);
    for (double& v : a.values()) {
      double rad = c0 + sign * v / delta_prev;
      min_rad = std::min(min_rad, rad);
      if (radicand_floor > 0.0 && rad < radicand_floor) {
        rad = radicand_floor;
        ++clamped;
      }
      v = rad > 0.0 ? pre * std::sqrt(rad) : 0.0;
    }
    out.a[std::size_t(j)] = std::move(a);
  }
  out.min_radicand = min_rad;
  out.clamped_fraction = double(clamped) / (2.0 * double(stress_tilde.size()));
  if (!(min_rad > 0.0) && !(radicand_floor > 0.0))
    fail(ErrorCode::positivity,
         "amplitude radicand reaches " + std::to_string(min_rad) +
             " <= 0 (||G~||_X / delta = " + std::to_string(out.stress_ratio) + ")");
  return out;
}

Increment make_increment(const AmplitudePair& amps, int lambda, double r_cutoff,
                         double leakage_tol) {
  if (!(r_cutoff >= 1.0) || !(r_cutoff < lambda))
    fail(ErrorCode::invalid_argument, "make_increment: need 1 <= r < lambda");
  const int n = amps[0].n();
  Increment inc;
  inc.lambda = lambda;
  inc.r_cutoff = r_cutoff;
  for (int j = 0; j < 2; ++j) inc.carriers[std::size_t(j)] = carrier_vector(5 * lambda, kDirections[j]);
  const double band = 5.0 * lambda + r_cutoff;
  if (!(band < n / 2.0))
    fail(ErrorCode::aliasing, "increment band " + std::to_string(band) +
                                  " does not fit below Nyquist of grid " + std::to_string(n));

  for (int j = 0; j < 2; ++j) inc.envelopes[std::size_t(j)] = lowpass(amps[j], r_cutoff);

  const CarrierTable table(n);
  inc.M = TorusField(n);
  const auto& e0 = inc.envelopes[0];
  const auto& e1 = inc.envelopes[1];
  const Wavevector K0 = inc.carriers[0], K1 = inc.carriers[1];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inc.M(i, j) = e0(i, j) * table.cos_at(K0, i, j) + e1(i, j) * table.cos_at(K1, i, j);

  const SpectralField s = transform(inc.M);
  const double r2 = r_cutoff * r_cutoff;
  double outside = 0.0;
  s.for_each([&](int k1, int k2, const Complex& c) {
    auto near = [&](Wavevector K) {
      const double a = k1 - K.k1, b = k2 - K.k2, p = k1 + K.k1, q = k2 + K.k2;
      return a * a + b * b <= r2 || p * p + q * q <= r2;
    };
    if (!near(K0) && !near(K1)) {
      const double w = (k2 == 0 || k2 == n / 2) ? 1.0 : 2.0;
      outside += w * std::norm(c);
    }
  });
  const double total = s.energy();
  inc.leakage = total > 0.0 ? std::sqrt(outside / total) : 0.0;
  if (inc.leakage > leakage_tol)
    fail(ErrorCode::band_leakage,
         "increment leaks " + std::to_string(inc.leakage) + " of its L2 mass off the carrier discs");
  inc.M.set_band_limit(band);
  return inc;
}

VectorField nonlinear_term(const TorusField& M) {
  const int n = M.n();
  const double band = band_of(M);
  if (!(2.0 * band < n / 2.0))
    fail(ErrorCode::aliasing, "nonlinear_term: grid does not resolve twice the band of M");
  const SpectralField s = transform(M);
  const TorusField lm = inverse(apply(s, symbols::fractional_laplacian(1.0)));
  VectorField out{inverse(derivative(s, 2)), inverse(derivative(s, 1))};
  auto x = out.x.values(), y = out.y.values();
  auto l = lm.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= -l[i];
    y[i] *= l[i];
  }
  out.x.set_band_limit(2.0 * band);
  out.y.set_band_limit(2.0 * band);
  return out;
}

namespace {

// Per-direction ingredients of the splitting.
struct Envelope {
  const TorusField* e = nullptr;
  TorusField px, py;  // perp-grad e
  TorusField along;   // xi.grad e
  TorusField t1e, t2e;
  Wavevector K, K2;
  Direction perp;
};

}  // namespace

void for_each_part(const Increment& inc, const std::function<void(Part, VectorField&&)>& sink) {
  const int n = inc.M.n();
  const double band = inc.lambda_c() + inc.r_cutoff;
  if (!(2.0 * band < n / 2.0))
    fail(ErrorCode::aliasing, "decomposition: grid does not resolve twice the band of M");
  const double lc = inc.lambda_c();
  const CarrierTable table(n);

  std::array<Envelope, 2> env;
  for (int j = 0; j < 2; ++j) {
    Envelope& v = env[std::size_t(j)];
    const Direction xi = kDirections[j];
    v.e = &inc.envelopes[std::size_t(j)];
    v.K = inc.carriers[std::size_t(j)];
    v.K2 = {2 * v.K.k1, 2 * v.K.k2};
    v.perp = xi.perp();
    const SpectralField s = transform(*v.e);
    const SpectralField d1 = derivative(s, 1), d2 = derivative(s, 2);
    SpectralField nd2 = d2;
    nd2 *= -1.0;
    v.px = inverse(nd2);
    v.py = inverse(d1);
    SpectralField al = d1;
    al *= xi.x;
    SpectralField ay = d2;
    ay *= xi.y;
    al += ay;
    v.along = inverse(al);
    v.t1e = inverse(t1(s, v.K));
    v.t2e = inverse(t2(s, v.K));
  }

  const double bound = 2.0 * band;
  auto emit = [&](Part p, auto&& point) {
    VectorField f{TorusField(n), TorusField(n)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) point(i, j, f.x(i, j), f.y(i, j));
    f.x.set_band_limit(bound);
    f.y.set_band_limit(bound);
    sink(p, std::move(f));
  };

  {
    const VectorField pg = perp_gradient(inc.M);
    emit(Part::curl, [&](int i, int j, double& x, double& y) {
      const double m = lc * inc.M(i, j);
      x = m * pg.x(i, j);
      y = m * pg.y(i, j);
    });
  }

  emit(Part::main, [&](int i, int j, double& x, double& y) {
    x = y = 0.0;
    for (const Envelope& v : env) {
      const double w = -0.5 * lc * (*v.e)(i, j) * v.along(i, j);
      x += w * v.perp.x;
      y += w * v.perp.y;
    }
  });

  emit(Part::no, [&](int i, int j, double& x, double& y) {
    x = y = 0.0;
    for (const Envelope& v : env) {
      const double w = -0.5 * lc * v.t2e(i, j) * (*v.e)(i, j);
      const double c = 0.5 * v.t1e(i, j);
      x += w * v.perp.x + c * v.px(i, j);
      y += w * v.perp.y + c * v.py(i, j);
    }
  });

  emit(Part::o1, [&](int i, int j, double& x, double& y) {
    x = y = 0.0;
    for (const Envelope& v : env) {
      const double cs = table.cos_at(v.K2, i, j);
      const double s = v.along(i, j) + v.t2e(i, j);
      const double w = 0.5 * lc * s * (*v.e)(i, j) * cs;
      const double c = 0.5 * v.t1e(i, j) * cs;
      x += w * v.perp.x + c * v.px(i, j);
      y += w * v.perp.y + c * v.py(i, j);
    }
  });

  emit(Part::o2, [&](int i, int j, double& x, double& y) {
    x = y = 0.0;
    for (const Envelope& v : env) {
      const double sn = table.sin_at(v.K2, i, j);
      const double s = 0.5 * (v.along(i, j) + v.t2e(i, j)) * sn;
      const double w = -0.5 * lc * v.t1e(i, j) * (*v.e)(i, j) * sn;
      x += s * v.px(i, j) + w * v.perp.x;
      y += s * v.py(i, j) + w * v.perp.y;
    }
  });

  // Cross interactions: j is the factor from Lambda M, l the one under perp-grad.
  auto cross = [&](Part p, auto&& term) {
    emit(p, [&](int i, int j, double& x, double& y) {
      x = y = 0.0;
      for (int a = 0; a < 2; ++a) {
        const Envelope& v = env[std::size_t(a)];
        const Envelope& u = env[std::size_t(1 - a)];
        term(i, j, v, u, x, y);
      }
    });
  };

  cross(Part::o3, [&](int i, int j, const Envelope& v, const Envelope& u, double& x, double& y) {
    const double s = v.along(i, j) + v.t2e(i, j);
    const double w = -lc * s * (*u.e)(i, j) * table.sin_at(v.K, i, j) * table.sin_at(u.K, i, j);
    x += w * u.perp.x;
    y += w * u.perp.y;
  });
  cross(Part::o4, [&](int i, int j, const Envelope& v, const Envelope& u, double& x, double& y) {
    const double s = (v.along(i, j) + v.t2e(i, j)) * table.sin_at(v.K, i, j) * table.cos_at(u.K, i, j);
    x += s * u.px(i, j);
    y += s * u.py(i, j);
  });
  cross(Part::o5, [&](int i, int j, const Envelope& v, const Envelope& u, double& x, double& y) {
    const double w = -lc * v.t1e(i, j) * (*u.e)(i, j) * table.cos_at(v.K, i, j) * table.sin_at(u.K, i, j);
    x += w * u.perp.x;
    y += w * u.perp.y;
  });
  cross(Part::o6, [&](int i, int j, const Envelope& v, const Envelope& u, double& x, double& y) {
    const double c = v.t1e(i, j) * table.cos_at(v.K, i, j) * table.cos_at(u.K, i, j);
    x += c * u.px(i, j);
    y += c * u.py(i, j);
  });
}

VectorField NonlinearDecomposition::sum() const {
  VectorField s = parts[0];
  for (int p = 1; p < kPartCount; ++p) s += parts[std::size_t(p)];
  return s;
}

TorusField NonlinearDecomposition::potential(Part p) const {
  return gradient_part(parts[std::size_t(p)]);
}

NonlinearDecomposition decompose_nonlinear(const Increment& inc) {
  NonlinearDecomposition d;
  for_each_part(inc, [&](Part p, VectorField&& v) { d.parts[std::size_t(p)] = std::move(v); });
  return d;
}

double reconstruction_error(const Increment& inc, const NonlinearDecomposition& parts) {
  const VectorField q = nonlinear_term(inc.M);
  const VectorField s = parts.sum();
  const double scale = std::max({sup_norm(q.x), sup_norm(q.y), 1e-300});
  return std::max(sup_norm(q.x - s.x), sup_norm(q.y - s.y)) / scale;
}

KappaCalibration calibrate_kappa(int n, int lambda, double c0) {
  const double delta = 1.0;
  const double r = std::max(4.0, std::floor(std::sqrt(double(lambda))) * 2.0);
  TorusField stress = plane_wave(n, {1, 0}, Phase::cosine, 0.05 * delta);
  const double ref = x_norm(stress);

  KappaCalibration out;
  const double candidates[2] = {1.0, std::sqrt(2.0)};
  for (int c = 0; c < 2; ++c) {
    const AmplitudePair amps = make_amplitudes(stress, delta, lambda, c0, Parity::A, candidates[c]);
    const Increment inc = make_increment(amps, lambda, r);
    TorusField residual = stress;
    residual.add_scaled(-2.0, gradient_part(nonlinear_term(inc.M)));
    out.residual[std::size_t(c)] = x_norm(lowpass(residual, r)) / ref;
  }
  out.kappa = out.residual[0] <= out.residual[1] ? candidates[0] : candidates[1];
  return out;
}

}  // namespace sqgci
