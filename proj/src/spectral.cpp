// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "fft_backend.hpp"

namespace sqgci {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::positivity: return "amplitude positivity failure";
    case ErrorCode::consistency: return "internal consistency failure";
    case ErrorCode::band_leakage: return "band leakage";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::invalid_params: return "invalid parameters";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

bool is_power_of_two(int n) noexcept { return n >= 2 && (n & (n - 1)) == 0; }

void require_power_of_two(int n) {
  if (!is_power_of_two(n))
    fail(ErrorCode::invalid_argument,
         "grid size must be a power of two >= 2, got " + std::to_string(n));
}

namespace {

void require_same_grid(const TorusField& a, const TorusField& b) {
  if (a.n() != b.n())
    fail(ErrorCode::invalid_argument, "grid mismatch: " + std::to_string(a.n()) +
                                          " vs " + std::to_string(b.n()));
}

double sq(double x) { return x * x; }

}  // namespace

// ---------------------------------------------------------------------------
// TorusField

TorusField::TorusField(int n) : n_(n) {
  require_power_of_two(n);
  values_.assign(std::size_t(n) * std::size_t(n), 0.0);
}

TorusField::TorusField(int n, detail::NoInit) : n_(n) {
  require_power_of_two(n);
  values_.resize(std::size_t(n) * std::size_t(n));
}

TorusField::TorusField(int n, std::vector<double> samples)
    : n_(n), values_(samples.begin(), samples.end()) {
  require_power_of_two(n);
  if (values_.size() != std::size_t(n) * std::size_t(n))
    fail(ErrorCode::invalid_argument, "sample count does not match N*N");
}

double TorusField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return values_.empty() ? 0.0 : s / double(values_.size());
}

bool TorusField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

TorusField& TorusField::operator+=(const TorusField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  if (band_ && other.band_) band_ = std::max(*band_, *other.band_);
  else band_.reset();
  return *this;
}

TorusField& TorusField::operator-=(const TorusField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  if (band_ && other.band_) band_ = std::max(*band_, *other.band_);
  else band_.reset();
  return *this;
}

TorusField& TorusField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

TorusField& TorusField::add_scaled(double s, const TorusField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  if (band_ && other.band_) band_ = std::max(*band_, *other.band_);
  else band_.reset();
  return *this;
}

bool TorusField::identical_to(const TorusField& other) const {
  if (n_ != other.n_) return false;
  return std::equal(values_.begin(), values_.end(), other.values_.begin(),
                    [](double a, double b) {
                      return std::memcmp(&a, &b, sizeof(double)) == 0;
                    });
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(int n) : n_(n) {
  require_power_of_two(n);
  data_.assign(std::size_t(n) * std::size_t(n / 2 + 1), Complex(0.0));
}

SpectralField::SpectralField(int n, detail::NoInit) : n_(n) {
  require_power_of_two(n);
  data_.resize(std::size_t(n) * std::size_t(n / 2 + 1));
}

Complex SpectralField::coeff(int k1, int k2) const {
  auto wrap = [this](int k) { return ((k % n_) + n_) % n_; };
  if (k2 >= 0) return raw(wrap(k1), k2);
  return std::conj(raw(wrap(-k1), -k2));
}

void SpectralField::set_coeff(int k1, int k2, Complex c) {
  auto wrap = [this](int k) { return ((k % n_) + n_) % n_; };
  if (k2 < 0) {
    k1 = -k1;
    k2 = -k2;
    c = std::conj(c);
  }
  raw(wrap(k1), k2) = c;
  if (k2 == 0 || k2 == n_ / 2) raw(wrap(-k1), k2) = std::conj(c);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.n_ != n_) fail(ErrorCode::invalid_argument, "spectral grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  mean_zero = mean_zero && other.mean_zero;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (Complex& c : data_)
    c = Complex(c.real() * s.real() - c.imag() * s.imag(), c.real() * s.imag() + c.imag() * s.real());
  return *this;
}

double SpectralField::energy() const {
  double e = 0.0;
  const int h = half();
  for (int i1 = 0; i1 < n_; ++i1) {
    for (int i2 = 0; i2 < h; ++i2) {
      const double w = (i2 == 0 || i2 == n_ / 2) ? 1.0 : 2.0;
      e += w * std::norm(raw(i1, i2));
    }
  }
  return e;
}

double SpectralField::active_radius(double rel_tol) const {
  double cmax = 0.0;
  for (const Complex& c : data_) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return 0.0;
  const double thr = rel_tol * cmax;
  double r2 = 0.0;
  for_each([&](int k1, int k2, const Complex& c) {
    if (std::abs(c) > thr) r2 = std::max(r2, double(k1) * k1 + double(k2) * k2);
  });
  return std::sqrt(r2);
}

// ---------------------------------------------------------------------------
// transforms

SpectralField transform(const TorusField& field) {
  require_power_of_two(field.n());
  const int n = field.n();
  SpectralField out(n, detail::NoInit{});
  detail::fft_forward(n, field.values().data(), out.data().data());
  // A non-finite sample reaches every coefficient, so checking the output
  // during normalization covers the input.
  const double scale = 1.0 / (double(n) * double(n));
  bool finite = true;
  for (Complex& c : out.data()) {
    c = Complex(c.real() * scale, c.imag() * scale);
    finite &= std::isfinite(c.real()) & std::isfinite(c.imag());
  }
  if (!finite) fail(ErrorCode::non_finite, "transform: non-finite samples");
  out.mean_zero = out.raw(0, 0) == 0.0;
  return out;
}

TorusField inverse(const SpectralField& spec) { return inverse(SpectralField(spec)); }

TorusField inverse(SpectralField&& spec) {
  // The c2r transform overwrites its input.
  const int n = spec.n();
  TorusField out(n, detail::NoInit{});
  detail::fft_backward(n, spec.data().data(), out.values().data());
  return out;
}

SpectralField apply(const SpectralField& spec, const MultiplierSpec& m) {
  SpectralField out = spec;
  out.multiply(
      [&](int k1, int k2) {
        const Complex s = m.symbol(k1, k2);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
          fail(ErrorCode::non_finite, "multiplier symbol is non-finite at k = (" +
                                          std::to_string(k1) + ", " + std::to_string(k2) + ")");
        return s;
      },
      m.zero_mode);
  out.mean_zero = m.zero_mode == 0.0 || spec.mean_zero;
  return out;
}

TorusField apply_multiplier(const TorusField& field, const MultiplierSpec& m) {
  TorusField out = inverse(apply(transform(field), m));
  out.set_band_limit(field.band_limit());
  return out;
}

// ---------------------------------------------------------------------------
// symbols

namespace symbols {

double odd_riesz_symbol(int j, int k1, int k2) {
  const double a = k1, b = k2;
  const double kk = a * a + b * b;
  if (kk == 0.0) return 0.0;
  if (j == 1) return 25.0 * (b * b - a * a) / (12.0 * kk);
  return 7.0 * (b * b - a * a) / (12.0 * kk) + 4.0 * a * b / kk;
}

MultiplierSpec fractional_laplacian(double s) {
  // |k|^2 is exact for integer k, so sqrt gives the correctly rounded |k|.
  if (s == 1.0)
    return {[](int k1, int k2) { return Complex(std::sqrt(double(k1) * k1 + double(k2) * k2)); }, 0.0};
  if (s == 2.0) return {[](int k1, int k2) { return Complex(double(k1) * k1 + double(k2) * k2); }, 0.0};
  return {[s](int k1, int k2) {
            return Complex(std::pow(double(k1) * k1 + double(k2) * k2, 0.5 * s));
          },
          s == 0.0 ? Complex(1.0) : Complex(0.0)};
}

MultiplierSpec derivative(int l) {
  if (l != 1 && l != 2) fail(ErrorCode::invalid_argument, "derivative index must be 1 or 2");
  return {[l](int k1, int k2) { return Complex(0.0, l == 1 ? k1 : k2); }, 0.0};
}

MultiplierSpec riesz(int l) {
  if (l != 1 && l != 2) fail(ErrorCode::invalid_argument, "Riesz index must be 1 or 2");
  return {[l](int k1, int k2) {
            return Complex(0.0, (l == 1 ? k1 : k2) / std::sqrt(double(k1) * k1 + double(k2) * k2));
          },
          0.0};
}

MultiplierSpec odd_riesz(int j) {
  if (j != 1 && j != 2) fail(ErrorCode::invalid_argument, "odd Riesz index must be 1 or 2");
  return {[j](int k1, int k2) { return Complex(odd_riesz_symbol(j, k1, k2)); }, 0.0};
}

MultiplierSpec inverse_laplacian() {
  return {[](int k1, int k2) { return Complex(-1.0 / (double(k1) * k1 + double(k2) * k2)); },
          0.0};
}

}  // namespace symbols

// ---------------------------------------------------------------------------
// vector calculus

SpectralField div_inverse_laplacian(const SpectralField& vx, const SpectralField& vy) {
  if (vx.n() != vy.n()) fail(ErrorCode::invalid_argument, "vector components on different grids");
  const int n = vx.n();
  SpectralField out(n);
  const int h = out.half();
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = out.wavenumber(i1);
    for (int k2 = 0; k2 < h; ++k2) {
      if (out.is_nyquist(i1, k2) || (k1 == 0 && k2 == 0)) continue;
      const double kk = double(k1) * k1 + double(k2) * k2;
      const Complex div = Complex(0.0, 1.0) * (double(k1) * vx.raw(i1, k2) + double(k2) * vy.raw(i1, k2));
      out.raw(i1, k2) = -div / kk;
    }
  }
  out.mean_zero = true;
  return out;
}

TorusField gradient_part(const VectorField& v) {
  TorusField out = inverse(div_inverse_laplacian(transform(v.x), transform(v.y)));
  if (v.x.band_limit() && v.y.band_limit())
    out.set_band_limit(std::max(*v.x.band_limit(), *v.y.band_limit()));
  return out;
}

TorusField curl_part(const VectorField& v) {
  const SpectralField sx = transform(v.x);
  const SpectralField sy = transform(v.y);
  SpectralField out(v.n());
  const int n = v.n();
  const int h = out.half();
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = out.wavenumber(i1);
    for (int k2 = 0; k2 < h; ++k2) {
      if (out.is_nyquist(i1, k2) || (k1 == 0 && k2 == 0)) continue;
      const double kk = double(k1) * k1 + double(k2) * k2;
      const Complex curl = Complex(0.0, 1.0) * (double(k1) * sy.raw(i1, k2) - double(k2) * sx.raw(i1, k2));
      out.raw(i1, k2) = -curl / kk;
    }
  }
  return inverse(out);
}

SpectralField derivative(const SpectralField& f, int l) {
  SpectralField out = f;
  out.multiply([l](int k1, int k2) { return Complex(0.0, l == 1 ? k1 : k2); });
  return out;
}

VectorField gradient(const TorusField& f) {
  const SpectralField s = transform(f);
  VectorField g{inverse(derivative(s, 1)), inverse(derivative(s, 2))};
  g.x.set_band_limit(f.band_limit());
  g.y.set_band_limit(f.band_limit());
  return g;
}

VectorField perp_gradient(const TorusField& f) {
  const SpectralField s = transform(f);
  VectorField g{inverse(derivative(s, 2)) * -1.0, inverse(derivative(s, 1))};
  g.x.set_band_limit(f.band_limit());
  g.y.set_band_limit(f.band_limit());
  return g;
}

TorusField lowpass(const TorusField& field, double r) {
  if (!(r >= 1.0)) fail(ErrorCode::invalid_argument, "lowpass radius must be >= 1");
  SpectralField s = transform(field);
  const double r2 = r * r;
  s.multiply([r2](int k1, int k2) { return double(k1) * k1 + double(k2) * k2 <= r2 ? 1.0 : 0.0; },
             1.0);
  TorusField out = inverse(s);
  out.set_band_limit(field.band_limit() ? std::min(r, *field.band_limit()) : r);
  return out;
}

TorusField highpass(const TorusField& field, double r) {
  SpectralField s = transform(field);
  const double r2 = r * r;
  s.multiply([r2](int k1, int k2) { return double(k1) * k1 + double(k2) * k2 > r2 ? 1.0 : 0.0; },
             0.0);
  TorusField out = inverse(s);
  out.set_band_limit(field.band_limit());
  return out;
}

TorusField resample(const TorusField& field, int m) {
  require_power_of_two(m);
  if (m == field.n()) return field;
  const SpectralField s = transform(field);
  SpectralField t(m);
  const int lim = std::min(field.n(), m) / 2;  // strict: Nyquist of the smaller grid dropped
  for (int k1 = -lim + 1; k1 < lim; ++k1)
    for (int k2 = 0; k2 < lim; ++k2) t.set_coeff(k1, k2, s.coeff(k1, k2));
  TorusField out = inverse(t);
  out.set_band_limit(field.band_limit());
  return out;
}

int product_grid(double band_f, double band_g, int n_min) {
  int m = n_min;
  while (!(band_f + band_g < m / 2.0)) m *= 2;
  return m;
}

double band_of(const TorusField& f) {
  if (f.band_limit()) return *f.band_limit();
  return transform(f).active_radius();
}

TorusField dealiased_product(const TorusField& f, const TorusField& g, int max_grid) {
  const double bf = band_of(f);
  const double bg = band_of(g);
  const int n0 = std::max(f.n(), g.n());
  const int m = product_grid(bf, bg, n0);
  if (m > max_grid)
    fail(ErrorCode::aliasing, "product band " + std::to_string(bf + bg) +
                                  " exceeds the Nyquist frequency of the largest grid " +
                                  std::to_string(max_grid));
  TorusField out = m == f.n() ? f : resample(f, m);
  const TorusField gm = m == g.n() ? g : resample(g, m);
  auto ov = out.values();
  auto gv = gm.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= gv[i];
  out.set_band_limit(bf + bg);
  return out;
}

// ---------------------------------------------------------------------------
// norms

double sup_norm(const TorusField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// sup |R1o f| + sup |R2o f|
double odd_riesz_sups(const SpectralField& s) {
  SpectralField r1 = s, r2 = s;
  r1.multiply([](int k1, int k2) { return symbols::odd_riesz_symbol(1, k1, k2); });
  r2.multiply([](int k1, int k2) { return symbols::odd_riesz_symbol(2, k1, k2); });
  return sup_norm(inverse(r1)) + sup_norm(inverse(r2));
}

}  // namespace

double x_norm(const TorusField& f) {
  const double sup = sup_norm(f);
  if (std::abs(f.mean()) > 1e-9 * sup + 1e-300)
    fail(ErrorCode::invalid_argument, "X norm requires a mean-zero field");
  return sup + odd_riesz_sups(transform(f));
}

double x_norm(const SpectralField& spec) {
  SpectralField s = spec;
  const double mean = std::abs(s.raw(0, 0));
  s.raw(0, 0) = 0.0;
  const double sup = sup_norm(inverse(s));
  if (mean > 1e-9 * sup + 1e-300)
    fail(ErrorCode::invalid_argument, "X norm requires a mean-zero field");
  return sup + odd_riesz_sups(s);
}

DyadicProfile dyadic_profile(const TorusField& f) {
  const SpectralField spec = transform(f);
  double cmax = 0.0;
  for (const Complex& c : spec.data()) cmax = std::max(cmax, std::abs(c));
  const double skip = 1e-14 * cmax;

  // The zero mode belongs to the low block only.
  auto block_sup = [&](double lo2, double hi2) {
    const bool with_mean = lo2 == 0.0;
    bool active = false;
    spec.for_each([&](int k1, int k2, const Complex& c) {
      const double kk = double(k1) * k1 + double(k2) * k2;
      if ((kk > 0 || with_mean) && kk >= lo2 && kk < hi2 && std::abs(c) > skip) active = true;
    });
    if (!active) return 0.0;
    SpectralField b = spec;
    b.multiply(
        [&](int k1, int k2) {
          const double kk = double(k1) * k1 + double(k2) * k2;
          return (kk >= lo2 && kk < hi2) ? 1.0 : 0.0;
        },
        with_mean ? 1.0 : 0.0);
    return sup_norm(inverse(b));
  };

  DyadicProfile p;
  p.low = block_sup(0.0, 1.0 + 1e-9);
  const double kmax2 = 2.0 * sq(f.n() / 2.0);
  for (int j = 0; sq(std::ldexp(1.0, j)) <= kmax2; ++j) {
    const double lo = std::ldexp(1.0, j), hi = std::ldexp(1.0, j + 1);
    p.blocks.push_back(block_sup(lo * lo, hi * hi));
  }
  return p;
}

double DyadicProfile::holder(double s) const {
  if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "Hoelder exponent must be >= 0");
  double best = 0.0;
  for (std::size_t j = 0; j < blocks.size(); ++j)
    best = std::max(best, std::pow(std::ldexp(1.0, int(j)), s) * blocks[j]);
  return low + best;
}

double holder_norm(const TorusField& f, double s) {
  if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "Hoelder exponent must be >= 0");
  return dyadic_profile(f).holder(s);
}

double norm(const TorusField& f, NormKind kind, double s) {
  switch (kind) {
    case NormKind::sup: return sup_norm(f);
    case NormKind::X: return x_norm(f);
    case NormKind::holder: return holder_norm(f, s);
  }
  fail(ErrorCode::invalid_argument, "unknown norm kind");
}

// ---------------------------------------------------------------------------
// carriers

CarrierTable::CarrierTable(int n)
    : n_(n), mask_(static_cast<unsigned long long>(n) - 1), cos_(std::size_t(n)), sin_(std::size_t(n)) {
  require_power_of_two(n);
  for (int m = 0; m < n; ++m) {
    const double t = kTwoPi * m / n;
    cos_[std::size_t(m)] = std::cos(t);
    sin_[std::size_t(m)] = std::sin(t);
  }
}

TorusField plane_wave(int n, Wavevector k, Phase phase, double amplitude) {
  const CarrierTable table(n);
  TorusField out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = amplitude * (phase == Phase::cosine ? table.cos_at(k, i, j) : table.sin_at(k, i, j));
  out.set_band_limit(k.norm());
  return out;
}

}  // namespace sqgci
