// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Fourier-multiplier calculus on the torus [0, 2pi)^2.
//
// Fields are sampled on a uniform N x N grid, N a power of two, sample (i, j)
// at x = (2 pi i / N, 2 pi j / N), stored row-major. Spectral coefficients are
// normalized so that f(x) = sum_k c(k) exp(i k.x); they are stored as the
// non-redundant half plane k2 >= 0 and the rest follows by Hermitian symmetry.
//
// Every multiplier drops the Nyquist lines |k1| = N/2 and k2 = N/2. All fields
// produced by the engine are band-limited strictly below Nyquist.

#ifndef SQGCI_SPECTRAL_HPP
#define SQGCI_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <new>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sqgci/error.hpp"

namespace sqgci {

using Complex = std::complex<double>;

namespace detail {

// 64-byte aligned storage lets the FFT backend use its SIMD code paths.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  // Default-initializes on resize, so buffers about to be overwritten are not zeroed first.
  template <class U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

/// Tag for constructors that leave the contents unspecified.
struct NoInit {};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

}  // namespace detail

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Wavevector {
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const Wavevector&, const Wavevector&) = default;
  double norm() const { return std::hypot(double(k1), double(k2)); }
};

bool is_power_of_two(int n) noexcept;
void require_power_of_two(int n);

/// Real scalar field on the N x N torus grid.
class TorusField {
 public:
  TorusField() = default;
  explicit TorusField(int n);
  /// Unspecified samples; for buffers that are overwritten completely.
  TorusField(int n, detail::NoInit);
  TorusField(int n, std::vector<double> samples);

  /// Samples f(x1, x2) at the grid points.
  template <class F>
  static TorusField sample(int n, F&& f) {
    TorusField out(n);
    const double h = kTwoPi / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = f(h * i, h * j);
    return out;
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator()(int i, int j) {
    return values_[std::size_t(i) * std::size_t(n_) + std::size_t(j)];
  }
  double operator()(int i, int j) const {
    return values_[std::size_t(i) * std::size_t(n_) + std::size_t(j)];
  }

  /// Declared maximal active frequency radius, if known.
  std::optional<double> band_limit() const noexcept { return band_; }
  void set_band_limit(std::optional<double> r) noexcept { band_ = r; }

  double mean() const;
  bool all_finite() const;

  TorusField& operator+=(const TorusField& other);
  TorusField& operator-=(const TorusField& other);
  TorusField& operator*=(double s);
  /// this += s * other
  TorusField& add_scaled(double s, const TorusField& other);

  friend TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
  friend TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
  friend TorusField operator*(TorusField a, double s) { return a *= s; }
  friend TorusField operator*(double s, TorusField a) { return a *= s; }

  /// Bitwise equality of the samples.
  bool identical_to(const TorusField& other) const;

 private:
  int n_ = 0;
  detail::AlignedVector<double> values_;
  std::optional<double> band_;
};

struct VectorField {
  TorusField x;
  TorusField y;

  int n() const noexcept { return x.n(); }
  VectorField& operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  VectorField& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

/// Half-plane Fourier coefficients of a real field.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int n);
  /// Unspecified coefficients; for buffers that are overwritten completely.
  SpectralField(int n, detail::NoInit);

  int n() const noexcept { return n_; }
  int half() const noexcept { return n_ / 2 + 1; }

  /// Coefficient at any k in (-N/2, N/2]^2; Hermitian symmetry supplies k2 < 0.
  Complex coeff(int k1, int k2) const;
  void set_coeff(int k1, int k2, Complex c);

  Complex& raw(int i1, int i2) {
    return data_[std::size_t(i1) * std::size_t(half()) + std::size_t(i2)];
  }
  const Complex& raw(int i1, int i2) const {
    return data_[std::size_t(i1) * std::size_t(half()) + std::size_t(i2)];
  }
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  int wavenumber(int index) const noexcept {
    return index <= n_ / 2 ? index : index - n_;
  }
  bool is_nyquist(int i1, int i2) const noexcept {
    return i1 == n_ / 2 || i2 == n_ / 2;
  }

  /// Visits every stored coefficient as f(k1, k2, coefficient&).
  template <class F>
  void for_each(F&& f) {
    const int h = half();
    for (int i1 = 0; i1 < n_; ++i1) {
      const int k1 = wavenumber(i1);
      Complex* row = data_.data() + std::size_t(i1) * std::size_t(h);
      for (int i2 = 0; i2 < h; ++i2) f(k1, i2, row[i2]);
    }
  }
  template <class F>
  void for_each(F&& f) const {
    const int h = half();
    for (int i1 = 0; i1 < n_; ++i1) {
      const int k1 = wavenumber(i1);
      const Complex* row = data_.data() + std::size_t(i1) * std::size_t(h);
      for (int i2 = 0; i2 < h; ++i2) f(k1, i2, row[i2]);
    }
  }

  /// Multiplies every coefficient by sym(k1, k2); Nyquist lines are zeroed and
  /// the zero mode receives zero_mode * c(0). Zero coefficients stay zero
  /// without evaluating sym.
  template <class Sym>
  SpectralField& multiply(Sym&& sym, Complex zero_mode = 0.0) {
    const int h = half();
    for (int i1 = 0; i1 < n_; ++i1) {
      const int k1 = wavenumber(i1);
      Complex* row = data_.data() + std::size_t(i1) * std::size_t(h);
      for (int i2 = 0; i2 < h; ++i2) {
        if (is_nyquist(i1, i2)) {
          row[i2] = 0.0;
        } else if (k1 == 0 && i2 == 0) {
          row[i2] *= zero_mode;
        } else if (row[i2] != Complex(0.0)) {
          // Band-limited inputs are mostly zero; symbols are only evaluated
          // where they matter. Plain product, no inf/nan recovery.
          const Complex m = sym(k1, i2);
          const double re = row[i2].real(), im = row[i2].imag();
          row[i2] = Complex(re * m.real() - im * m.imag(), re * m.imag() + im * m.real());
        }
      }
    }
    if (zero_mode == 0.0) mean_zero = true;
    return *this;
  }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(Complex s);

  /// Sum over the full plane of |c(k)|^2 (Parseval: equals mean of f^2).
  double energy() const;
  /// Largest |k| carrying a coefficient above rel_tol * max |c|.
  double active_radius(double rel_tol = 1e-13) const;

  bool mean_zero = false;

 private:
  int n_ = 0;
  detail::AlignedVector<Complex> data_;
};

SpectralField transform(const TorusField& field);
TorusField inverse(const SpectralField& spec);
/// Same, reusing the storage of spec as FFT scratch space.
TorusField inverse(SpectralField&& spec);

/// Fourier multiplier: output coefficient = symbol(k) * input coefficient.
struct MultiplierSpec {
  std::function<Complex(int, int)> symbol;
  Complex zero_mode = 0.0;
};

SpectralField apply(const SpectralField& spec, const MultiplierSpec& m);
TorusField apply_multiplier(const TorusField& field, const MultiplierSpec& m);

namespace symbols {

/// Lambda^s = (-Laplacian)^(s/2), symbol |k|^s.
MultiplierSpec fractional_laplacian(double s);
/// d/dx_l, symbol i k_l (l = 1, 2).
MultiplierSpec derivative(int l);
/// Riesz transform R_l = d_l Lambda^{-1}, symbol i k_l / |k|.
MultiplierSpec riesz(int l);
/// Even second-order Riesz combinations paired with the directions
/// xi_1 = (3/5, 4/5), xi_2 = (1, 0).
MultiplierSpec odd_riesz(int j);
/// Inverse Laplacian, symbol -1/|k|^2.
MultiplierSpec inverse_laplacian();

double odd_riesz_symbol(int j, int k1, int k2);

}  // namespace symbols

/// Delta^{-1} div v: the Helmholtz gradient potential of v (mean zero).
SpectralField div_inverse_laplacian(const SpectralField& vx, const SpectralField& vy);
TorusField gradient_part(const VectorField& v);

/// Delta^{-1} curl v with curl v = d1 v2 - d2 v1; the perpendicular-gradient
/// potential F of v, i.e. v = grad(gradient_part) + perp_grad(F).
TorusField curl_part(const VectorField& v);

VectorField gradient(const TorusField& f);
/// (-d2 f, d1 f)
VectorField perp_gradient(const TorusField& f);
SpectralField derivative(const SpectralField& f, int l);

/// Sharp Euclidean projection onto |k| <= r.
TorusField lowpass(const TorusField& field, double r);
/// Complement of lowpass: keeps |k| > r.
TorusField highpass(const TorusField& field, double r);

/// Zero-pads or truncates the spectrum onto an m x m grid.
TorusField resample(const TorusField& field, int m);

/// Grid size a product of two fields with the given bands needs to be exact.
int product_grid(double band_f, double band_g, int n_min);

/// Exact product of two trigonometric polynomials. When the combined band
/// does not fit below the Nyquist frequency of the input grid the factors are
/// zero-padded onto the smallest power-of-two grid that holds it and the
/// result lives on that grid. Declared band limits are used when present;
/// otherwise the active radius is measured.
TorusField dealiased_product(const TorusField& f, const TorusField& g,
                             int max_grid = 16384);

/// Largest active radius of a field (declared band if present).
double band_of(const TorusField& f);

enum class NormKind { sup, X, holder };

double sup_norm(const TorusField& f);
/// ||f||_inf + ||R1o f||_inf + ||R2o f||_inf; f must be mean-zero.
double x_norm(const TorusField& f);
double x_norm(const SpectralField& spec);
/// Dyadic-block proxy: ||P_{<=1} f||_inf + max_j 2^{js} ||Delta_j f||_inf
/// with Delta_j the annulus 2^j <= |k| < 2^{j+1}.
double holder_norm(const TorusField& f, double s);

/// Block sups behind holder_norm, reusable for several exponents.
struct DyadicProfile {
  double low = 0.0;            // ||P_{<=1} f||_inf
  std::vector<double> blocks;  // ||Delta_j f||_inf, j = 0, 1, ...

  double holder(double s) const;
};
DyadicProfile dyadic_profile(const TorusField& f);
double norm(const TorusField& f, NormKind kind, double s = 0.0);

/// cos or sin of k.x sampled on the grid with exact integer phase reduction.
class CarrierTable {
 public:
  explicit CarrierTable(int n);
  int n() const noexcept { return n_; }
  double cos_at(Wavevector k, int i, int j) const noexcept {
    return cos_[phase(k, i, j)];
  }
  double sin_at(Wavevector k, int i, int j) const noexcept {
    return sin_[phase(k, i, j)];
  }

 private:
  // n is a power of two, so masking the two's-complement phase reduces mod n.
  std::size_t phase(Wavevector k, int i, int j) const noexcept {
    const long long p = static_cast<long long>(k.k1) * i + static_cast<long long>(k.k2) * j;
    return static_cast<std::size_t>(static_cast<unsigned long long>(p) & mask_);
  }
  int n_;
  unsigned long long mask_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

enum class Phase { cosine, sine };

TorusField plane_wave(int n, Wavevector k, Phase phase, double amplitude = 1.0);

}  // namespace sqgci

#endif  // SQGCI_SPECTRAL_HPP
