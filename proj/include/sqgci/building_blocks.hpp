// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Amplitudes, increments and the exact splitting of Lambda M perp-grad M.
//
// The increment is M = sum_j e_j cos(K_j.x) with e_j = P_{<=r} a_j and
// K_j = 5 lambda xi_j, |K_j| = lambda_c = 5 lambda. Writing
//   s_j = xi_j.grad e_j + T2 e_j,   c_j = T1 e_j,
// Lambda M = sum_j (lambda_c e_j + c_j) cos_j + s_j sin_j and the product
// Lambda M perp-grad M splits exactly into
//   curl  lambda_c M perp-grad M                         (= perp-grad of lambda_c M^2 / 2)
//   main  -1/2 lambda_c sum_j xi_j^perp e_j (xi_j.grad e_j)
//   NO    sum_j -1/2 lambda_c (T2 e_j) e_j xi_j^perp + 1/2 (T1 e_j) perp-grad e_j
//   O1    sum_j [1/2 lambda_c s_j e_j xi_j^perp + 1/2 c_j perp-grad e_j] cos 2theta_j
//   O2    sum_j [1/2 s_j perp-grad e_j - 1/2 lambda_c c_j e_j xi_j^perp] sin 2theta_j
//   O3    sum_{j != l} -lambda_c s_j e_l xi_l^perp sin_j sin_l
//   O4    sum_{j != l} s_j perp-grad e_l sin_j cos_l
//   O5    sum_{j != l} -lambda_c c_j e_l xi_l^perp cos_j sin_l
//   O6    sum_{j != l} c_j perp-grad e_l cos_j cos_l
// with theta_j = K_j.x.

#ifndef SQGCI_BUILDING_BLOCKS_HPP
#define SQGCI_BUILDING_BLOCKS_HPP

#include <array>
#include <functional>
#include <string_view>

#include "sqgci/corrector.hpp"
#include "sqgci/spectral.hpp"

namespace sqgci {

/// A: first half-step of a stage (radicand c0 - R_j), B: second (c0 + R_j).
enum class Parity { A, B };

std::string_view to_string(Parity p) noexcept;

struct AmplitudePair {
  std::array<TorusField, 2> a;
  Parity parity = Parity::A;
  double delta_prev = 0.0;
  int lambda_next = 0;
  double c0 = 2.0;
  double kappa = 1.0;
  double min_radicand = 0.0;
  /// ||G~||_X / delta_prev; above 1 the hypothesis of the construction fails.
  double stress_ratio = 0.0;
  /// Fraction of grid points whose radicand was raised to the floor.
  double clamped_fraction = 0.0;

  const TorusField& operator[](int j) const { return a[std::size_t(j)]; }
};

/// Throws ErrorCode::positivity if a radicand is <= 0 anywhere. A positive
/// radicand_floor instead raises every radicand below it to the floor; the
/// cancellation is then no longer exact and clamped_fraction records it.
AmplitudePair make_amplitudes(const TorusField& stress_tilde, double delta_prev, int lambda_next,
                              double c0, Parity parity, double kappa = 1.0,
                              double radicand_floor = 0.0);

struct Increment {
  TorusField M;
  std::array<TorusField, 2> envelopes;  // P_{<=r} a_j
  std::array<Wavevector, 2> carriers;
  int lambda = 0;  // carrier wavenumber is 5 * lambda
  double r_cutoff = 0.0;
  /// Relative L2 mass of M outside the discs |k -+ K_j| <= r.
  double leakage = 0.0;

  double lambda_c() const noexcept { return 5.0 * lambda; }
};

Increment make_increment(const AmplitudePair& amps, int lambda, double r_cutoff,
                         double leakage_tol = 1e-12);

/// Lambda M perp-grad M by direct products on the grid (the oracle path).
VectorField nonlinear_term(const TorusField& M);

enum class Part { curl, main, no, o1, o2, o3, o4, o5, o6 };
inline constexpr int kPartCount = 9;

std::string_view to_string(Part p) noexcept;

/// Calls sink(part, vector field) once per part, in enum order. Only one
/// part is alive at a time, which bounds memory on large grids.
void for_each_part(const Increment& inc, const std::function<void(Part, VectorField&&)>& sink);

struct NonlinearDecomposition {
  std::array<VectorField, kPartCount> parts;

  const VectorField& operator[](Part p) const { return parts[std::size_t(p)]; }
  VectorField sum() const;
  /// Delta^{-1} div of a part.
  TorusField potential(Part p) const;
};

NonlinearDecomposition decompose_nonlinear(const Increment& inc);

/// Relative sup distance between the brute-force product and the sum of parts.
double reconstruction_error(const Increment& inc, const NonlinearDecomposition& parts);

struct KappaCalibration {
  double kappa = 1.0;
  /// Relative X norm of the low-frequency residual for kappa = 1 and sqrt 2.
  std::array<double, 2> residual{};
};

/// Chooses kappa in {1, sqrt 2} so that a one-mode stress is cancelled by
/// -2 Delta^{-1} div(Lambda M perp-grad M) at frequencies <= r.
KappaCalibration calibrate_kappa(int n = 512, int lambda = 16, double c0 = 2.0);

}  // namespace sqgci

#endif  // SQGCI_BUILDING_BLOCKS_HPP
