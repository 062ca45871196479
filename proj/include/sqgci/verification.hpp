// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Weak-solution residuals, stress-equation residuals, operator bound probes and decay
// tables. Everything here recomputes its quantities along paths independent of
// the engine: products are formed pointwise on padded grids and pairings are
// evaluated by Parseval with the normalized inner product <f, g> = mean(f g).

#ifndef SQGCI_VERIFICATION_HPP
#define SQGCI_VERIFICATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sqgci/iteration.hpp"
#include "sqgci/spectral.hpp"

namespace sqgci {

struct TestMode {
  Wavevector k;
  Phase phase = Phase::cosine;

  /// ||psi||_inf + ||grad psi||_inf
  double c1_norm() const { return 1.0 + k.norm(); }
};

/// cos(k.x) and sin(k.x) for every k in the upper half plane with |k| <= K.
class TestFunctionBank {
 public:
  explicit TestFunctionBank(int k_test = 8);

  int k_test() const noexcept { return k_test_; }
  const std::vector<TestMode>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  TorusField field(std::size_t i, int n) const;

 private:
  int k_test_;
  std::vector<TestMode> modes_;
};

/// [grad-perp Lambda^{-1}, grad psi] theta in scalar form:
/// grad-perp Lambda^{-1} . (theta grad psi) - (grad-perp Lambda^{-1} theta) . grad psi.
/// Returned on the grid of theta when the product band fits, else on the
/// padded product grid.
TorusField commutator(const TorusField& theta, const TorusField& psi);

/// SQG transport term u . grad theta with u = grad-perp Lambda^{-1} theta.
TorusField transport(const TorusField& theta);

struct WeakResidual {
  std::vector<double> raw;         // per bank mode
  std::vector<double> normalized;  // raw / (||theta||_2^2 ||psi||_C1 + ||f||_2 ||psi||_2)
  double max_normalized = 0.0;
  std::size_t worst = 0;
};

/// 1/2 <theta, C_psi theta> + nu <theta, Lambda^gamma psi> - <f, psi> for each
/// psi in the bank. The commutator pairing is summed over shifted spectra.
WeakResidual weak_residual(const TorusField& theta, const TorusField& f, double nu, double gamma,
                           const TestFunctionBank& bank);

/// Same quantity for one mode, through grid products and the commutator.
double weak_residual_direct(const TorusField& theta, const TorusField& f, double nu, double gamma,
                            const TestMode& mode);

/// Engine outputs against their expected weak residual. Adding the two stress
/// equations gives u.grad theta = nu Lambda^gamma theta + Delta(G + G~), so
/// with f = Delta G the residual of theta = Lambda eta is
/// <Delta G~, psi> + 2 nu <theta, Lambda^gamma psi>, and for theta~ the sign
/// of the G~ term flips.
struct EngineResidual {
  WeakResidual theta;
  WeakResidual theta_tilde;
  double max_prediction_error = 0.0;  // max |raw - predicted| / normalization
  double max_bound_ratio = 0.0;       // max |raw| / (|k|^2 ||G~||_inf + 2 nu |k|^gamma ||theta||_2)
};

EngineResidual engine_residual(const IterState& s, double nu, double gamma,
                               const TestFunctionBank& bank);

/// Per equation ||div(LHS - RHS)||_2 / (||div LHS||_2 + ||div RHS||_2 + S) with
/// S = sum over the two products Lambda a perp-grad b of || |grad Lambda a| |grad b| ||_2.
struct Pm4Residual {
  double eq1 = 0.0;
  double eq2 = 0.0;
  double max() const { return eq1 > eq2 ? eq1 : eq2; }
};

Pm4Residual pm4_residual(const IterState& s, double nu, double gamma);

struct BoundProbeConfig {
  std::vector<int> lambdas{64, 128, 256};
  std::vector<double> r_factors{1.0, 1.5, 2.0};  // r = factor * sqrt(lambda)
  int samples = 4;
  int grid = 128;
  std::uint64_t seed = 1;
};

struct BoundProbeRow {
  int lambda = 0;
  double r = 0.0;
  bool in_hypothesis = false;  // 10 <= r <= lambda / 2
  double t1 = 0.0;             // max ||T1 a||_inf lambda / (r^2 ||a||_inf)
  double t2 = 0.0;             // max ||T2 a||_inf lambda^2 / (r^3 ||a||_inf)
  double t2_potential = 0.0;   // max ||Delta^{-1} grad T2 a||_X lambda^2 / (r^2 ||a||_inf log r)
  double degree_zero = 0.0;    // max ||T a||_inf / (||a||_inf log r), T in {R1, R2, R1o, R2o}
};

struct BoundProbeReport {
  std::vector<BoundProbeRow> rows;  // only rows inside the hypothesis are probed
  std::vector<BoundProbeRow> excluded;
  double t1 = 0.0, t2 = 0.0, t2_potential = 0.0, degree_zero = 0.0;
};

BoundProbeReport bound_probes(const BoundProbeConfig& config = {});

/// Random real trigonometric polynomial with Gaussian coefficients on |k| <= r
/// (zero mean), declared band r.
TorusField random_band_limited(int n, double r, std::uint64_t seed);

struct DecayRow {
  int n = 0;
  std::string parity;
  long long lambda = 0;
  double delta = 0.0;
  double Gt_X = 0.0;
  double ratio = 0.0;        // Gt_X(n) / Gt_X(n-1), 0 for the first row
  double delta_ratio = 0.0;  // delta_n / delta_{n-1}
  // Component X norms over delta_n; budgets 1/3, 1/3, 1/24, 1/24, 1/3.
  double frac_D = 0.0, frac_N = 0.0, frac_R0 = 0.0, frac_NO = 0.0, frac_O = 0.0;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  bool strictly_decreasing = false;
  bool all_ratios_below_one = false;
};

inline constexpr double kBudgetD = 1.0 / 3.0;
inline constexpr double kBudgetN = 1.0 / 3.0;
inline constexpr double kBudgetR0 = 1.0 / 24.0;
inline constexpr double kBudgetNO = 1.0 / 24.0;
inline constexpr double kBudgetO = 1.0 / 3.0;

DecayTable decay_report(const std::vector<StageReport>& reports);

}  // namespace sqgci

#endif  // SQGCI_VERIFICATION_HPP
