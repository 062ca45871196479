// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Parameter schedule and the two-half-step iteration.
//
// The state stores eta = Pi + mu and eta~ = Pi - mu; Pi and mu are derived.
// A parity-A half-step adds -2M to eta~ and copies eta, a parity-B half-step
// adds 2M to eta and copies eta~, so the untouched field is bit-identical.

#ifndef SQGCI_ITERATION_HPP
#define SQGCI_ITERATION_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sqgci/building_blocks.hpp"
#include "sqgci/spectral.hpp"

namespace sqgci {

struct ParamSchedule {
  int lambda0 = 12;
  double b = 1.2;
  double beta = 0.3;
  double alpha = 0.6;
  double gamma = 1.0;
  double nu = 0.0;
  double c0 = 2.0;
  int stages = 2;  // each stage is an (A, B) pair of half-steps
};

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = true;
  bool satisfied = false;

  double slack() const { return rhs - lhs; }
};

struct ParamVerdict {
  std::vector<Inequality> checks;
  bool valid = false;
  /// Admissible beta interval ((2 alpha - 1) b, min of the two upper bounds).
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool window_empty = false;
  std::string message;
};

ParamVerdict validate_params(const ParamSchedule& p);

struct StageScale {
  long long lambda = 0;
  double delta = 0.0;
  double r = 0.0;  // zero for n = 0
};

/// lambda_n = ceil(lambda0^(b^n)), delta_n = lambda_n^-beta,
/// r_n = sqrt(lambda_{n-1} lambda_n). Throws once lambda_n exceeds 2^30.
StageScale schedule(const ParamSchedule& p, int n);

/// Smallest power-of-two grid (>= 64) on which the half-step producing state
/// n resolves Lambda M perp-grad M without aliasing.
int required_grid(const ParamSchedule& p, int n);

struct InitRecipe {
  Wavevector k_pi{1, 0};
  Wavevector k_mu{0, 2};
  double amp_pi = 1.0;
  double amp_mu = 1.0;
  double shrink = 0.9;   // amplitude factor per reduction step
  double margin = 0.1;   // required relative slack in the second and fourth inductive bounds
};

struct EngineOptions {
  double kappa = 1.0;
  double assembly_tol = 1e-9;
  double band_tol = 1e-8;
  double leakage_tol = 1e-12;
  double iter3_constant = 10.0;
  /// 0 aborts on a non-positive radicand; > 0 clamps to this floor instead.
  double radicand_floor = 0.0;
  int grid = 0;  // 0: grow automatically per half-step
  int max_grid = 8192;
};

struct IterState {
  int n = 0;
  TorusField eta;        // Pi + mu
  TorusField eta_tilde;  // Pi - mu
  TorusField G;
  TorusField Gt;

  Parity parity() const noexcept { return n % 2 == 0 ? Parity::A : Parity::B; }
  int grid() const noexcept { return eta.n(); }
  TorusField Pi() const;
  TorusField mu() const;
};

struct Check {
  bool ok = false;
  double value = 0.0;
  double bound = 0.0;
  double margin() const { return bound - value; }
};

struct StageReport {
  int stage = 0;             // index of the state this report describes
  std::string parity;        // "init", "A" or "B": the half-step that produced it
  long long lambda = 0;
  double delta = 0.0;
  double r = 0.0;
  int grid = 0;

  double Gt_X = 0.0;
  double G_X = 0.0;
  double GD_X = 0.0;
  double GN_X = 0.0;
  double GR0_X = 0.0;
  double JNO_X = 0.0;
  std::array<double, 6> JO_X{};

  Check iter1, iter2, iter3, iter4;
  std::array<double, 3> iter3_ratio{};  // ||G||_{C^s} / (lambda^s delta), s = beta, 1, 2

  double curl_discarded = 0.0;  // sup of the curl potential dropped from the stress
  double curl_part_X = 0.0;     // X norm of the gradient part of lambda_c M perp-grad M
  double M_sup = 0.0;
  double mu_sup = 0.0;
  double Pi_alpha = 0.0;
  double mu_alpha = 0.0;
  double G_2am1 = 0.0;

  double assembly_error = 0.0;
  double reconstruction_error = 0.0;
  double band_discarded = 0.0;
  double leakage = 0.0;
  double min_radicand = 0.0;
  double clamped_fraction = 0.0;
  double stress_ratio_in = 0.0;  // ||G~_n||_X / delta_n fed to the amplitudes
  bool eta_unchanged = false;
  bool eta_tilde_unchanged = false;
  int init_reductions = 0;
  double amp_pi = 0.0;
  double amp_mu = 0.0;

  double component_sum() const;
};

/// Builds the initial state on grid n (0: the grid of the first half-step).
IterState init_state(const ParamSchedule& p, const InitRecipe& recipe, int n = 0,
                     StageReport* report = nullptr);

/// Resamples every field onto a larger grid; no-op when m equals the grid.
IterState regrid(const IterState& s, int m);

struct HalfStep {
  IterState state;
  StageReport report;
  TorusField increment;  // M on the grid of the new state
};

HalfStep half_step(const IterState& state, const ParamSchedule& p, const EngineOptions& opt);

/// Fills the norms and inductive checks of a report for a given state.
void assess(const IterState& s, const ParamSchedule& p, const EngineOptions& opt,
            StageReport& report);

struct RunResult {
  IterState final_state;
  std::vector<StageReport> reports;
  TorusField theta;        // Lambda eta
  TorusField theta_tilde;  // Lambda eta~
  TorusField forcing;      // Laplacian G
  double mu_sup = 0.0;
  bool distinct = false;
};

/// Sees each state with its report and the increment that produced it (an
/// empty field for the initial state).
using StateObserver =
    std::function<void(const IterState&, const StageReport&, const TorusField& increment)>;

/// Runs half-steps from `start` until state index `target_n`; the observer
/// sees every produced state (not the start state).
RunResult run_from(IterState start, int target_n, const ParamSchedule& p, const EngineOptions& opt,
                   const StateObserver& observer = {});

/// Initializes and runs p.stages full stages; the observer also sees state 0.
RunResult run(const ParamSchedule& p, const InitRecipe& recipe, const EngineOptions& opt,
              const StateObserver& observer = {});

/// Direct stresses from the two stress equations: gradient parts of the two left-hand sides plus
/// the damping terms.
TorusField direct_stress(const TorusField& Pi, const TorusField& mu, double nu, double gamma);
TorusField direct_stress_tilde(const TorusField& Pi, const TorusField& mu, double nu, double gamma);

}  // namespace sqgci

#endif  // SQGCI_ITERATION_HPP
