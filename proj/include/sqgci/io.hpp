// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration, field files, JSON reports and run directories.
//
// A run directory holds
//   config.cfg                      canonical copy of the configuration
//   state_NNN/{eta,eta_tilde,Pi,mu,G,Gt}.sqf, M.sqf (n >= 1), state.json, report.json
//   reports.json                    every report present in the directory
//   final/{theta,theta_tilde,forcing}.sqf
//   run.json                        status of the last run or resume
// No file contains timings or paths, so reruns are byte-identical.

#ifndef SQGCI_IO_HPP
#define SQGCI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqgci/iteration.hpp"
#include "sqgci/verification.hpp"

namespace sqgci {

struct RunConfig {
  ParamSchedule params;
  InitRecipe init;
  EngineOptions engine;
  bool kappa_auto = false;  // recalibrate kappa before running
  int k_test = 8;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(std::string_view text);
/// Reads a file; SQGCI_OUTPUT_DIR, when set, overrides output_dir.
RunConfig load_config(const std::filesystem::path& path);
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);
/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string format_config(const RunConfig& cfg);
std::vector<std::string> config_keys();

// SQF1 field files: magic "SQF1", u32 version = 1, u32 N, u32 layout = 0,
// f64 period = 2 pi, then N * N f64 samples row-major; all little-endian.
inline constexpr std::size_t kFieldHeaderBytes = 24;

void save_field(const std::filesystem::path& path, const TorusField& f);
TorusField load_field(const std::filesystem::path& path);

/// Writes bytes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

std::string report_json(const StageReport& r, int indent = 2);
StageReport parse_report_json(std::string_view text);
std::string verdict_json(const ParamVerdict& v, int indent = 2);
std::string decay_json(const DecayTable& t, int indent = 2);

/// CSV of samples: "i,j,x1,x2,value".
void export_csv(std::ostream& os, const TorusField& f);
/// CSV of |c(k)| over the full plane, rows with |c(k)| > threshold * max |c|.
void export_spectrum(std::ostream& os, const TorusField& f, double threshold = 1e-13);

std::filesystem::path state_dir(const std::filesystem::path& run_dir, int n);
void write_state(const std::filesystem::path& dir, const IterState& s, const StageReport& r,
                 const TorusField& increment);
IterState read_state(const std::filesystem::path& dir);

struct RunOutcome {
  int final_n = 0;
  ErrorCode status = ErrorCode::ok;
  std::string message;
  std::vector<StageReport> reports;  // reports produced by this invocation
  double kappa = 1.0;
};

/// Runs (or resumes from a state directory) up to state 2 * stages and writes
/// every state into out. Engine errors are caught and recorded in the outcome
/// and in run.json; the states produced before the error stay on disk.
RunOutcome run_to_directory(const RunConfig& cfg, int stages, const std::filesystem::path& out,
                            const std::optional<std::filesystem::path>& resume = std::nullopt,
                            std::ostream* log = nullptr);

/// Writes state 0 only.
RunOutcome init_to_directory(const RunConfig& cfg, const std::filesystem::path& out);

struct VerifyOutcome {
  bool pass = false;
  std::string json;
};

/// Checks a run directory (or a single state directory): stress-equation residuals,
/// skip identities between consecutive states, band limits, the engine weak
/// residual of the last state, and the decay table. Decay is reported only.
VerifyOutcome verify_directory(const std::filesystem::path& dir, std::ostream* log = nullptr);

}  // namespace sqgci

#endif  // SQGCI_IO_HPP
