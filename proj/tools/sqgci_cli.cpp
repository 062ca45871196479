// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Uses the C interface only.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqgci/sqgci.h"

namespace {

// Exit codes: 0 success, 1 a check failed, 2 an error occurred.
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct ConfigDeleter {
  void operator()(sqgci_config* c) const { sqgci_config_free(c); }
};
struct FieldDeleter {
  void operator()(sqgci_field* f) const { sqgci_field_free(f); }
};
using ConfigPtr = std::unique_ptr<sqgci_config, ConfigDeleter>;
using FieldPtr = std::unique_ptr<sqgci_field, FieldDeleter>;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  sqgci_string_free(s);
  return out;
}

int report_error(sqgci_status st) {
  std::cerr << "error: " << sqgci_status_name(st);
  if (*sqgci_last_error()) std::cerr << ": " << sqgci_last_error();
  std::cerr << "\n";
  return kExitError;
}

std::optional<ConfigPtr> load_config(const std::string& path, int& code) {
  sqgci_config* raw = nullptr;
  const sqgci_status st = path.empty() ? sqgci_config_new(&raw) : sqgci_config_load(path.c_str(), &raw);
  if (st != SQGCI_OK) {
    code = report_error(st);
    return std::nullopt;
  }
  return ConfigPtr(raw);
}

std::string output_dir(const sqgci_config* cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  char* dir = nullptr;
  return sqgci_config_output_dir(cfg, &dir) == SQGCI_OK ? take(dir) : "out";
}

int cmd_validate(const std::string& config, bool json) {
  int code = 0;
  auto cfg = load_config(config, code);
  if (!cfg) return code;
  int valid = 0;
  char* text = nullptr;
  if (const sqgci_status st = sqgci_validate_params(cfg->get(), &valid, &text); st != SQGCI_OK)
    return report_error(st);
  const std::string js = take(text);
  if (json) {
    std::cout << js << "\n";
    return valid ? 0 : kExitFail;
  }
  const nlohmann::json v = nlohmann::json::parse(js);
  for (const auto& c : v["checks"]) {
    const bool strict = c["strict"].get<bool>();
    std::printf("%-4s %-44s %14.6g %s %-14.6g slack %.3g\n", c["satisfied"].get<bool>() ? "ok" : "FAIL",
                c["name"].get<std::string>().c_str(), c["lhs"].get<double>(), strict ? "< " : "<=",
                c["rhs"].get<double>(), c["slack"].get<double>());
  }
  std::printf("beta window (%.6g, %.6g)%s\n", v["window"]["lo"].get<double>(),
              v["window"]["hi"].get<double>(), v["window"]["empty"].get<bool>() ? " is empty" : "");
  std::cout << (valid ? std::string("valid") : v["message"].get<std::string>()) << "\n";
  return valid ? 0 : kExitFail;
}

int cmd_init(const std::string& config, const std::string& out) {
  int code = 0;
  auto cfg = load_config(config, code);
  if (!cfg) return code;
  const std::string dir = output_dir(cfg->get(), out);
  if (const sqgci_status st = sqgci_init(cfg->get(), dir.c_str()); st != SQGCI_OK) return report_error(st);
  std::cout << "wrote state 0 to " << dir << "\n";
  return 0;
}

int cmd_run(const std::string& config, std::optional<int> stages, const std::string& out,
            const std::string& resume, bool quiet) {
  int code = 0;
  auto cfg = load_config(config, code);
  if (!cfg) return code;
  if (stages) {
    const std::string s = std::to_string(*stages);
    if (const sqgci_status st = sqgci_config_set(cfg->get(), "stages", s.c_str()); st != SQGCI_OK)
      return report_error(st);
  }
  char* value = nullptr;
  if (const sqgci_status st = sqgci_config_get(cfg->get(), "stages", &value); st != SQGCI_OK)
    return report_error(st);
  const int k = std::stoi(take(value));
  const std::string dir = output_dir(cfg->get(), out);
  int final_state = 0;
  const sqgci_status st = sqgci_run(cfg->get(), k, dir.c_str(), resume.empty() ? nullptr : resume.c_str(),
                                    quiet ? 0 : 1, &final_state);
  if (st != SQGCI_OK) {
    std::cerr << "stopped at state " << final_state << " of " << 2 * k << "\n";
    return report_error(st);
  }
  if (!quiet) std::cout << "reached state " << final_state << " in " << dir << "\n";
  return 0;
}

int cmd_verify(const std::string& state) {
  int pass = 0;
  char* json = nullptr;
  if (const sqgci_status st = sqgci_verify(state.c_str(), &pass, &json); st != SQGCI_OK)
    return report_error(st);
  std::cout << take(json) << "\n";
  return pass ? 0 : kExitFail;
}

int with_field(const std::string& path, FieldPtr& out) {
  sqgci_field* raw = nullptr;
  if (const sqgci_status st = sqgci_field_load(path.c_str(), &raw); st != SQGCI_OK) return report_error(st);
  out.reset(raw);
  return 0;
}

int cmd_norms(const std::string& path, const std::string& kind, double s) {
  FieldPtr f;
  if (int c = with_field(path, f)) return c;
  const sqgci_norm_kind k =
      kind == "sup" ? SQGCI_NORM_SUP : kind == "X" ? SQGCI_NORM_X : SQGCI_NORM_HOLDER;
  double v = 0.0;
  if (const sqgci_status st = sqgci_field_norm(f.get(), k, s, &v); st != SQGCI_OK) return report_error(st);
  std::printf("%.17g\n", v);
  return 0;
}

int cmd_export(const std::string& path, const std::string& format, const std::string& output) {
  FieldPtr f;
  if (int c = with_field(path, f)) return c;
  const sqgci_export_format fmt = format == "csv" ? SQGCI_EXPORT_CSV : SQGCI_EXPORT_SPECTRUM;
  if (const sqgci_status st = sqgci_field_export(f.get(), fmt, output.empty() ? nullptr : output.c_str());
      st != SQGCI_OK)
    return report_error(st);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex integration for the forced stationary SQG equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sqgci_version()));

  std::string config, out, resume, state, field, kind = "sup", format = "csv", output;
  std::optional<int> stages;
  double s = 0.0;
  bool json = false, quiet = false;

  auto* validate = app.add_subcommand("validate-params", "Check the parameter inequalities");
  validate->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--json", json, "Print the verdict as JSON");

  auto* init = app.add_subcommand("init", "Build state 0");
  init->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  init->add_option("--out", out, "Run directory (default: output_dir of the config)");

  auto* run = app.add_subcommand("run", "Run stages and write every state");
  run->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--stages", stages, "Number of (A, B) stages")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out, "Run directory (default: output_dir of the config)");
  run->add_option("--resume", resume, "State directory to continue from")->check(CLI::ExistingDirectory);
  run->add_flag("--quiet", quiet, "No progress output");

  auto* verify = app.add_subcommand("verify", "Check stored states");
  verify->add_option("--state", state, "Run directory or state directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  auto* norms = app.add_subcommand("norms", "Print a norm of a field file");
  norms->add_option("--field", field, "Field file")->required()->check(CLI::ExistingFile);
  norms->add_option("--kind", kind, "sup, X or holder")->check(CLI::IsMember({"sup", "X", "holder"}));
  norms->add_option("--s", s, "Hoelder exponent");

  auto* exp = app.add_subcommand("export", "Export a field file as CSV");
  exp->add_option("--field", field, "Field file")->required()->check(CLI::ExistingFile);
  exp->add_option("--format", format, "csv or spectrum")->check(CLI::IsMember({"csv", "spectrum"}));
  exp->add_option("--output", output, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return cmd_validate(config, json);
  if (*init) return cmd_init(config, out);
  if (*run) return cmd_run(config, stages, out, resume, quiet);
  if (*verify) return cmd_verify(state);
  if (*norms) return cmd_norms(field, kind, s);
  if (*exp) return cmd_export(field, format, output);
  return kExitError;
}
