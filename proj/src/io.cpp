// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace sqgci {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  fail(ErrorCode::parse, "config: invalid value '" + std::string(value) + "' for key '" +
                             std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v);
  return x;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
  return x;
}

Wavevector to_wavevector(std::string_view key, std::string_view v) {
  const auto comma = v.find(',');
  if (comma == std::string_view::npos) bad_value(key, v);
  return {to_int<int>(key, trim(v.substr(0, comma))), to_int<int>(key, trim(v.substr(comma + 1)))};
}

std::string num(double x) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

std::string wv(Wavevector k) { return std::to_string(k.k1) + "," + std::to_string(k.k2); }

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SQGCI_DOUBLE_KEY(name, member)                                                  \
  Key {                                                                                 \
    name, [](RunConfig& c, std::string_view v) { c.member = to_double(name, v); },      \
        [](const RunConfig& c) { return num(c.member); }                                \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"lambda0", [](RunConfig& c, std::string_view v) { c.params.lambda0 = to_int<int>("lambda0", v); },
       [](const RunConfig& c) { return std::to_string(c.params.lambda0); }},
      SQGCI_DOUBLE_KEY("b", params.b),
      SQGCI_DOUBLE_KEY("beta", params.beta),
      SQGCI_DOUBLE_KEY("alpha", params.alpha),
      SQGCI_DOUBLE_KEY("gamma", params.gamma),
      SQGCI_DOUBLE_KEY("nu", params.nu),
      SQGCI_DOUBLE_KEY("c0", params.c0),
      {"stages", [](RunConfig& c, std::string_view v) { c.params.stages = to_int<int>("stages", v); },
       [](const RunConfig& c) { return std::to_string(c.params.stages); }},
      {"grid",
       [](RunConfig& c, std::string_view v) {
         c.engine.grid = v == "auto" ? 0 : to_int<int>("grid", v);
         if (c.engine.grid != 0 && !is_power_of_two(c.engine.grid)) bad_value("grid", v);
       },
       [](const RunConfig& c) {
         return c.engine.grid == 0 ? std::string("auto") : std::to_string(c.engine.grid);
       }},
      {"max_grid",
       [](RunConfig& c, std::string_view v) { c.engine.max_grid = to_int<int>("max_grid", v); },
       [](const RunConfig& c) { return std::to_string(c.engine.max_grid); }},
      {"kappa",
       [](RunConfig& c, std::string_view v) {
         c.kappa_auto = v == "auto";
         if (!c.kappa_auto) c.engine.kappa = to_double("kappa", v);
       },
       [](const RunConfig& c) { return c.kappa_auto ? std::string("auto") : num(c.engine.kappa); }},
      {"k_pi", [](RunConfig& c, std::string_view v) { c.init.k_pi = to_wavevector("k_pi", v); },
       [](const RunConfig& c) { return wv(c.init.k_pi); }},
      {"k_mu", [](RunConfig& c, std::string_view v) { c.init.k_mu = to_wavevector("k_mu", v); },
       [](const RunConfig& c) { return wv(c.init.k_mu); }},
      SQGCI_DOUBLE_KEY("amp_pi", init.amp_pi),
      SQGCI_DOUBLE_KEY("amp_mu", init.amp_mu),
      SQGCI_DOUBLE_KEY("init_shrink", init.shrink),
      SQGCI_DOUBLE_KEY("init_margin", init.margin),
      SQGCI_DOUBLE_KEY("assembly_tol", engine.assembly_tol),
      SQGCI_DOUBLE_KEY("band_tol", engine.band_tol),
      SQGCI_DOUBLE_KEY("leakage_tol", engine.leakage_tol),
      SQGCI_DOUBLE_KEY("iter3_constant", engine.iter3_constant),
      SQGCI_DOUBLE_KEY("radicand_floor", engine.radicand_floor),
      {"k_test", [](RunConfig& c, std::string_view v) { c.k_test = to_int<int>("k_test", v); },
       [](const RunConfig& c) { return std::to_string(c.k_test); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"output_dir", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const RunConfig& c) { return c.output_dir; }},
  };
  return k;
}

#undef SQGCI_DOUBLE_KEY

// Little-endian encoding independent of the host byte order.
template <class T>
void put_le(std::string& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(char((u >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= U(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<T>(u);
}

Json check_json(const Check& c) {
  return Json{{"ok", c.ok}, {"value", c.value}, {"bound", c.bound}, {"margin", c.margin()}};
}

Check parse_check(const Json& j) {
  Check c;
  c.ok = j.at("ok").get<bool>();
  c.value = j.at("value").get<double>();
  c.bound = j.at("bound").get<double>();
  return c;
}

std::string status_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::positivity: return "positivity";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::band_leakage: return "band_leakage";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

TorusField lambda_of(const TorusField& f) {
  return apply_multiplier(f, symbols::fractional_laplacian(1.0));
}

TorusField laplacian_of(const TorusField& f) {
  return apply_multiplier(
      f, {[](int k1, int k2) { return Complex(-(double(k1) * k1 + double(k2) * k2)); }, 0.0});
}

void write_finals(const fs::path& out, const IterState& s) {
  fs::create_directories(out / "final");
  save_field(out / "final" / "theta.sqf", lambda_of(s.eta));
  save_field(out / "final" / "theta_tilde.sqf", lambda_of(s.eta_tilde));
  save_field(out / "final" / "forcing.sqf", laplacian_of(s.G));
}

std::vector<int> state_indices(const fs::path& dir) {
  std::vector<int> idx;
  if (!fs::is_directory(dir)) return idx;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_directory() && name.size() == 9 && name.rfind("state_", 0) == 0 &&
        fs::exists(e.path() / "state.json")) {
      int n = 0;
      const auto [p, ec] = std::from_chars(name.data() + 6, name.data() + 9, n);
      if (ec == std::errc() && p == name.data() + 9) idx.push_back(n);
    }
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

void write_reports_index(const fs::path& out) {
  Json arr = Json::array();
  int expect = 0;
  for (int n : state_indices(out)) {
    if (n != expect) break;  // contiguous prefix only
    arr.push_back(Json::parse(read_file(state_dir(out, n) / "report.json")));
    ++expect;
  }
  write_atomic(out / "reports.json", arr.dump(2) + "\n");
}

void write_run_json(const fs::path& out, const RunOutcome& o, int target, double mu_sup) {
  Json j;
  j["status"] = status_name(o.status);
  j["code"] = int(o.status);
  j["message"] = o.message;
  j["final_state"] = o.final_n;
  j["target_state"] = target;
  j["kappa"] = o.kappa;
  j["mu_sup"] = mu_sup;
  j["distinct"] = mu_sup > 0.0;
  write_atomic(out / "run.json", j.dump(2) + "\n");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.emplace_back(k.name);
  return out;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const Key& k : keys())
    if (key == k.name) {
      k.set(cfg, trim(value));
      return;
    }
  fail(ErrorCode::parse, "config: unknown key '" + std::string(key) + "'");
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  for (const Key& k : keys())
    if (key == k.name) return k.get(cfg);
  fail(ErrorCode::parse, "config: unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::parse, "config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  RunConfig cfg = parse_config(read_file(path));
  if (const char* env = std::getenv("SQGCI_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  return cfg;
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::io, "cannot read " + path.string());
  return std::move(ss).str();
}

void write_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot create " + tmp.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

void save_field(const fs::path& path, const TorusField& f) {
  if (f.empty()) fail(ErrorCode::invalid_argument, "cannot save an empty field");
  if (!f.all_finite()) fail(ErrorCode::non_finite, "field has non-finite samples");
  std::string bytes;
  bytes.reserve(kFieldHeaderBytes + 8 * f.size());
  bytes += "SQF1";
  put_le<std::uint32_t>(bytes, 1);
  put_le<std::uint32_t>(bytes, std::uint32_t(f.n()));
  put_le<std::uint32_t>(bytes, 0);
  put_le<double>(bytes, kTwoPi);
  for (double v : f.values()) put_le<double>(bytes, v);
  write_atomic(path, bytes);
}

TorusField load_field(const fs::path& path) {
  const std::string b = read_file(path);
  const std::string name = path.filename().string();
  if (b.size() < kFieldHeaderBytes || b.compare(0, 4, "SQF1") != 0)
    fail(ErrorCode::parse, name + ": not an SQF1 field file");
  const auto version = get_le<std::uint32_t>(b.data() + 4);
  const auto n = get_le<std::uint32_t>(b.data() + 8);
  const auto layout = get_le<std::uint32_t>(b.data() + 12);
  const double period = get_le<double>(b.data() + 16);
  if (version != 1) fail(ErrorCode::parse, name + ": unsupported version " + std::to_string(version));
  if (layout != 0) fail(ErrorCode::parse, name + ": unsupported layout " + std::to_string(layout));
  if (n < 2 || n > (1u << 16) || !is_power_of_two(int(n)))
    fail(ErrorCode::parse, name + ": grid size is not a power of two");
  if (std::abs(period - kTwoPi) > 1e-12) fail(ErrorCode::parse, name + ": period is not 2 pi");
  const std::size_t count = std::size_t(n) * n;
  if (b.size() != kFieldHeaderBytes + 8 * count)
    fail(ErrorCode::parse, name + ": length does not match the header");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = get_le<double>(b.data() + kFieldHeaderBytes + 8 * i);
  TorusField f(int(n), std::move(v));
  if (!f.all_finite()) fail(ErrorCode::non_finite, name + ": non-finite samples");
  return f;
}

std::string report_json(const StageReport& r, int indent) {
  Json j;
  j["stage"] = r.stage;
  j["parity"] = r.parity;
  j["lambda"] = r.lambda;
  j["delta"] = r.delta;
  j["r"] = r.r;
  j["grid"] = r.grid;
  Json norms;
  norms["Gt_X"] = r.Gt_X;
  norms["G_X"] = r.G_X;
  norms["GD_X"] = r.GD_X;
  norms["GN_X"] = r.GN_X;
  norms["GR0_X"] = r.GR0_X;
  norms["JNO_X"] = r.JNO_X;
  norms["JO_X"] = r.JO_X;
  norms["component_sum"] = r.component_sum();
  j["norms"] = norms;
  Json budget;
  budget["GD"] = r.GD_X / r.delta;
  budget["GN"] = r.GN_X / r.delta;
  budget["GR0"] = r.GR0_X / r.delta;
  budget["JNO"] = r.JNO_X / r.delta;
  double o = 0.0;
  for (double v : r.JO_X) o += v;
  budget["JO"] = o / r.delta;
  j["budget_fractions"] = budget;
  j["inductive"] = {{"iter1", check_json(r.iter1)},
                    {"iter2", check_json(r.iter2)},
                    {"iter3", check_json(r.iter3)},
                    {"iter4", check_json(r.iter4)}};
  j["iter3_ratio"] = r.iter3_ratio;
  j["curl_discarded"] = r.curl_discarded;
  j["curl_part_X"] = r.curl_part_X;
  j["M_sup"] = r.M_sup;
  j["mu_sup"] = r.mu_sup;
  j["holder"] = {{"Pi_alpha", r.Pi_alpha}, {"mu_alpha", r.mu_alpha}, {"G_2am1", r.G_2am1}};
  j["diagnostics"] = {{"assembly_error", r.assembly_error},
                      {"reconstruction_error", r.reconstruction_error},
                      {"band_discarded", r.band_discarded},
                      {"leakage", r.leakage},
                      {"min_radicand", r.min_radicand},
                      {"clamped_fraction", r.clamped_fraction},
                      {"stress_ratio_in", r.stress_ratio_in},
                      {"eta_unchanged", r.eta_unchanged},
                      {"eta_tilde_unchanged", r.eta_tilde_unchanged},
                      {"init_reductions", r.init_reductions},
                      {"amp_pi", r.amp_pi},
                      {"amp_mu", r.amp_mu}};
  return j.dump(indent);
}

StageReport parse_report_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    StageReport r;
    r.stage = j.at("stage").get<int>();
    r.parity = j.at("parity").get<std::string>();
    r.lambda = j.at("lambda").get<long long>();
    r.delta = j.at("delta").get<double>();
    r.r = j.at("r").get<double>();
    r.grid = j.at("grid").get<int>();
    const Json& n = j.at("norms");
    r.Gt_X = n.at("Gt_X").get<double>();
    r.G_X = n.at("G_X").get<double>();
    r.GD_X = n.at("GD_X").get<double>();
    r.GN_X = n.at("GN_X").get<double>();
    r.GR0_X = n.at("GR0_X").get<double>();
    r.JNO_X = n.at("JNO_X").get<double>();
    r.JO_X = n.at("JO_X").get<std::array<double, 6>>();
    const Json& ind = j.at("inductive");
    r.iter1 = parse_check(ind.at("iter1"));
    r.iter2 = parse_check(ind.at("iter2"));
    r.iter3 = parse_check(ind.at("iter3"));
    r.iter4 = parse_check(ind.at("iter4"));
    r.iter3_ratio = j.at("iter3_ratio").get<std::array<double, 3>>();
    r.curl_discarded = j.at("curl_discarded").get<double>();
    r.curl_part_X = j.at("curl_part_X").get<double>();
    r.M_sup = j.at("M_sup").get<double>();
    r.mu_sup = j.at("mu_sup").get<double>();
    const Json& h = j.at("holder");
    r.Pi_alpha = h.at("Pi_alpha").get<double>();
    r.mu_alpha = h.at("mu_alpha").get<double>();
    r.G_2am1 = h.at("G_2am1").get<double>();
    const Json& d = j.at("diagnostics");
    r.assembly_error = d.at("assembly_error").get<double>();
    r.reconstruction_error = d.at("reconstruction_error").get<double>();
    r.band_discarded = d.at("band_discarded").get<double>();
    r.leakage = d.at("leakage").get<double>();
    r.min_radicand = d.at("min_radicand").get<double>();
    r.clamped_fraction = d.at("clamped_fraction").get<double>();
    r.stress_ratio_in = d.at("stress_ratio_in").get<double>();
    r.eta_unchanged = d.at("eta_unchanged").get<bool>();
    r.eta_tilde_unchanged = d.at("eta_tilde_unchanged").get<bool>();
    r.init_reductions = d.at("init_reductions").get<int>();
    r.amp_pi = d.at("amp_pi").get<double>();
    r.amp_mu = d.at("amp_mu").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("report: ") + e.what());
  }
}

std::string verdict_json(const ParamVerdict& v, int indent) {
  Json j;
  j["valid"] = v.valid;
  j["message"] = v.message;
  j["window"] = {{"lo", v.window_lo}, {"hi", v.window_hi}, {"empty", v.window_empty}};
  Json checks = Json::array();
  for (const Inequality& q : v.checks)
    checks.push_back({{"name", q.name},
                      {"lhs", q.lhs},
                      {"rhs", q.rhs},
                      {"strict", q.strict},
                      {"satisfied", q.satisfied},
                      {"slack", q.slack()}});
  j["checks"] = checks;
  return j.dump(indent);
}

std::string decay_json(const DecayTable& t, int indent) {
  Json rows = Json::array();
  for (const DecayRow& r : t.rows)
    rows.push_back({{"n", r.n},
                    {"parity", r.parity},
                    {"lambda", r.lambda},
                    {"delta", r.delta},
                    {"Gt_X", r.Gt_X},
                    {"ratio", r.ratio},
                    {"delta_ratio", r.delta_ratio},
                    {"budget_fractions",
                     {{"GD", r.frac_D}, {"GN", r.frac_N}, {"GR0", r.frac_R0}, {"JNO", r.frac_NO},
                      {"JO", r.frac_O}}}});
  Json j;
  j["rows"] = rows;
  j["strictly_decreasing"] = t.strictly_decreasing;
  j["all_ratios_below_one"] = t.all_ratios_below_one;
  j["budgets"] = {{"GD", kBudgetD}, {"GN", kBudgetN}, {"GR0", kBudgetR0},
                        {"JNO", kBudgetNO}, {"JO", kBudgetO}};
  return j.dump(indent);
}

void export_csv(std::ostream& os, const TorusField& f) {
  const int n = f.n();
  const double h = kTwoPi / n;
  os << "i,j,x1,x2,value\n";
  os.precision(17);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) os << i << ',' << j << ',' << h * i << ',' << h * j << ',' << f(i, j) << '\n';
}

void export_spectrum(std::ostream& os, const TorusField& f, double threshold) {
  const SpectralField s = transform(f);
  double cmax = 0.0;
  s.for_each([&](int, int, const Complex& c) { cmax = std::max(cmax, std::abs(c)); });
  const int h = s.n() / 2;
  os << "k1,k2,abs\n";
  os.precision(17);
  for (int k1 = -h + 1; k1 < h; ++k1)
    for (int k2 = -h + 1; k2 < h; ++k2) {
      const double a = std::abs(s.coeff(k1, k2));
      if (a > threshold * cmax && a > 0.0) os << k1 << ',' << k2 << ',' << a << '\n';
    }
}

fs::path state_dir(const fs::path& run_dir, int n) {
  char name[16];
  std::snprintf(name, sizeof name, "state_%03d", n);
  return run_dir / name;
}

void write_state(const fs::path& dir, const IterState& s, const StageReport& r,
                 const TorusField& increment) {
  fs::create_directories(dir);
  save_field(dir / "eta.sqf", s.eta);
  save_field(dir / "eta_tilde.sqf", s.eta_tilde);
  save_field(dir / "Pi.sqf", s.Pi());
  save_field(dir / "mu.sqf", s.mu());
  save_field(dir / "G.sqf", s.G);
  save_field(dir / "Gt.sqf", s.Gt);
  if (!increment.empty()) save_field(dir / "M.sqf", increment);
  Json j;
  j["format"] = "sqgci-state";
  j["version"] = 1;
  j["n"] = s.n;
  j["grid"] = s.grid();
  j["parity"] = r.parity;
  j["next_parity"] = std::string(to_string(s.parity()));
  write_atomic(dir / "state.json", j.dump(2) + "\n");
  write_atomic(dir / "report.json", report_json(r) + "\n");
}

IterState read_state(const fs::path& dir) {
  Json j;
  try {
    j = Json::parse(read_file(dir / "state.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("state.json: ") + e.what());
  }
  IterState s;
  s.n = j.value("n", -1);
  if (s.n < 0) fail(ErrorCode::parse, "state.json: missing state index");
  s.eta = load_field(dir / "eta.sqf");
  s.eta_tilde = load_field(dir / "eta_tilde.sqf");
  s.G = load_field(dir / "G.sqf");
  s.Gt = load_field(dir / "Gt.sqf");
  const int n = s.eta.n();
  if (s.eta_tilde.n() != n || s.G.n() != n || s.Gt.n() != n)
    fail(ErrorCode::parse, "state fields live on different grids");
  return s;
}

RunOutcome init_to_directory(const RunConfig& cfg, const fs::path& out) {
  RunConfig c = cfg;
  c.params.stages = 0;
  return run_to_directory(c, 0, out);
}

RunOutcome run_to_directory(const RunConfig& cfg, int stages, const fs::path& out,
                            const std::optional<fs::path>& resume, std::ostream* log) {
  RunOutcome o;
  RunConfig c = cfg;
  c.params.stages = stages;
  const int target = 2 * stages;
  double mu_sup = 0.0;
  fs::create_directories(out);
  write_atomic(out / "config.cfg", format_config(c));
  try {
    const ParamVerdict v = validate_params(c.params);
    if (!v.valid) fail(ErrorCode::invalid_params, v.message);
    if (c.kappa_auto) c.engine.kappa = calibrate_kappa().kappa;
    o.kappa = c.engine.kappa;

    IterState s;
    if (resume) {
      s = read_state(*resume);
      if (s.n > target)
        fail(ErrorCode::invalid_argument, "resume state lies beyond the requested stages");
      if (log) *log << "resumed from state " << s.n << " (grid " << s.grid() << ")\n";
    } else {
      StageReport r0;
      s = init_state(c.params, c.init, c.engine.grid, &r0);
      write_state(state_dir(out, 0), s, r0, TorusField{});
      o.reports.push_back(r0);
      if (log) *log << "state 0: grid " << s.grid() << ", ||G~||_X = " << r0.Gt_X << "\n";
    }
    o.final_n = s.n;
    while (s.n < target) {
      HalfStep h = half_step(s, c.params, c.engine);
      write_state(state_dir(out, h.state.n), h.state, h.report, h.increment);
      if (log)
        *log << "state " << h.state.n << " (" << h.report.parity << "): grid " << h.state.grid()
             << ", ||G~||_X = " << h.report.Gt_X << ", delta = " << h.report.delta << "\n";
      o.reports.push_back(std::move(h.report));
      s = std::move(h.state);
      o.final_n = s.n;
    }
    write_finals(out, s);
    mu_sup = sup_norm(s.mu());
  } catch (const Error& e) {
    o.status = e.code();
    o.message = e.what();
    if (log) *log << "error (" << status_name(e.code()) << "): " << e.what() << "\n";
    // Keep the outputs of the last state that was reached.
    if (const fs::path last = state_dir(out, o.final_n); fs::exists(last / "state.json")) {
      try {
        const IterState s = read_state(last);
        write_finals(out, s);
        mu_sup = sup_norm(s.mu());
      } catch (const Error&) {
      }
    }
  }
  write_reports_index(out);
  write_run_json(out, o, target, mu_sup);
  return o;
}

VerifyOutcome verify_directory(const fs::path& dir, std::ostream* log) {
  std::vector<fs::path> states;
  fs::path cfg_path;
  if (fs::exists(dir / "state.json")) {
    states.push_back(dir);
    cfg_path = dir.parent_path() / "config.cfg";
  } else {
    for (int n : state_indices(dir)) states.push_back(state_dir(dir, n));
    cfg_path = dir / "config.cfg";
  }
  if (states.empty()) fail(ErrorCode::io, "no states found in " + dir.string());
  RunConfig cfg;
  const bool have_cfg = fs::exists(cfg_path);
  if (have_cfg) cfg = parse_config(read_file(cfg_path));
  const double nu = cfg.params.nu, gamma = cfg.params.gamma;

  Json j;
  j["config"] = have_cfg ? "config.cfg" : "defaults";
  Json rows = Json::array();
  std::vector<std::string> failures;
  std::vector<StageReport> reports;
  std::optional<IterState> prev;
  for (const fs::path& sd : states) {
    IterState s = read_state(sd);
    Json row;
    row["n"] = s.n;
    row["grid"] = s.grid();
    const Pm4Residual pm = pm4_residual(s, nu, gamma);
    row["stress_equations"] = {{"eq1", pm.eq1}, {"eq2", pm.eq2}};
    if (!(pm.max() < 1e-9)) failures.push_back("stress-equation residual at state " + std::to_string(s.n));

    const double lam = double(schedule(cfg.params, s.n).lambda);
    const TorusField Pi = s.Pi(), mu = s.mu();
    // Round-off-sized fields (G at n = 0) carry no meaningful band.
    const double scale = std::max({sup_norm(Pi), sup_norm(mu), sup_norm(s.G), sup_norm(s.Gt)});
    auto ratio = [scale](const TorusField& f, double R) {
      return sup_norm(f) > 1e-12 * scale ? transform(f).active_radius() / R : 0.0;
    };
    const double band = std::max({ratio(Pi, 6.0 * lam), ratio(mu, 6.0 * lam),
                                  ratio(s.G, 12.0 * lam), ratio(s.Gt, 12.0 * lam)});
    row["band_ratio"] = band;
    if (band > 1.0) failures.push_back("band limit at state " + std::to_string(s.n));

    if (prev && prev->n + 1 == s.n) {
      const bool a = s.n % 2 == 1;  // parity A produced an odd state
      const TorusField& before = a ? prev->eta : prev->eta_tilde;
      const TorusField& after = a ? s.eta : s.eta_tilde;
      const bool same = resample(before, s.grid()).identical_to(after);
      row["skip"] = {{"field", a ? "eta" : "eta_tilde"}, {"bit_identical", same}};
      if (!same) failures.push_back("skip identity at state " + std::to_string(s.n));
    }
    if (fs::exists(sd / "report.json")) reports.push_back(parse_report_json(read_file(sd / "report.json")));
    if (log) *log << "state " << s.n << ": stress equations " << pm.eq1 << " / " << pm.eq2 << "\n";
    rows.push_back(row);
    prev = std::move(s);
  }
  j["states"] = rows;

  const EngineResidual er = engine_residual(*prev, nu, gamma, TestFunctionBank(cfg.k_test));
  j["weak_residual"] = {{"state", prev->n},
                        {"k_test", cfg.k_test},
                        {"theta_max_normalized", er.theta.max_normalized},
                        {"theta_tilde_max_normalized", er.theta_tilde.max_normalized},
                        {"max_prediction_error", er.max_prediction_error},
                        {"max_bound_ratio", er.max_bound_ratio}};
  if (!(er.max_prediction_error < 1e-9)) failures.push_back("weak residual prediction");
  if (!(er.max_bound_ratio <= 1.0 + 1e-9)) failures.push_back("weak residual bound");

  if (reports.size() >= 2) j["decay"] = Json::parse(decay_json(decay_report(reports), -1));
  j["failures"] = failures;
  j["pass"] = failures.empty();
  return {failures.empty(), j.dump(2)};
}

}  // namespace sqgci
