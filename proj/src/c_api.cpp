// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#include "sqgci/sqgci.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "sqgci/io.hpp"

struct sqgci_config {
  sqgci::RunConfig cfg;
};

struct sqgci_field {
  sqgci::TorusField f;
};

namespace {

thread_local std::string last_error;

sqgci_status to_status(sqgci::ErrorCode c) { return static_cast<sqgci_status>(int(c)); }

// Runs body, translating exceptions into status codes and the error message.
template <class F>
sqgci_status guarded(F&& body) noexcept {
  last_error.clear();
  try {
    return body();
  } catch (const sqgci::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SQGCI_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SQGCI_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SQGCI_E_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) sqgci::fail(sqgci::ErrorCode::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sqgci_version(void) { return "1.0.0"; }

const char* sqgci_status_name(sqgci_status status) {
  return sqgci::to_string(static_cast<sqgci::ErrorCode>(int(status)));
}

const char* sqgci_last_error(void) { return last_error.c_str(); }

void sqgci_string_free(char* s) { std::free(s); }

sqgci_status sqgci_config_new(sqgci_config** out) {
  return guarded([&] {
    require(out, "null output handle");
    *out = new sqgci_config{};
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_parse(const char* text, sqgci_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new sqgci_config{sqgci::parse_config(text)};
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_load(const char* path, sqgci_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new sqgci_config{sqgci::load_config(path)};
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_set(sqgci_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value, "null argument");
    sqgci::set_config_value(cfg->cfg, key, value);
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_get(const sqgci_config* cfg, const char* key, char** value) {
  return guarded([&] {
    require(cfg && key && value, "null argument");
    *value = dup_string(sqgci::get_config_value(cfg->cfg, key));
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_to_string(const sqgci_config* cfg, char** text) {
  return guarded([&] {
    require(cfg && text, "null argument");
    *text = dup_string(sqgci::format_config(cfg->cfg));
    return SQGCI_OK;
  });
}

sqgci_status sqgci_config_output_dir(const sqgci_config* cfg, char** dir) {
  return guarded([&] {
    require(cfg && dir, "null argument");
    *dir = dup_string(cfg->cfg.output_dir);
    return SQGCI_OK;
  });
}

void sqgci_config_free(sqgci_config* cfg) { delete cfg; }

sqgci_status sqgci_validate_params(const sqgci_config* cfg, int* valid, char** json) {
  return guarded([&] {
    require(cfg && valid, "null argument");
    const sqgci::ParamVerdict v = sqgci::validate_params(cfg->cfg.params);
    *valid = v.valid ? 1 : 0;
    if (json) *json = dup_string(sqgci::verdict_json(v));
    return SQGCI_OK;
  });
}

sqgci_status sqgci_init(const sqgci_config* cfg, const char* out_dir) {
  return guarded([&] {
    require(cfg && out_dir, "null argument");
    const sqgci::RunOutcome o = sqgci::init_to_directory(cfg->cfg, out_dir);
    last_error = o.message;
    return to_status(o.status);
  });
}

sqgci_status sqgci_run(const sqgci_config* cfg, int stages, const char* out_dir, const char* resume,
                       int verbose, int* final_state) {
  return guarded([&] {
    require(cfg && out_dir, "null argument");
    require(stages >= 0, "stages must be non-negative");
    std::optional<std::filesystem::path> from;
    if (resume && *resume) from = resume;
    const sqgci::RunOutcome o =
        sqgci::run_to_directory(cfg->cfg, stages, out_dir, from, verbose ? &std::cerr : nullptr);
    if (final_state) *final_state = o.final_n;
    last_error = o.message;
    return to_status(o.status);
  });
}

sqgci_status sqgci_verify(const char* dir, int* pass, char** json) {
  return guarded([&] {
    require(dir && pass, "null argument");
    const sqgci::VerifyOutcome v = sqgci::verify_directory(dir);
    *pass = v.pass ? 1 : 0;
    if (json) *json = dup_string(v.json);
    return SQGCI_OK;
  });
}

sqgci_status sqgci_field_load(const char* path, sqgci_field** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new sqgci_field{sqgci::load_field(path)};
    return SQGCI_OK;
  });
}

sqgci_status sqgci_field_save(const sqgci_field* f, const char* path) {
  return guarded([&] {
    require(f && path, "null argument");
    sqgci::save_field(path, f->f);
    return SQGCI_OK;
  });
}

sqgci_status sqgci_field_from_samples(int n, const double* samples, sqgci_field** out) {
  return guarded([&] {
    require(samples && out, "null argument");
    require(n >= 2 && sqgci::is_power_of_two(n), "grid size must be a power of two");
    std::vector<double> v(samples, samples + std::size_t(n) * std::size_t(n));
    *out = new sqgci_field{sqgci::TorusField(n, std::move(v))};
    return SQGCI_OK;
  });
}

int sqgci_field_grid(const sqgci_field* f) { return f ? f->f.n() : 0; }

const double* sqgci_field_samples(const sqgci_field* f) {
  return f ? f->f.values().data() : nullptr;
}

sqgci_status sqgci_field_norm(const sqgci_field* f, sqgci_norm_kind kind, double s, double* value) {
  return guarded([&] {
    require(f && value, "null argument");
    switch (kind) {
      case SQGCI_NORM_SUP: *value = sqgci::sup_norm(f->f); break;
      case SQGCI_NORM_X: *value = sqgci::x_norm(f->f); break;
      case SQGCI_NORM_HOLDER: *value = sqgci::holder_norm(f->f, s); break;
      default: sqgci::fail(sqgci::ErrorCode::invalid_argument, "unknown norm kind");
    }
    return SQGCI_OK;
  });
}

sqgci_status sqgci_field_export(const sqgci_field* f, sqgci_export_format format, const char* path) {
  return guarded([&] {
    require(f, "null field");
    require(format == SQGCI_EXPORT_CSV || format == SQGCI_EXPORT_SPECTRUM, "unknown export format");
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (path && std::strcmp(path, "-") != 0) {
      file.open(path, std::ios::trunc);
      if (!file) sqgci::fail(sqgci::ErrorCode::io, std::string("cannot create ") + path);
      os = &file;
    }
    if (format == SQGCI_EXPORT_CSV)
      sqgci::export_csv(*os, f->f);
    else
      sqgci::export_spectrum(*os, f->f);
    os->flush();
    if (!*os) sqgci::fail(sqgci::ErrorCode::io, "export write failed");
    return SQGCI_OK;
  });
}

void sqgci_field_free(sqgci_field* f) { delete f; }

}  // extern "C"
