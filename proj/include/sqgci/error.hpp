// Copyright 2026 The sqgci Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SQGCI_ERROR_HPP
#define SQGCI_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sqgci {

/// Numeric values are part of the C ABI (see sqgci.h); do not renumber.
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  non_finite = 2,
  aliasing = 3,
  positivity = 4,
  consistency = 5,
  band_leakage = 6,
  io = 7,
  parse = 8,
  invalid_params = 9,
  internal = 99,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sqgci

#endif  // SQGCI_ERROR_HPP
