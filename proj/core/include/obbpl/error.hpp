// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace obbpl {

enum class ErrorKind {
  kInvalidInput,
  kDegenerateGeometry,
  kEmptyMask,
  kFormat,
  kMissingGroundTruth,
  kPairing,
  kIsotropic,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base error for every validation failure raised by the library. Anything
/// not derived from this is treated as an internal error by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace obbpl
