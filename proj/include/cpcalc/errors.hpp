// Copyright 2026 The cpcalc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpcalc {

enum class ErrorKind {
  ShapeMismatch,
  DimMismatch,
  DimensionLimit,
  NotHermitian,
  NotPsd,
  NotFinite,
  NotDominated,
  NotADecomposition,
  NotAChannel,
  NotAnOperation,
  NotAResolution,
  NotMonotone,
  InvalidArgument,
  Inconsistent,
  SchemaError,
  IoError,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DimensionLimit: return "DimensionLimit";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::NotDominated: return "NotDominated";
    case ErrorKind::NotADecomposition: return "NotADecomposition";
    case ErrorKind::NotAChannel: return "NotAChannel";
    case ErrorKind::NotAnOperation: return "NotAnOperation";
    case ErrorKind::NotAResolution: return "NotAResolution";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above, so
/// callers (the CLI in particular) can map failures to exit codes without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace cpcalc
