// Copyright 2026 The fbe Authors
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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fbe {

enum class ErrorCode {
  InvalidDigit,
  EmptyAddress,
  TruncationDepth,
  NoConvergence,
  Domain,
  UnboundedDerivative,
  Depth,
  Resolution,
  AmbiguousMembership,
  EmptyLeaf,
  Parse,
  NonInvertible,
  StaleCache,
  Io,
  Usage,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidDigit: return "invalid-digit";
    case ErrorCode::EmptyAddress: return "empty-address";
    case ErrorCode::TruncationDepth: return "truncation-depth";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::UnboundedDerivative: return "unbounded-derivative";
    case ErrorCode::Depth: return "depth";
    case ErrorCode::Resolution: return "resolution";
    case ErrorCode::AmbiguousMembership: return "ambiguous-membership";
    case ErrorCode::EmptyLeaf: return "empty-leaf";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::NonInvertible: return "non-invertible";
    case ErrorCode::StaleCache: return "stale-cache";
    case ErrorCode::Io: return "io";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  // residual is set for no-convergence failures (last successive-iterate gap)
  Error(ErrorCode code, const std::string& what, double residual)
      : Error(code, what) {
    residual_ = residual;
  }

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> residual() const noexcept { return residual_; }

 private:
  ErrorCode code_;
  std::optional<double> residual_;
};

}  // namespace fbe
