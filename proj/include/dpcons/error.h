// Copyright 2026 The dpcons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPCONS_ERROR_H_
#define DPCONS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpcons {

enum class ErrorCode {
  kAsymmetricAdjacency,
  kNegativeWeight,
  kNonzeroDiagonal,
  kTooFewNodes,
  kNotSquare,
  kNonFinite,
  kDisconnected,
  kStepSizeTooLarge,
  kConnectivityRetriesExhausted,
  kNonpositiveScale,
  kAgentOutOfRange,
  kInvalidSchedule,
  kDimensionMismatch,
  kScheduleMismatch,
  kIsolatedNode,
  kInvalidParameters,
  kInvalidProbability,
  kDomainViolation,
  kInvalidGrid,
  kInvalidConfig,
  kIo,
  kRunFailure,
};

// Stable identifier used in machine-readable diagnostics.
std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// identifies the violated precondition; the message carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpcons

#endif  // DPCONS_ERROR_H_
