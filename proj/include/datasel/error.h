/* Copyright 2026 The datasel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DATASEL_ERROR_H_
#define DATASEL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace datasel {

enum class ErrorCode {
  // file formats
  kIoError,
  kBadMagic,
  kBadHeader,
  kTruncatedFile,
  kTrailingBytes,
  kDimensionZero,
  kNonFiniteValue,
  kParseError,
  // shapes and arguments
  kShapeMismatch,
  kZeroNormRow,
  kNotNormalized,
  kInvalidParameter,
  kInvalidTemperature,
  kInvalidNormOrder,
  kIndexOutOfRange,
  kPlanMismatch,
  kPoolMismatch,
  kEmptyTarget,
  kEmptySelection,
  kInvalidTarget,
  kTooLarge,
  kSubsetTooSmall,
  kTooFewSamples,
  kTooFewClasses,
  kConvergenceFailure,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (notably the CLI) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace datasel

#endif  // DATASEL_ERROR_H_
