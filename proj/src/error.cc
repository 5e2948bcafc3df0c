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

#include "datasel/error.h"

namespace datasel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadHeader: return "BadHeader";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kTrailingBytes: return "TrailingBytes";
    case ErrorCode::kDimensionZero: return "DimensionZero";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kZeroNormRow: return "ZeroNormRow";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kInvalidTemperature: return "InvalidTemperature";
    case ErrorCode::kInvalidNormOrder: return "InvalidNormOrder";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kPlanMismatch: return "PlanMismatch";
    case ErrorCode::kPoolMismatch: return "PoolMismatch";
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kInvalidTarget: return "InvalidTarget";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kSubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kTooFewClasses: return "TooFewClasses";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
  }
  return "Unknown";
}

}  // namespace datasel
