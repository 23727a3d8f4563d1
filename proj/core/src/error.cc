/*
 * Copyright 2026 The DriftAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "driftalign/error.h"

#include <string>

namespace driftalign {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kFormat:
      return "format";
    case ErrorKind::kTruncation:
      return "truncation";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kDegenerate:
      return "degenerate";
    case ErrorKind::kEvaluation:
      return "evaluation";
  }
  return "unknown";
}

TruncationError::TruncationError(std::size_t expected_bytes,
                                 std::size_t actual_bytes)
    : Error(ErrorKind::kTruncation,
            "truncated payload: expected " + std::to_string(expected_bytes) +
                " bytes, got " + std::to_string(actual_bytes)),
      expected_bytes_(expected_bytes),
      actual_bytes_(actual_bytes) {}

}  // namespace driftalign
