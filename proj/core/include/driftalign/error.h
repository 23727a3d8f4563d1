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

#ifndef DRIFTALIGN_ERROR_H_
#define DRIFTALIGN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace driftalign {

// Error classes shared by every module. The CLI maps each kind to an exit
// code (validation 2, I/O 3, numeric degeneracy 4).
enum class ErrorKind {
  kValidation,
  kFormat,
  kTruncation,
  kIo,
  kDegenerate,
  kEvaluation,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::kValidation, message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error(ErrorKind::kFormat, message) {}
};

class TruncationError : public Error {
 public:
  TruncationError(std::size_t expected_bytes, std::size_t actual_bytes);

  std::size_t expected_bytes() const { return expected_bytes_; }
  std::size_t actual_bytes() const { return actual_bytes_; }

 private:
  std::size_t expected_bytes_;
  std::size_t actual_bytes_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::size_t bytes_written = 0)
      : Error(ErrorKind::kIo, message), bytes_written_(bytes_written) {}

  std::size_t bytes_written() const { return bytes_written_; }

 private:
  std::size_t bytes_written_;
};

// Zero-norm descriptors, zero-norm query rows under projection.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& message)
      : Error(ErrorKind::kDegenerate, message) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& message)
      : Error(ErrorKind::kEvaluation, message) {}
};

}  // namespace driftalign

#endif  // DRIFTALIGN_ERROR_H_
