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

// Binary embedding matrices, label sidecars and key=value manifests.
//
// Embedding file layout (all little-endian):
//   bytes  0..7   "TEDAEMB" followed by version byte 0x01
//   bytes  8..11  uint32 row count
//   bytes 12..15  uint32 column count
//   bytes 16..    rows*dim IEEE-754 binary32 values, row-major

#ifndef DRIFTALIGN_EMBEDDING_IO_H_
#define DRIFTALIGN_EMBEDDING_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace driftalign {

inline constexpr std::array<char, 8> kEmbeddingMagic = {'T', 'E', 'D', 'A',
                                                         'E', 'M', 'B', '\x01'};
inline constexpr std::size_t kEmbeddingHeaderBytes = 16;

// Dense row-major single-precision matrix with at least one row and one
// column and only finite entries. Immutable once constructed.
class EmbeddingMatrix {
 public:
  // Throws ValidationError if rows or dim is zero, values.size() is not
  // rows*dim, or any value is non-finite.
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> values);

  // Truncates to single precision. The same validation applies after
  // rounding, so values outside float range are rejected.
  static EmbeddingMatrix FromDouble(const Eigen::MatrixXd& m);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  float at(std::size_t row, std::size_t col) const {
    return values_[row * dim_ + col];
  }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  std::span<const float> values() const { return values_; }

  Eigen::MatrixXd ToDouble() const;

  // Bit-exact comparison.
  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

 private:
  std::size_t rows_;
  std::size_t dim_;
  std::vector<float> values_;
};

struct LabeledSet {
  EmbeddingMatrix embeddings;
  std::vector<std::string> labels;

  // Throws ValidationError on count mismatch, empty labels or labels
  // containing a newline.
  void Validate() const;
};

// Ordered key/value provenance record. Keys are unique ASCII without '=' or
// newlines; values contain no newlines.
class Manifest {
 public:
  void Set(std::string key, std::string value);
  std::optional<std::string> Get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  friend bool operator==(const Manifest&, const Manifest&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Writes exactly kEmbeddingHeaderBytes + 4*rows*dim bytes. Throws IoError
// carrying the number of bytes written if the sink fails.
void WriteMatrix(const EmbeddingMatrix& m, std::ostream& out);

// Throws FormatError (bad magic/version, short header, zero sizes),
// TruncationError (payload shorter than rows*dim*4) or ValidationError
// (non-finite value, message names row and column).
EmbeddingMatrix ReadMatrix(std::istream& in);

void WriteLabels(std::span<const std::string> labels, std::ostream& out);

// One label per line; a missing trailing newline is accepted. Throws
// ValidationError on empty lines or when the count differs from
// expected_rows.
std::vector<std::string> ReadLabels(std::istream& in, std::size_t expected_rows);

void WriteManifest(const Manifest& manifest, std::ostream& out);
Manifest ReadManifest(std::istream& in);

// File wrappers. Open failures raise IoError naming the path.
void WriteMatrixFile(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix ReadMatrixFile(const std::filesystem::path& path);
void WriteLabelsFile(std::span<const std::string> labels,
                     const std::filesystem::path& path);
std::vector<std::string> ReadLabelsFile(const std::filesystem::path& path,
                                        std::size_t expected_rows);
void WriteManifestFile(const Manifest& manifest,
                       const std::filesystem::path& path);
Manifest ReadManifestFile(const std::filesystem::path& path);

}  // namespace driftalign

#endif  // DRIFTALIGN_EMBEDDING_IO_H_
