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

#include "driftalign/embedding_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "driftalign/error.h"

namespace driftalign {
namespace {

void PutU32(std::uint32_t v, char* out) {
  out[0] = static_cast<char>(v & 0xFFu);
  out[1] = static_cast<char>((v >> 8) & 0xFFu);
  out[2] = static_cast<char>((v >> 16) & 0xFFu);
  out[3] = static_cast<char>((v >> 24) & 0xFFu);
}

std::uint32_t GetU32(const char* in) {
  const auto b = [in](int i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(in[i]));
  };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

// Reads up to n bytes and returns how many arrived.
std::size_t ReadUpTo(std::istream& in, char* buf, std::size_t n) {
  in.read(buf, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

bool HasNewline(std::string_view s) {
  return s.find('\n') != std::string_view::npos ||
         s.find('\r') != std::string_view::npos;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim,
                                 std::vector<float> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (rows_ == 0 || dim_ == 0) {
    throw ValidationError("embedding matrix must have rows >= 1 and dim >= 1, got " +
                          std::to_string(rows_) + "x" + std::to_string(dim_));
  }
  if (values_.size() != rows_ * dim_) {
    throw ValidationError("embedding matrix " + std::to_string(rows_) + "x" +
                          std::to_string(dim_) + " needs " +
                          std::to_string(rows_ * dim_) + " values, got " +
                          std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("non-finite value at row " +
                            std::to_string(i / dim_) + ", col " +
                            std::to_string(i % dim_));
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::FromDouble(const Eigen::MatrixXd& m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  std::vector<float> values(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      values[r * cols + c] = static_cast<float>(
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
  }
  return EmbeddingMatrix(rows, cols, std::move(values));
}

Eigen::MatrixXd EmbeddingMatrix::ToDouble() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_),
                    static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values_[r * dim_ + c];
    }
  }
  return m;
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.rows_ != b.rows_ || a.dim_ != b.dim_) return false;
  return std::equal(a.values_.begin(), a.values_.end(), b.values_.begin(),
                    [](float x, float y) {
                      return std::bit_cast<std::uint32_t>(x) ==
                             std::bit_cast<std::uint32_t>(y);
                    });
}

void LabeledSet::Validate() const {
  if (labels.size() != embeddings.rows()) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " does not match row count " +
                          std::to_string(embeddings.rows()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty() || HasNewline(labels[i])) {
      throw ValidationError("invalid label for row " + std::to_string(i));
    }
  }
}

void Manifest::Set(std::string key, std::string value) {
  if (key.empty()) throw ValidationError("manifest key must not be empty");
  for (const char ch : key) {
    const auto u = static_cast<unsigned char>(ch);
    if (u >= 0x80 || ch == '=' || ch == '\n' || ch == '\r') {
      throw ValidationError("invalid manifest key '" + key + "'");
    }
  }
  if (HasNewline(value)) {
    throw ValidationError("manifest value for '" + key +
                          "' contains a newline");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> Manifest::Get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void WriteMatrix(const EmbeddingMatrix& m, std::ostream& out) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("matrix shape exceeds the 32-bit header fields");
  }
  std::vector<char> bytes(kEmbeddingHeaderBytes + 4 * m.values().size());
  std::copy(kEmbeddingMagic.begin(), kEmbeddingMagic.end(), bytes.begin());
  PutU32(static_cast<std::uint32_t>(m.rows()), bytes.data() + 8);
  PutU32(static_cast<std::uint32_t>(m.dim()), bytes.data() + 12);
  char* p = bytes.data() + kEmbeddingHeaderBytes;
  for (const float v : m.values()) {
    PutU32(std::bit_cast<std::uint32_t>(v), p);
    p += 4;
  }
  constexpr std::size_t kChunk = 1 << 16;
  std::size_t written = 0;
  while (written < bytes.size()) {
    const std::size_t n = std::min(kChunk, bytes.size() - written);
    out.write(bytes.data() + written, static_cast<std::streamsize>(n));
    if (!out) {
      throw IoError("embedding write failed after " + std::to_string(written) +
                        " of " + std::to_string(bytes.size()) + " bytes",
                    written);
    }
    written += n;
  }
}

EmbeddingMatrix ReadMatrix(std::istream& in) {
  std::array<char, kEmbeddingHeaderBytes> header{};
  const std::size_t got = ReadUpTo(in, header.data(), header.size());
  if (got < kEmbeddingHeaderBytes) {
    throw FormatError("embedding header too short: " + std::to_string(got) +
                      " of " + std::to_string(kEmbeddingHeaderBytes) + " bytes");
  }
  if (!std::equal(kEmbeddingMagic.begin(), kEmbeddingMagic.end(),
                  header.begin())) {
    throw FormatError("bad embedding magic or version");
  }
  const std::uint32_t rows = GetU32(header.data() + 8);
  const std::uint32_t dim = GetU32(header.data() + 12);
  if (rows == 0 || dim == 0) {
    throw FormatError("embedding header declares an empty shape " +
                      std::to_string(rows) + "x" + std::to_string(dim));
  }
  const std::size_t count = static_cast<std::size_t>(rows) * dim;
  const std::size_t expected = count * 4;

  std::vector<float> values;
  std::size_t received = 0;
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<char> buf(kChunk);
  values.reserve(std::min<std::size_t>(count, kChunk));
  while (received < expected) {
    const std::size_t want = std::min(kChunk, expected - received);
    const std::size_t n = ReadUpTo(in, buf.data(), want);
    if (n % 4 != 0 || n < want) {
      throw TruncationError(expected, received + n);
    }
    for (std::size_t i = 0; i < n; i += 4) {
      values.push_back(std::bit_cast<float>(GetU32(buf.data() + i)));
    }
    received += n;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("non-finite value at row " +
                            std::to_string(i / dim) + ", col " +
                            std::to_string(i % dim));
    }
  }
  return EmbeddingMatrix(rows, dim, std::move(values));
}

void WriteLabels(std::span<const std::string> labels, std::ostream& out) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty() || HasNewline(labels[i])) {
      throw ValidationError("invalid label for row " + std::to_string(i));
    }
    out << labels[i] << '\n';
  }
  if (!out) throw IoError("label write failed");
}

std::vector<std::string> ReadLabels(std::istream& in,
                                    std::size_t expected_rows) {
  if (expected_rows == 0) {
    throw ValidationError("expected_rows must be at least 1");
  }
  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      throw ValidationError("empty label on line " + std::to_string(line_no));
    }
    labels.push_back(std::move(line));
  }
  if (labels.size() != expected_rows) {
    throw ValidationError("label count mismatch: expected " +
                          std::to_string(expected_rows) + ", got " +
                          std::to_string(labels.size()));
  }
  return labels;
}

void WriteManifest(const Manifest& manifest, std::ostream& out) {
  for (const auto& [k, v] : manifest.entries()) out << k << '=' << v << '\n';
  if (!out) throw IoError("manifest write failed");
}

Manifest ReadManifest(std::istream& in) {
  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            " has no '='");
    }
    std::string key = line.substr(0, eq);
    if (manifest.Get(key)) {
      throw ValidationError("duplicate manifest key '" + key + "'");
    }
    manifest.Set(std::move(key), line.substr(eq + 1));
  }
  return manifest;
}

namespace {

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void WriteMatrixFile(const EmbeddingMatrix& m,
                     const std::filesystem::path& path) {
  auto out = OpenOut(path);
  WriteMatrix(m, out);
  out.close();
  if (!out) throw IoError("error closing '" + path.string() + "'");
}

EmbeddingMatrix ReadMatrixFile(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  return ReadMatrix(in);
}

void WriteLabelsFile(std::span<const std::string> labels,
                     const std::filesystem::path& path) {
  auto out = OpenOut(path);
  WriteLabels(labels, out);
}

std::vector<std::string> ReadLabelsFile(const std::filesystem::path& path,
                                        std::size_t expected_rows) {
  auto in = OpenIn(path);
  return ReadLabels(in, expected_rows);
}

void WriteManifestFile(const Manifest& manifest,
                       const std::filesystem::path& path) {
  auto out = OpenOut(path);
  WriteManifest(manifest, out);
}

Manifest ReadManifestFile(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  return ReadManifest(in);
}

}  // namespace driftalign
