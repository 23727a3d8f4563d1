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

// Seeded query/target embedding sets with a controllable distribution gap.
//
// Each class gets a unit center drawn uniformly on the sphere. Target rows are
// center + N(0, spread^2) noise; query rows get the same noise plus an offset
// of length shift_magnitude along a unit direction (one shared direction, or
// one per class). Every row is L2-normalized after noise and shift. Rows are
// class-major: class 0's rows first, in draw order.
//
// Draw order from the stream: class centers, shift direction(s), target rows,
// query rows. A row that comes out exactly zero before normalization is
// redrawn from the continuing stream.

#ifndef DRIFTALIGN_SYNTHETIC_GAP_H_
#define DRIFTALIGN_SYNTHETIC_GAP_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "driftalign/embedding_io.h"

namespace driftalign {

enum class ShiftMode { kGlobal, kPerClass };

std::string_view ToString(ShiftMode mode);
ShiftMode ParseShiftMode(std::string_view name);

// Defaults are the reference instance used by the acceptance suite.
struct GapSpec {
  std::uint64_t seed = 7;
  std::size_t num_classes = 10;
  std::size_t dim = 32;
  std::size_t queries_per_class = 5;
  std::size_t targets_per_class = 40;
  double cluster_spread = 0.25;
  double shift_magnitude = 0.6;
  ShiftMode shift_mode = ShiftMode::kGlobal;

  void Validate() const;
  // Every field plus the generator algorithm id.
  Manifest ToManifest() const;
};

struct GapInstance {
  LabeledSet query;
  LabeledSet target;
};

std::string ClassLabel(std::size_t class_index);

GapInstance Generate(const GapSpec& spec);

}  // namespace driftalign

#endif  // DRIFTALIGN_SYNTHETIC_GAP_H_
