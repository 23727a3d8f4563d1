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

#include "driftalign/synthetic_gap.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "driftalign/error.h"
#include "driftalign/random.h"

namespace driftalign {
namespace {

using Vec = std::vector<double>;

double Norm(const Vec& v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

Vec UnitGaussian(Xoshiro256StarStar& rng, std::size_t dim) {
  Vec v(dim);
  for (;;) {
    for (double& x : v) x = rng.Gaussian();
    const double n = Norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
      return v;
    }
  }
}

// center + spread * noise + shift * direction, normalized.
Vec DrawRow(Xoshiro256StarStar& rng, const Vec& center, double spread,
            double shift, const Vec* direction) {
  const std::size_t dim = center.size();
  Vec v(dim);
  for (;;) {
    for (std::size_t j = 0; j < dim; ++j) {
      v[j] = center[j] + spread * rng.Gaussian();
      if (direction != nullptr) v[j] += shift * (*direction)[j];
    }
    const double n = Norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
      return v;
    }
  }
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string_view ToString(ShiftMode mode) {
  return mode == ShiftMode::kGlobal ? "global" : "per_class";
}

ShiftMode ParseShiftMode(std::string_view name) {
  if (name == "global") return ShiftMode::kGlobal;
  if (name == "per_class") return ShiftMode::kPerClass;
  throw ValidationError("unknown shift mode '" + std::string(name) +
                        "' (expected global|per_class)");
}

void GapSpec::Validate() const {
  if (num_classes < 2) throw ValidationError("num_classes must be at least 2");
  if (dim < 2) throw ValidationError("dim must be at least 2");
  if (queries_per_class < 1 || targets_per_class < 1) {
    throw ValidationError("per-class counts must be at least 1");
  }
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread)) {
    throw ValidationError("cluster_spread must be positive");
  }
  if (!(shift_magnitude >= 0.0) || !std::isfinite(shift_magnitude)) {
    throw ValidationError("shift_magnitude must be non-negative");
  }
}

Manifest GapSpec::ToManifest() const {
  Manifest m;
  m.Set("generator", "synthetic_gap");
  m.Set("rng", std::string(kRngAlgorithm));
  m.Set("seed", std::to_string(seed));
  m.Set("num_classes", std::to_string(num_classes));
  m.Set("dim", std::to_string(dim));
  m.Set("queries_per_class", std::to_string(queries_per_class));
  m.Set("targets_per_class", std::to_string(targets_per_class));
  m.Set("cluster_spread", FormatDouble(cluster_spread));
  m.Set("shift_magnitude", FormatDouble(shift_magnitude));
  m.Set("shift_mode", std::string(ToString(shift_mode)));
  return m;
}

std::string ClassLabel(std::size_t class_index) {
  return "class_" + std::to_string(class_index);
}

GapInstance Generate(const GapSpec& spec) {
  spec.Validate();
  Xoshiro256StarStar rng(spec.seed);

  std::vector<Vec> centers;
  centers.reserve(spec.num_classes);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    centers.push_back(UnitGaussian(rng, spec.dim));
  }
  std::vector<Vec> directions;
  const std::size_t num_directions =
      spec.shift_mode == ShiftMode::kGlobal ? 1 : spec.num_classes;
  for (std::size_t k = 0; k < num_directions; ++k) {
    directions.push_back(UnitGaussian(rng, spec.dim));
  }

  const auto emit = [&](std::size_t per_class, bool shifted) {
    std::vector<float> values;
    std::vector<std::string> labels;
    values.reserve(spec.num_classes * per_class * spec.dim);
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      const Vec* direction = nullptr;
      if (shifted) {
        direction = &directions[spec.shift_mode == ShiftMode::kGlobal ? 0 : c];
      }
      for (std::size_t r = 0; r < per_class; ++r) {
        const Vec row = DrawRow(rng, centers[c], spec.cluster_spread,
                                spec.shift_magnitude, direction);
        for (const double x : row) values.push_back(static_cast<float>(x));
        labels.push_back(ClassLabel(c));
      }
    }
    const std::size_t rows = spec.num_classes * per_class;
    return LabeledSet{EmbeddingMatrix(rows, spec.dim, std::move(values)),
                      std::move(labels)};
  };

  LabeledSet target = emit(spec.targets_per_class, false);
  LabeledSet query = emit(spec.queries_per_class, true);
  return GapInstance{std::move(query), std::move(target)};
}

}  // namespace driftalign
