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

#ifndef DRIFTALIGN_DESCRIPTOR_FUSION_H_
#define DRIFTALIGN_DESCRIPTOR_FUSION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftalign/embedding_io.h"

namespace driftalign {

enum class FusionScheme { kAdd, kConcat };
enum class Activation { kTanh, kRelu, kSigmoid, kNone };

std::string_view ToString(FusionScheme scheme);
std::string_view ToString(Activation activation);
// Throw ValidationError on unknown names.
FusionScheme ParseFusionScheme(std::string_view name);
Activation ParseActivation(std::string_view name);

struct FusionConfig {
  // Weight of the caption feature, in [0, 1].
  double lambda = 0.2;
  FusionScheme scheme = FusionScheme::kAdd;
  Activation activation = Activation::kTanh;
  // L2-normalize the pooled view feature and the text feature before mixing.
  bool pre_normalize = true;
  // L2-normalize the activated descriptor.
  bool post_normalize = true;

  void Validate() const;
  std::size_t OutputDim(std::size_t input_dim) const {
    return scheme == FusionScheme::kConcat ? 2 * input_dim : input_dim;
  }
};

// M view features of one object.
struct ViewFeatureBlock {
  std::string object_id;
  EmbeddingMatrix features;
};

// Column means of the block, accumulated in double precision.
std::vector<double> MeanPool(const ViewFeatureBlock& block);

// Mixes a pooled view feature with an optional caption feature:
//   add:    h = act(g' + lambda * f')
//   concat: h = act([g', lambda * f'])
// A missing text feature, or lambda == 0, contributes exact zeros. A
// zero-norm input is left as is by pre-normalization. object_id only labels
// errors.
std::vector<double> Fuse(std::span<const double> view,
                         std::optional<std::span<const double>> text,
                         const FusionConfig& cfg,
                         std::string_view object_id = "");

// Row i = Fuse(MeanPool(blocks[i]), text row i). text_features, when given,
// holds one row per block in the same order.
EmbeddingMatrix BuildDescriptorSet(
    std::span<const ViewFeatureBlock> blocks,
    const std::optional<EmbeddingMatrix>& text_features,
    const FusionConfig& cfg);

// Splits a stacked (objects * views_per_object) x d matrix into per-object
// blocks. object_ids may be empty, in which case ids are "obj_<index>".
std::vector<ViewFeatureBlock> SplitViewBlocks(
    const EmbeddingMatrix& stacked, std::size_t views_per_object,
    std::span<const std::string> object_ids = {});

}  // namespace driftalign

#endif  // DRIFTALIGN_DESCRIPTOR_FUSION_H_
