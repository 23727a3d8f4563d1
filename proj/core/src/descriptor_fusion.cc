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

#include "driftalign/descriptor_fusion.h"

#include <cmath>
#include <string>

#include "driftalign/error.h"

namespace driftalign {
namespace {

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

void NormalizeInPlace(std::vector<double>& v) {
  const double n = Norm(v);
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

double Activate(Activation act, double x) {
  switch (act) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::kNone:
      return x;
  }
  return x;
}

}  // namespace

std::string_view ToString(FusionScheme scheme) {
  return scheme == FusionScheme::kAdd ? "add" : "concat";
}

std::string_view ToString(Activation activation) {
  switch (activation) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kNone:
      return "none";
  }
  return "none";
}

FusionScheme ParseFusionScheme(std::string_view name) {
  if (name == "add") return FusionScheme::kAdd;
  if (name == "concat") return FusionScheme::kConcat;
  throw ValidationError("unknown fusion scheme '" + std::string(name) +
                        "' (expected add|concat)");
}

Activation ParseActivation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "none") return Activation::kNone;
  throw ValidationError("unknown activation '" + std::string(name) +
                        "' (expected tanh|relu|sigmoid|none)");
}

void FusionConfig::Validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1], got " +
                          std::to_string(lambda));
  }
}

std::vector<double> MeanPool(const ViewFeatureBlock& block) {
  const EmbeddingMatrix& f = block.features;
  std::vector<double> mean(f.dim(), 0.0);
  for (std::size_t r = 0; r < f.rows(); ++r) {
    const auto row = f.row(r);
    for (std::size_t c = 0; c < f.dim(); ++c) mean[c] += row[c];
  }
  const double m = static_cast<double>(f.rows());
  for (double& x : mean) x /= m;
  return mean;
}

std::vector<double> Fuse(std::span<const double> view,
                         std::optional<std::span<const double>> text,
                         const FusionConfig& cfg, std::string_view object_id) {
  cfg.Validate();
  if (text && text->size() != view.size()) {
    throw ValidationError("text feature dim " + std::to_string(text->size()) +
                          " does not match view feature dim " +
                          std::to_string(view.size()));
  }
  const std::size_t d = view.size();
  const bool use_text = text.has_value() && cfg.lambda != 0.0;

  std::vector<double> g(view.begin(), view.end());
  std::vector<double> f;
  if (use_text) f.assign(text->begin(), text->end());
  if (cfg.pre_normalize) {
    NormalizeInPlace(g);
    if (use_text) NormalizeInPlace(f);
  }

  std::vector<double> h(cfg.OutputDim(d), 0.0);
  if (cfg.scheme == FusionScheme::kAdd) {
    for (std::size_t j = 0; j < d; ++j) {
      h[j] = use_text ? g[j] + cfg.lambda * f[j] : g[j];
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      h[j] = g[j];
      h[d + j] = use_text ? cfg.lambda * f[j] : 0.0;
    }
  }
  for (double& x : h) x = Activate(cfg.activation, x);

  if (cfg.post_normalize) {
    const double n = Norm(h);
    if (n == 0.0) {
      throw DegenerateError("zero descriptor for object '" +
                            std::string(object_id) + "'");
    }
    for (double& x : h) x /= n;
  }
  return h;
}

EmbeddingMatrix BuildDescriptorSet(
    std::span<const ViewFeatureBlock> blocks,
    const std::optional<EmbeddingMatrix>& text_features,
    const FusionConfig& cfg) {
  cfg.Validate();
  if (blocks.empty()) throw ValidationError("no view blocks given");
  const std::size_t d = blocks.front().features.dim();
  for (const auto& b : blocks) {
    if (b.features.dim() != d) {
      throw ValidationError("view block '" + b.object_id + "' has dim " +
                            std::to_string(b.features.dim()) + ", expected " +
                            std::to_string(d));
    }
  }
  if (text_features) {
    if (text_features->rows() != blocks.size()) {
      throw ValidationError("text feature rows " +
                            std::to_string(text_features->rows()) +
                            " do not match view block count " +
                            std::to_string(blocks.size()));
    }
    if (text_features->dim() != d) {
      throw ValidationError("text feature dim " +
                            std::to_string(text_features->dim()) +
                            " does not match view dim " + std::to_string(d));
    }
  }

  const std::size_t out_dim = cfg.OutputDim(d);
  std::vector<float> values;
  values.reserve(blocks.size() * out_dim);
  std::vector<double> text_row;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::vector<double> g = MeanPool(blocks[i]);
    std::optional<std::span<const double>> text;
    if (text_features) {
      const auto row = text_features->row(i);
      text_row.assign(row.begin(), row.end());
      text = std::span<const double>(text_row);
    }
    const std::vector<double> h = Fuse(g, text, cfg, blocks[i].object_id);
    for (const double x : h) values.push_back(static_cast<float>(x));
  }
  return EmbeddingMatrix(blocks.size(), out_dim, std::move(values));
}

std::vector<ViewFeatureBlock> SplitViewBlocks(
    const EmbeddingMatrix& stacked, std::size_t views_per_object,
    std::span<const std::string> object_ids) {
  if (views_per_object == 0 || stacked.rows() % views_per_object != 0) {
    throw ValidationError("stacked view matrix has " +
                          std::to_string(stacked.rows()) +
                          " rows, not a multiple of views per object " +
                          std::to_string(views_per_object));
  }
  const std::size_t objects = stacked.rows() / views_per_object;
  if (!object_ids.empty() && object_ids.size() != objects) {
    throw ValidationError("object id count " +
                          std::to_string(object_ids.size()) +
                          " does not match object count " +
                          std::to_string(objects));
  }
  const std::size_t d = stacked.dim();
  std::vector<ViewFeatureBlock> blocks;
  blocks.reserve(objects);
  for (std::size_t o = 0; o < objects; ++o) {
    const auto first = stacked.values().begin() +
                       static_cast<std::ptrdiff_t>(o * views_per_object * d);
    std::vector<float> values(
        first, first + static_cast<std::ptrdiff_t>(views_per_object * d));
    blocks.push_back(ViewFeatureBlock{
        object_ids.empty() ? "obj_" + std::to_string(o) : object_ids[o],
        EmbeddingMatrix(views_per_object, d, std::move(values))});
  }
  return blocks;
}

}  // namespace driftalign
