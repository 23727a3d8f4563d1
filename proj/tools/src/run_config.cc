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

#include "driftalign/cli/run_config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "driftalign/error.h"

namespace driftalign::cli {
namespace {

double ParseDouble(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("invalid number '" + std::string(text) + "' for " +
                          std::string(key));
  }
  return v;
}

std::uint64_t ParseUnsigned(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("invalid count '" + std::string(text) + "' for " +
                          std::string(key));
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ValidationError("invalid boolean '" + std::string(text) + "' for " +
                        std::string(key));
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void RunConfig::Validate() const {
  fusion.Validate();
  alignment.Validate();
  gap.Validate();
}

std::string CanonicalKey(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (const char ch : key) {
    out.push_back(ch == '-' ? '_'
                            : static_cast<char>(std::tolower(
                                  static_cast<unsigned char>(ch))));
  }
  return out;
}

const std::vector<std::string>& KnownKeys() {
  static const std::vector<std::string> keys = {
      "alpha",         "tau_t",          "tau_i",
      "eta0",          "iterations",     "update_rule",
      "projection",    "refresh_pseudo_labels",
      "lambda",        "fusion_scheme",  "activation",
      "pre_normalize", "post_normalize",
      "seed",          "num_classes",    "dim",
      "queries_per_class", "targets_per_class", "cluster_spread",
      "shift_magnitude",   "shift_mode",
      "query",         "target",         "query_labels",
      "target_labels", "out_dir",
  };
  return keys;
}

std::string DefaultValueFor(std::string_view key) {
  const RunConfig d;
  const std::string k = CanonicalKey(key);
  if (k == "alpha") return FormatDouble(d.alignment.alpha);
  if (k == "tau_t") return FormatDouble(d.alignment.tau_t);
  if (k == "tau_i") return FormatDouble(d.alignment.tau_i);
  if (k == "eta0") return FormatDouble(d.alignment.eta0);
  if (k == "iterations") return std::to_string(d.alignment.iterations);
  if (k == "update_rule") return std::string(ToString(d.alignment.update_rule));
  if (k == "projection") return std::string(ToString(d.alignment.projection));
  if (k == "refresh_pseudo_labels") {
    return d.alignment.refresh_pseudo_labels ? "true" : "false";
  }
  if (k == "lambda") return FormatDouble(d.fusion.lambda);
  if (k == "fusion_scheme") return std::string(ToString(d.fusion.scheme));
  if (k == "activation") return std::string(ToString(d.fusion.activation));
  if (k == "pre_normalize") return d.fusion.pre_normalize ? "true" : "false";
  if (k == "post_normalize") return d.fusion.post_normalize ? "true" : "false";
  if (k == "seed") return std::to_string(d.gap.seed);
  if (k == "num_classes") return std::to_string(d.gap.num_classes);
  if (k == "dim") return std::to_string(d.gap.dim);
  if (k == "queries_per_class") return std::to_string(d.gap.queries_per_class);
  if (k == "targets_per_class") return std::to_string(d.gap.targets_per_class);
  if (k == "cluster_spread") return FormatDouble(d.gap.cluster_spread);
  if (k == "shift_magnitude") return FormatDouble(d.gap.shift_magnitude);
  if (k == "shift_mode") return std::string(ToString(d.gap.shift_mode));
  return "";
}

void ApplySetting(RunConfig& config, std::string_view raw_key,
                  std::string_view value) {
  const std::string key = CanonicalKey(raw_key);
  auto& a = config.alignment;
  auto& f = config.fusion;
  auto& g = config.gap;
  if (key == "alpha") {
    a.alpha = ParseDouble(key, value);
  } else if (key == "tau_t") {
    a.tau_t = ParseDouble(key, value);
  } else if (key == "tau_i") {
    a.tau_i = ParseDouble(key, value);
  } else if (key == "eta0") {
    a.eta0 = ParseDouble(key, value);
  } else if (key == "iterations") {
    a.iterations = ParseUnsigned(key, value);
  } else if (key == "update_rule") {
    a.update_rule = ParseUpdateRule(value);
  } else if (key == "projection") {
    a.projection = ParseProjection(value);
  } else if (key == "refresh_pseudo_labels") {
    a.refresh_pseudo_labels = ParseBool(key, value);
  } else if (key == "lambda") {
    f.lambda = ParseDouble(key, value);
  } else if (key == "fusion_scheme") {
    f.scheme = ParseFusionScheme(value);
  } else if (key == "activation") {
    f.activation = ParseActivation(value);
  } else if (key == "pre_normalize") {
    f.pre_normalize = ParseBool(key, value);
  } else if (key == "post_normalize") {
    f.post_normalize = ParseBool(key, value);
  } else if (key == "seed") {
    g.seed = ParseUnsigned(key, value);
  } else if (key == "num_classes") {
    g.num_classes = ParseUnsigned(key, value);
  } else if (key == "dim") {
    g.dim = ParseUnsigned(key, value);
  } else if (key == "queries_per_class") {
    g.queries_per_class = ParseUnsigned(key, value);
  } else if (key == "targets_per_class") {
    g.targets_per_class = ParseUnsigned(key, value);
  } else if (key == "cluster_spread") {
    g.cluster_spread = ParseDouble(key, value);
  } else if (key == "shift_magnitude") {
    g.shift_magnitude = ParseDouble(key, value);
  } else if (key == "shift_mode") {
    g.shift_mode = ParseShiftMode(value);
  } else if (key == "query" || key == "target" || key == "query_labels" ||
             key == "target_labels" || key == "out_dir") {
    config.paths[key] = std::string(value);
  } else {
    throw ValidationError("unknown config key '" + std::string(raw_key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> ReadConfigFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected key=value");
    }
    settings.emplace_back(Trim(std::string_view(trimmed).substr(0, eq)),
                          Trim(std::string_view(trimmed).substr(eq + 1)));
  }
  return settings;
}

}  // namespace driftalign::cli
