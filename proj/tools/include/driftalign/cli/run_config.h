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

#ifndef DRIFTALIGN_CLI_RUN_CONFIG_H_
#define DRIFTALIGN_CLI_RUN_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driftalign/alignment_optimizer.h"
#include "driftalign/descriptor_fusion.h"
#include "driftalign/synthetic_gap.h"

namespace driftalign::cli {

// Everything a run can be parameterized by. Values are layered: built-in
// defaults, then a key=value config file, then command-line flags.
struct RunConfig {
  FusionConfig fusion;
  AlignmentConfig alignment;
  GapSpec gap;
  // Input/output paths keyed by name (query, target, query_labels,
  // target_labels, out_dir).
  std::map<std::string, std::string> paths;

  void Validate() const;
};

// Canonical key: lower case with '-' folded to '_'.
std::string CanonicalKey(std::string_view key);

// Throws ValidationError naming the key for unknown keys or unparsable
// values.
void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value);

// Reads "key=value" lines; blank lines and lines starting with '#' are
// ignored. Throws IoError if the file cannot be opened.
std::vector<std::pair<std::string, std::string>> ReadConfigFile(
    const std::filesystem::path& path);

// Keys accepted by ApplySetting, in documentation order.
const std::vector<std::string>& KnownKeys();

// Default value rendered for --help.
std::string DefaultValueFor(std::string_view key);

}  // namespace driftalign::cli

#endif  // DRIFTALIGN_CLI_RUN_CONFIG_H_
