// SPDX-License-Identifier: Apache-2.0
//
// drsim - drone relay station assisted V2X link simulator
// Copyright (C) 2026 drsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "drsim/sim.hpp"

namespace drsim {

// Raised for malformed files, unknown keys, type mismatches, and
// out-of-range values; the CLI maps it to exit code 1.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ConfigJson = nlohmann::ordered_json;

// Every key with its default — the schema against which files and
// --set overrides are checked.
ConfigJson default_config_json();

// Parse + validate a fully merged document.
SimConfig config_from_json(const ConfigJson& doc);

// Resolved round-trippable document (key order fixed), used in manifests.
ConfigJson config_to_json(const SimConfig& cfg);

// Range checks shared by all entry points.
void validate_config(const SimConfig& cfg);

// Merge user keys into the defaults; unknown keys and structural
// mismatches raise config_error with the dotted path.
void merge_config(ConfigJson& dst, const ConfigJson& src, const std::string& path = "");

// Assign one value at a dotted path that must already exist in the schema.
void set_config_value(ConfigJson& doc, const std::string& dotted_key, const ConfigJson& value);

// Apply one "dotted.key=value" override; the value is parsed as JSON when
// possible and taken as a raw string otherwise.
void apply_override(ConfigJson& doc, const std::string& spec);

// Merged but unparsed document: defaults <- optional file (or embedded
// manifest config) <- repeated --set overrides <- --seed/--steps shortcuts.
// This is what sweeps perturb per replica before parsing.
ConfigJson load_config_doc(const std::string& path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed = std::nullopt,
                           std::optional<std::uint64_t> steps = std::nullopt);

// Full pipeline ending in a validated SimConfig.
SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed = std::nullopt,
                      std::optional<std::uint64_t> steps = std::nullopt);

}  // namespace drsim
