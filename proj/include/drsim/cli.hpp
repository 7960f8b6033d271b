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

namespace drsim::cli {

// Shared flags of every subcommand. Exit codes across the CLI:
// 0 success, 1 configuration problem, 2 runtime failure.
struct CommonArgs {
  std::string config_path;  // empty = built-in defaults
  std::string out_dir = "drsim_out";
  std::vector<std::string> overrides;  // repeated --set key=value
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
};

struct EvalArgs {
  CommonArgs common;
  std::string checkpoint_path;
  bool random_policy = false;  // uniform-random yaw baseline instead of the greedy policy
};

struct SweepArgs {
  CommonArgs common;
  std::string sweep_path;
  int jobs = 0;  // 0 = pick from hardware concurrency
};

int cmd_train(const CommonArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_surface(const CommonArgs& args);
int cmd_sweep(const SweepArgs& args);

}  // namespace drsim::cli
