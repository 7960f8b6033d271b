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

#include <string>

#include "CLI11.hpp"

#include "drsim/cli.hpp"

namespace {

void add_common(CLI::App* cmd, drsim::cli::CommonArgs* args) {
  cmd->add_option("--config", args->config_path,
                  "JSON config file or a manifest.json from an earlier run");
  cmd->add_option("--seed", args->seed, "override run.seed");
  cmd->add_option("--steps", args->steps, "override run.steps");
  cmd->add_option("--out-dir", args->out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--set", args->overrides,
                  "override one config value, e.g. --set agent.epsilon=0.1 (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drone relay station assisted V2X link simulator"};
  app.require_subcommand(1);

  drsim::cli::CommonArgs train_args;
  CLI::App* train = app.add_subcommand("train", "run the learning simulation");
  add_common(train, &train_args);

  drsim::cli::EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a saved policy");
  add_common(eval, &eval_args.common);
  eval->add_option("--checkpoint", eval_args.checkpoint_path, "q-table checkpoint to load")
      ->required();
  eval->add_flag("--random", eval_args.random_policy,
                 "uniform-random yaw baseline instead of the greedy policy");

  drsim::cli::CommonArgs surface_args;
  CLI::App* surface = app.add_subcommand("surface", "path-loss surface over an xy grid");
  add_common(surface, &surface_args);

  drsim::cli::SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter/seed grid of simulations");
  add_common(sweep, &sweep_args.common);
  sweep->add_option("--sweep", sweep_args.sweep_path,
                    "sweep spec JSON with param_grid and seeds")
      ->required();
  sweep->add_option("--jobs", sweep_args.jobs, "parallel replicas (default: hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; anything else is a usage problem.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (train->parsed()) return drsim::cli::cmd_train(train_args);
  if (eval->parsed()) return drsim::cli::cmd_eval(eval_args);
  if (surface->parsed()) return drsim::cli::cmd_surface(surface_args);
  if (sweep->parsed()) return drsim::cli::cmd_sweep(sweep_args);
  return 1;
}
