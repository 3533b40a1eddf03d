// Copyright 2026 The press Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// press: run the stance-stability pipeline from a JSON config.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "press/common.hpp"
#include "press/config.hpp"
#include "press/runner.hpp"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> stages;
  std::string out;
  std::optional<uint64_t> seed;
  std::string replay_log;
};

void add_common(CLI::App* cmd, Args& a, bool stages) {
  cmd->add_option("--config", a.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Output directory (overrides the config)");
  cmd->add_option("--seed", a.seed, "Base seed (overrides the config)");
  if (stages) {
    cmd->add_option("--stage", a.stages, "Run only this stage; repeatable")
        ->check([](const std::string& s) {
          return press::runner::parse_stage(s) ? std::string() : "unknown stage '" + s + "'";
        });
  }
}

int print_result(const press::runner::RunResult& r) {
  for (const auto& s : r.executed) fmt::print("ran      {}\n", s);
  for (const auto& s : r.skipped) fmt::print("current  {}\n", s);
  for (const auto& g : r.gaps) fmt::print(stderr, "{}: {}\n", r.exit_code == 3 ? "invalid" : "gap", g);
  fmt::print("backend calls: {}\n", r.backend_calls);
  if (r.replayed_calls > 0) fmt::print("replayed calls: {}\n", r.replayed_calls);
  fmt::print("output: {}\n", r.output_dir.string());
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stance-stability harness for language models"};
  app.require_subcommand(1);
  Args args;

  auto* run = app.add_subcommand("run", "Run the configured stages (resumes from the ledger)");
  add_common(run, args, true);
  run->add_option("--replay-log", args.replay_log, "Serve every completion and verdict from this log")
      ->check(CLI::ExistingFile);
  auto* validate = app.add_subcommand("validate", "Check a configuration without contacting any backend");
  add_common(validate, args, false);
  auto* report = app.add_subcommand("report", "Recompute analyses and reports from persisted records");
  add_common(report, args, false);
  auto* replay = app.add_subcommand("replay", "Re-run from a recorded request log with no live backends");
  add_common(replay, args, true);
  replay->add_option("--replay-log", args.replay_log, "Recorded request log")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  press::runner::RunConfig config;
  try {
    config = press::runner::load_config(args.config);
  } catch (const press::Error& e) {
    fmt::print(stderr, "invalid: {}\n", e.what());
    return 3;
  }
  if (!args.out.empty()) config.output_dir = args.out;
  if (args.seed) config.seed = *args.seed;

  if (validate->parsed()) {
    const auto violations = press::runner::validate_config(config);
    for (const auto& v : violations) fmt::print(stderr, "invalid: {}\n", v);
    if (!violations.empty()) return 3;
    fmt::print("ok: {} models, stages:", config.models.size());
    for (auto s : config.stages) fmt::print(" {}", press::runner::to_string(s));
    fmt::print("\n");
    return 0;
  }

  press::runner::RunOptions options;
  for (const auto& s : args.stages) options.only.push_back(*press::runner::parse_stage(s));
  if (!args.replay_log.empty()) options.replay_log = args.replay_log;
  options.report_only = report->parsed();

  try {
    return print_result(press::runner::run(config, options));
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
