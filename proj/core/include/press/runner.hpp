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

// Staged, resumable pipeline: arguments -> elicitation -> judging -> typology
// -> stability -> sampling -> uncertainty -> auroc -> reversal -> fa -> reports.
//
// Every stage reads its inputs from, and writes its outputs to, JSONL files
// in the output directory. A ledger records the input hash of each finished
// stage so unchanged stages are skipped on re-invocation.

#ifndef PRESS_RUNNER_HPP_
#define PRESS_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "press/config.hpp"

namespace press::runner {

struct StageMarker {
  bool done = false;
  std::string input_hash;
  int64_t records = 0;
};

struct RunLedger {
  std::map<std::string, StageMarker> stages;

  static RunLedger load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  // True when the stage finished with the same input hash.
  bool is_current(Stage s, const std::string& input_hash) const;
};

struct RunOptions {
  // Run only these stages (their dependencies must already be current).
  std::vector<Stage> only;
  // Serve all completions and NLI verdicts from this log; no live backends.
  std::optional<std::filesystem::path> replay_log;
  // Skip the generation stages: analysis and reports from persisted JSONL.
  bool report_only = false;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> executed;
  std::vector<std::string> skipped;
  std::vector<std::string> gaps;
  // Calls that reached a live backend or classifier (cache misses).
  uint64_t backend_calls = 0;
  // Calls served from the replay log.
  uint64_t replayed_calls = 0;
  std::filesystem::path output_dir;
};

// Exit codes: 0 success, 2 completed with gaps (see gaps.json), 3 invalid
// config (nothing executed).
RunResult run(const RunConfig& config, const RunOptions& options = {});

// Files under <out>/reports, in emission order.
std::vector<std::string> report_files();

}  // namespace press::runner

#endif  // PRESS_RUNNER_HPP_
