/* Copyright 2026 The AxialFold Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#ifndef AXIAL_TOOLS_COMMANDS_H_
#define AXIAL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "axial/evoformer.h"
#include "json.hpp"

namespace axial::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kModelConstraint = 3, kInfeasible = 4 };

struct DimOptions {
  std::int64_t n_seq = 8;
  std::int64_t n_res = 16;
  std::int64_t h_msa = 8;
  std::int64_t h_pair = 4;
  int heads = 2;
  std::int64_t hidden_proj = 4;
  std::uint64_t seed = 0;

  EvoConfig config() const;
};

// A report plus the process exit code it implies.
struct Outcome {
  nlohmann::json report;
  int exit_code = kOk;
};

struct AnalyzeOptions {
  DimOptions dims;
  std::int64_t layers = 1;
  int element_size = 2;
  std::string graph_in;   // analyze this graph instead of tracing
  std::string graph_out;  // write the analyzed graph here
};
Outcome cmd_analyze(const AnalyzeOptions& o);

struct CommVolumeOptions {
  double k = 1.0;
  int devices = 1;
  int heads = 4;
  std::string mode = "both";  // both | tp | dap
};
Outcome cmd_commvolume(const CommVolumeOptions& o);

struct SimulateOptions {
  DimOptions dims;
  int devices = 1;
  int element_size = 2;
  bool concurrent = false;
  std::optional<std::uint64_t> order_seed;  // shuffle device execution order
};
Outcome cmd_simulate(const SimulateOptions& o);

struct PlanOptions {
  DimOptions dims;
  int element_size = 2;
  std::optional<std::int64_t> budget;
  std::optional<double> budget_frac;
  int window = 24;
};
Outcome cmd_plan(const PlanOptions& o);

struct RunPlanOptions {
  std::string plan_file;
};
Outcome cmd_run_plan(const RunPlanOptions& o);

struct ScheduleOptions {
  std::string timeline_file;  // empty: built-in example
  std::string mode = "both";  // both | sync | async
};
Outcome cmd_schedule(const ScheduleOptions& o);

// Runs `fn`, mapping library exceptions to exit codes and error reports.
Outcome guarded(const std::function<Outcome()>& fn);

// Key/value rendering of a report for --format table.
std::string render_table(const nlohmann::json& report);

}  // namespace axial::cli

#endif  // AXIAL_TOOLS_COMMANDS_H_
