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


#ifndef AXIAL_AUTOCHUNK_H_
#define AXIAL_AUTOCHUNK_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axial/execution.h"
#include "axial/graph.h"
#include "json.hpp"

namespace axial {

// Window of nodes around the peak node that a single search step may cover.
struct ChunkSpan {
  int start = -1;
  int end = -1;    // inclusive
  int driver = -1;  // highest-footprint node the span was grown from
  bool empty() const { return driver < 0; }
};

struct AutoChunkOptions {
  int element_size = kReportElementSize;
  // Max non-parameter nodes on each side of the driver.
  int window = 24;
};

// Grows a span from the highest-footprint node outside existing regions.
// The span reaches back to the producers and forward to the last consumers
// of the activations alive at that node, stopping at graph inputs, existing
// regions and the window. Empty when the driver is a graph input.
ChunkSpan find_max_chunk(const Graph& g, const ChunkPlan& plan, const MemoryProfile& profile,
                         int window = AutoChunkOptions{}.window);

// Every legal region over sub-spans of `span` that contains the driver.
// Sub-spans are screened on their end nodes first, then chunk dims are
// traced upward from the region outputs.
std::vector<ChunkRegion> find_possible_chunks(const Graph& g, const ChunkPlan& plan,
                                              const ChunkSpan& span);

struct ChunkChoice {
  PlannedRegion planned;
  std::int64_t peak_bytes = 0;       // whole graph, with the region added
  std::int64_t span_peak_bytes = 0;  // max footprint over the search span
  bool meets_budget = false;         // span peak within budget
};

// Sizes each candidate to the largest chunk whose span peak meets the
// budget (or, failing that, reaches the lowest span peak the candidate can
// reach), then ranks them: candidates that meet the budget by fewest
// iterations, then larger peak reduction, then earlier start; otherwise by
// lowest span peak, then fewest iterations. A candidate must lower the
// graph peak, or keep it and leave fewer nodes at it. `log`, when given,
// receives one entry per candidate.
std::optional<ChunkChoice> find_best_chunk(const Graph& g, const ChunkPlan& plan,
                                           std::int64_t budget_bytes,
                                           const std::vector<ChunkRegion>& candidates,
                                           const ChunkSpan& span,
                                           int element_size = kReportElementSize,
                                           nlohmann::json* log = nullptr);

// Adds regions until the estimated peak fits the budget. Throws
// InfeasibleBudgetError with the lowest peak reached otherwise.
ChunkPlan autochunk_search(const Graph& g, std::int64_t budget_bytes,
                           const AutoChunkOptions& options = {});

// Executable recipe for a graph under a plan: the node schedule with one
// loop per region.
struct SliceSpec {
  int node = 0;   // consumer
  int input = 0;  // operand position
  int dim = 0;    // sliced dim of the operand
  bool operator==(const SliceSpec&) const = default;
};

struct LoopSpec {
  int start = 0;
  int end = 0;
  std::int64_t extent = 0;
  std::int64_t chunk_size = 0;
  std::int64_t iterations = 0;
  std::int64_t last_chunk = 0;
  std::vector<int> hoisted;          // run once before the loop
  std::vector<int> preallocated;     // region outputs, allocated in full
  std::vector<std::pair<int, int>> body;  // (node, chunk dim)
  std::vector<SliceSpec> slices;     // external operands read as slices
  std::vector<std::pair<int, int>> scatters;  // (output node, dim) written per slice
  bool operator==(const LoopSpec&) const = default;
};

struct ScheduleStep {
  int node = -1;                // plain node, or -1 for a loop
  std::optional<LoopSpec> loop;
  bool operator==(const ScheduleStep&) const = default;
};

struct ExecutionPlan {
  std::uint64_t graph_digest = 0;
  std::vector<ScheduleStep> schedule;
  bool operator==(const ExecutionPlan&) const = default;

  nlohmann::json to_json() const;
  static ExecutionPlan from_json(const nlohmann::json& j);
  // Re-derives the chunk plan, checking it against `g`. Throws PlanError on
  // a digest mismatch or an illegal loop.
  ChunkPlan to_chunk_plan(const Graph& g) const;
};

ExecutionPlan plan_codegen(const Graph& g, const ChunkPlan& plan);

// Runs `g` under `plan`. Outputs match unchunked execution and the measured
// peak equals estimate_memory at 8-byte accounting.
ExecResult execute_chunked(const Graph& g, const ChunkPlan& plan, std::vector<Tensor> inputs);
ExecResult execute_chunked(const Graph& g, const ExecutionPlan& plan, std::vector<Tensor> inputs);

}  // namespace axial

#endif  // AXIAL_AUTOCHUNK_H_
