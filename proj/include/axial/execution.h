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

#ifndef AXIAL_EXECUTION_H_
#define AXIAL_EXECUTION_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "axial/graph.h"
#include "json.hpp"

namespace axial {

// Bytes per element used for reports (BFloat16). Execution itself is
// float64 and is accounted with kExecElementSize.
inline constexpr int kReportElementSize = 2;

// A contiguous execution-order span re-run slice by slice along one
// dimension of extent `extent`.
struct ChunkRegion {
  int start = 0;
  int end = 0;  // inclusive
  std::int64_t extent = 0;
  // Chunked dim of every non-parameter node in [start, end], plus the dim
  // along which each sliced external input is first read.
  std::map<int, int> chunk_dim;
  // Permutes inside the span whose input is computed before it. They run
  // once ahead of the loop and are read like external inputs.
  std::vector<int> hoisted;

  // Derived by make_region.
  std::vector<int> chunk_inputs;     // external nodes read as slices
  std::vector<int> nonchunk_inputs;  // external nodes read whole
  std::vector<int> outputs;          // span nodes needed after the span

  bool contains(int id) const { return id >= start && id <= end; }
  bool is_hoisted(int id) const;
  // Non-parameter, non-hoisted node of the span.
  bool is_internal(const Graph& g, int id) const;
  nlohmann::json to_json() const;
};

// Checks the chunking rules for `chunk_dim` over [start, end] and fills in
// the derived fields. Returns an empty string when legal, otherwise the
// reason, naming the node and dim at fault.
std::string check_region(const Graph& g, int start, int end,
                         const std::map<int, int>& chunk_dim, const std::vector<int>& hoisted = {},
                         ChunkRegion* region = nullptr);
// As check_region but throws PlanError.
ChunkRegion make_region(const Graph& g, int start, int end, const std::map<int, int>& chunk_dim,
                        const std::vector<int>& hoisted = {});

struct PlannedRegion {
  ChunkRegion region;
  std::int64_t chunk_size = 1;
  std::int64_t iterations() const { return (region.extent + chunk_size - 1) / chunk_size; }
};

struct ChunkPlan {
  std::vector<PlannedRegion> regions;  // ascending, non-overlapping
  nlohmann::json search_log = nlohmann::json::array();

  bool empty() const { return regions.empty(); }
  nlohmann::json to_json() const;
  // Rebuilds and re-checks every region against `g`.
  static ChunkPlan from_json(const Graph& g, const nlohmann::json& j);
};

// Throws PlanError if any region is illegal, overlapping or mis-sized.
void validate_plan(const Graph& g, const ChunkPlan& plan);

struct MemoryProfile {
  // Live bytes right after each node's output is allocated, before its dead
  // inputs are released.
  std::vector<std::int64_t> footprints;
  // Parameter nodes carry no activation and are left out of statistics.
  std::vector<bool> counted;
  std::int64_t peak_bytes = 0;
  int peak_node = -1;
  int element_size = kReportElementSize;

  // Fraction of counted nodes whose footprint is below threshold * peak.
  double fraction_below(double threshold) const;
  nlohmann::json to_json() const;
};

// Liveness simulation of the execution order. Graph inputs are live from the
// start, every other buffer from its producer to its last consumer, and
// graph outputs to the end. Under a plan each region preallocates its
// outputs, holds one chunk of every internal buffer, and releases external
// inputs after its loop.
MemoryProfile estimate_memory(const Graph& g, const ChunkPlan* plan = nullptr,
                              int element_size = kReportElementSize);

double footprint_stats(const MemoryProfile& profile, double threshold);

struct ExecResult {
  std::vector<Tensor> outputs;  // in graph output order
  // Peak activation bytes measured by the allocator during execution,
  // counting graph inputs but not parameters.
  std::int64_t peak_bytes = 0;
};

// Runs the graph in order, releasing buffers after their last consumer.
// Inputs are taken over; shared or strided inputs are copied first so the
// executor owns every activation it accounts for.
ExecResult execute(const Graph& g, std::vector<Tensor> inputs, const ChunkPlan* plan = nullptr);

}  // namespace axial

#endif  // AXIAL_EXECUTION_H_
