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

#include <algorithm>
#include <string>

#include "axial/errors.h"
#include "axial/execution.h"

namespace axial {
namespace {

using nlohmann::json;

void push_unique(std::vector<int>& v, int x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string node_label(const Graph& g, int id) {
  return "node " + std::to_string(id) + " (" + op_name(g.node(id).op) + ")";
}

}  // namespace

bool ChunkRegion::is_hoisted(int id) const {
  return std::find(hoisted.begin(), hoisted.end(), id) != hoisted.end();
}

bool ChunkRegion::is_internal(const Graph& g, int id) const {
  return contains(id) && g.node(id).op != OpKind::kParam && !is_hoisted(id);
}

json ChunkRegion::to_json() const {
  json dims = json::array();
  for (const auto& [id, d] : chunk_dim) dims.push_back({id, d});
  return {{"start", start},
          {"end", end},
          {"extent", extent},
          {"chunk_dim", dims},
          {"hoisted", hoisted},
          {"chunk_inputs", chunk_inputs},
          {"nonchunk_inputs", nonchunk_inputs},
          {"outputs", outputs}};
}

std::string check_region(const Graph& g, int start, int end, const std::map<int, int>& chunk_dim,
                         const std::vector<int>& hoisted, ChunkRegion* region) {
  if (start < 0 || end >= g.size() || start > end) {
    return "span [" + std::to_string(start) + ", " + std::to_string(end) + "] is outside the graph";
  }
  ChunkRegion r;
  r.start = start;
  r.end = end;
  r.extent = -1;
  r.hoisted = hoisted;
  std::sort(r.hoisted.begin(), r.hoisted.end());
  for (int h : r.hoisted) {
    if (!r.contains(h) || g.node(h).op != OpKind::kPermute) {
      return "hoisted node " + std::to_string(h) + " is not a permute inside the span";
    }
    const int src = g.node(h).inputs[0];
    if (r.contains(src) && g.node(src).op != OpKind::kParam) {
      return node_label(g, h) + " cannot be hoisted: its input " + std::to_string(src) + " is inside the span";
    }
  }
  for (int id = start; id <= end; ++id) {
    const Node& n = g.node(id);
    if (n.op == OpKind::kParam || r.is_hoisted(id)) continue;
    if (n.op == OpKind::kInput) return node_label(g, id) + " is a graph input and cannot be chunked";
    const auto it = chunk_dim.find(id);
    if (it == chunk_dim.end()) return node_label(g, id) + " has no chunk dimension";
    const int d = it->second;
    if (d < 0 || d >= static_cast<int>(n.shape.size())) {
      return node_label(g, id) + " has no dim " + std::to_string(d);
    }
    if (n.flow.is_compute(d)) return node_label(g, id) + " dim " + std::to_string(d) + " is a compute dimension";
    if (r.extent < 0) r.extent = n.shape[d];
    if (n.shape[d] != r.extent) {
      return node_label(g, id) + " dim " + std::to_string(d) + " has extent " + std::to_string(n.shape[d]) +
             ", region extent is " + std::to_string(r.extent);
    }
    r.chunk_dim[id] = d;
  }
  if (r.extent < 0) return "span has no chunkable nodes";

  std::map<int, int> external_dim;
  for (int id = start; id <= end; ++id) {
    const Node& n = g.node(id);
    if (!r.is_internal(g, id)) continue;
    const int d = r.chunk_dim.at(id);
    for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) {
      const int p = n.inputs[k];
      const int e = n.flow.source_dim(d, k);
      if (r.is_internal(g, p)) {
        const int want = r.chunk_dim.at(p);
        if (e != want) {
          return node_label(g, id) + " dim " + std::to_string(d) + " does not flow to dim " +
                 std::to_string(want) + " of its input " + node_label(g, p);
        }
      } else if (e >= 0) {
        push_unique(r.chunk_inputs, p);
        external_dim.emplace(p, e);
      } else {
        push_unique(r.nonchunk_inputs, p);
      }
    }
  }
  const auto cons = g.consumers();
  for (int id = start; id <= end; ++id) {
    if (!r.is_internal(g, id)) continue;
    const bool used_after = !cons[id].empty() && cons[id].back() > end;
    if (used_after || g.is_output(id)) r.outputs.push_back(id);
  }
  for (const auto& [p, e] : external_dim) r.chunk_dim[p] = e;
  std::sort(r.chunk_inputs.begin(), r.chunk_inputs.end());
  std::sort(r.nonchunk_inputs.begin(), r.nonchunk_inputs.end());
  if (region != nullptr) *region = std::move(r);
  return "";
}

ChunkRegion make_region(const Graph& g, int start, int end, const std::map<int, int>& chunk_dim,
                        const std::vector<int>& hoisted) {
  ChunkRegion r;
  const std::string why = check_region(g, start, end, chunk_dim, hoisted, &r);
  if (!why.empty()) throw PlanError("illegal chunk region: " + why);
  return r;
}

void validate_plan(const Graph& g, const ChunkPlan& plan) {
  int prev_end = -1;
  for (const auto& pr : plan.regions) {
    const ChunkRegion& r = pr.region;
    if (r.start <= prev_end) {
      throw PlanError("chunk region [" + std::to_string(r.start) + ", " + std::to_string(r.end) +
                      "] overlaps or precedes an earlier region");
    }
    prev_end = r.end;
    ChunkRegion fresh;
    const std::string why = check_region(g, r.start, r.end, r.chunk_dim, r.hoisted, &fresh);
    if (!why.empty()) throw PlanError("illegal chunk region: " + why);
    if (fresh.extent != r.extent || fresh.outputs != r.outputs || fresh.chunk_inputs != r.chunk_inputs ||
        fresh.nonchunk_inputs != r.nonchunk_inputs) {
      throw PlanError("chunk region [" + std::to_string(r.start) + ", " + std::to_string(r.end) +
                      "] does not match the graph");
    }
    if (pr.chunk_size < 1 || pr.chunk_size > r.extent) {
      throw PlanError("chunk size " + std::to_string(pr.chunk_size) + " outside [1, " +
                      std::to_string(r.extent) + "]");
    }
  }
}

json ChunkPlan::to_json() const {
  json regs = json::array();
  for (const auto& pr : regions) {
    json r = pr.region.to_json();
    r["chunk_size"] = pr.chunk_size;
    r["iterations"] = pr.iterations();
    regs.push_back(std::move(r));
  }
  return {{"schema", "axialfold.chunkplan/1"}, {"regions", regs}, {"search_log", search_log}};
}

ChunkPlan ChunkPlan::from_json(const Graph& g, const json& j) {
  ChunkPlan plan;
  try {
    for (const auto& r : j.at("regions")) {
      std::map<int, int> dims;
      for (const auto& e : r.at("chunk_dim")) dims[e.at(0).get<int>()] = e.at(1).get<int>();
      PlannedRegion pr;
      pr.region = make_region(g, r.at("start").get<int>(), r.at("end").get<int>(), dims,
                              r.value("hoisted", std::vector<int>{}));
      pr.chunk_size = r.at("chunk_size").get<std::int64_t>();
      plan.regions.push_back(std::move(pr));
    }
    plan.search_log = j.value("search_log", json::array());
  } catch (const json::exception& e) {
    throw PlanError(std::string("malformed chunk plan: ") + e.what());
  }
  validate_plan(g, plan);
  return plan;
}

}  // namespace axial
