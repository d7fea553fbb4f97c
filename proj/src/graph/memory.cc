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

#include "axial/errors.h"
#include "axial/execution.h"

namespace axial {
namespace {

using nlohmann::json;

// Distinct inputs of a node, in first-use order.
std::vector<int> distinct_inputs(const Node& n) {
  std::vector<int> out;
  for (int p : n.inputs) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

}  // namespace

double MemoryProfile::fraction_below(double threshold) const {
  std::int64_t total = 0, below = 0;
  for (std::size_t i = 0; i < footprints.size(); ++i) {
    if (!counted[i]) continue;
    ++total;
    if (static_cast<double>(footprints[i]) < threshold * static_cast<double>(peak_bytes)) ++below;
  }
  return total == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(total);
}

json MemoryProfile::to_json() const {
  return {{"schema", "axialfold.memprofile/1"},
          {"peak_bytes", peak_bytes},
          {"peak_node", peak_node},
          {"element_size", element_size},
          {"footprints", footprints}};
}

double footprint_stats(const MemoryProfile& profile, double threshold) {
  return profile.fraction_below(threshold);
}

MemoryProfile estimate_memory(const Graph& g, const ChunkPlan* plan, int element_size) {
  if (element_size <= 0) throw DomainError("element size must be positive");
  if (plan != nullptr) validate_plan(g, *plan);
  const int n = g.size();
  const std::vector<int> last = g.last_use();
  auto size = [&](int id) { return g.node(id).numel(); };
  auto is_param = [&](int id) { return g.node(id).op == OpKind::kParam; };

  std::vector<const PlannedRegion*> region_at(n, nullptr);
  if (plan != nullptr) {
    for (const auto& pr : plan->regions) region_at[pr.region.start] = &pr;
  }

  std::vector<std::int64_t> fp(n, 0);
  std::int64_t live = 0;
  for (int id : g.inputs()) live += size(id);

  int i = 0;
  while (i < n) {
    if (const PlannedRegion* pr = region_at[i]) {
      const ChunkRegion& r = pr->region;
      const std::int64_t len = std::min(pr->chunk_size, r.extent);
      auto chunk = [&](int id) { return size(id) / r.extent * len; };
      auto is_out = [&](int id) {
        return std::find(r.outputs.begin(), r.outputs.end(), id) != r.outputs.end();
      };
      for (int h : r.hoisted) {
        live += size(h);
        fp[h] = live;
        const int p = g.node(h).inputs[0];
        if (!is_param(p) && last[p] == h) live -= size(p);
        if (last[h] == h) live -= size(h);
      }
      for (int o : r.outputs) live += size(o);
      for (int id = r.start; id <= r.end; ++id) {
        const Node& node = g.node(id);
        if (r.is_hoisted(id)) continue;
        if (node.op == OpKind::kParam) {
          fp[id] = live;
          continue;
        }
        const bool out = is_out(id);
        if (!out) live += chunk(id);
        fp[id] = live;
        for (int p : distinct_inputs(node)) {
          if (r.is_internal(g, p) && !is_out(p) && last[p] == id) live -= chunk(p);
        }
        if (!out && last[id] == id) live -= chunk(id);
      }
      std::vector<int> ext = r.chunk_inputs;
      ext.insert(ext.end(), r.nonchunk_inputs.begin(), r.nonchunk_inputs.end());
      std::sort(ext.begin(), ext.end());
      ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
      for (int p : ext) {
        if (!is_param(p) && r.contains(last[p])) live -= size(p);
      }
      i = r.end + 1;
      continue;
    }
    const Node& node = g.node(i);
    if (node.op == OpKind::kInput) {
      fp[i] = live;
      if (last[i] == i) live -= size(i);
    } else if (node.op == OpKind::kParam) {
      fp[i] = live;
    } else {
      live += size(i);
      fp[i] = live;
      for (int p : distinct_inputs(node)) {
        if (!is_param(p) && last[p] == i) live -= size(p);
      }
      if (last[i] == i) live -= size(i);
    }
    ++i;
  }

  MemoryProfile prof;
  prof.element_size = element_size;
  prof.footprints.resize(n);
  prof.counted.resize(n);
  for (int id = 0; id < n; ++id) {
    prof.footprints[id] = fp[id] * element_size;
    prof.counted[id] = !is_param(id);
    if (prof.counted[id] && (prof.peak_node < 0 || prof.footprints[id] > prof.peak_bytes)) {
      prof.peak_bytes = prof.footprints[id];
      prof.peak_node = id;
    }
  }
  return prof;
}

}  // namespace axial
