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

std::vector<int> distinct_inputs(const Node& n) {
  std::vector<int> out;
  for (int p : n.inputs) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

class Executor {
 public:
  Executor(const Graph& g, const ChunkPlan* plan)
      : g_(g), plan_(plan), last_(g.last_use()), env_(g.size()) {}

  ExecResult run(std::vector<Tensor> inputs) {
    if (inputs.size() != g_.inputs().size()) {
      throw GraphError("graph takes " + std::to_string(g_.inputs().size()) + " inputs, got " +
                       std::to_string(inputs.size()));
    }
    std::int64_t owned = 0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const int id = g_.inputs()[k];
      Tensor t = std::move(inputs[k]);
      if (!t.defined() || t.shape() != g_.node(id).shape) {
        throw DimensionError("graph input " + std::to_string(k) + " expects shape " +
                             to_string(g_.node(id).shape) +
                             (t.defined() ? ", got " + to_string(t.shape()) : ", got nothing"));
      }
      if (t.storage_use_count() != 1 || !t.is_contiguous() || t.offset() != 0) t = t.clone();
      owned += t.bytes();
      env_[id] = std::move(t);
    }
    inputs.clear();
    // Everything already allocated besides the inputs belongs to the caller.
    const std::int64_t baseline = alloc_stats().live_bytes - owned;
    reset_peak();

    std::vector<const PlannedRegion*> region_at(g_.size(), nullptr);
    if (plan_ != nullptr) {
      for (const auto& pr : plan_->regions) region_at[pr.region.start] = &pr;
    }
    int i = 0;
    while (i < g_.size()) {
      if (region_at[i] != nullptr) {
        run_region(*region_at[i]);
        i = region_at[i]->region.end + 1;
      } else {
        run_node(i);
        ++i;
      }
    }

    ExecResult res;
    res.peak_bytes = alloc_stats().peak_bytes - baseline;
    for (int o : g_.outputs()) res.outputs.push_back(env_[o]);
    return res;
  }

 private:
  const Tensor& value(int id) const {
    const Node& n = g_.node(id);
    return n.op == OpKind::kParam ? n.value : env_[id];
  }

  void run_node(int i) {
    const Node& node = g_.node(i);
    if (node.op == OpKind::kInput) {
      if (last_[i] == i) env_[i] = Tensor();
      return;
    }
    if (node.op == OpKind::kParam) return;
    {
      std::vector<Tensor> ins;
      for (int p : node.inputs) ins.push_back(value(p));
      env_[i] = eval_node(node, ins);
    }
    for (int p : distinct_inputs(node)) {
      if (g_.node(p).op != OpKind::kParam && last_[p] == i) env_[p] = Tensor();
    }
    if (last_[i] == i) env_[i] = Tensor();
  }

  void run_region(const PlannedRegion& pr) {
    const ChunkRegion& r = pr.region;
    auto is_out = [&](int id) {
      return std::find(r.outputs.begin(), r.outputs.end(), id) != r.outputs.end();
    };
    auto is_param = [&](int id) { return g_.node(id).op == OpKind::kParam; };
    for (int h : r.hoisted) run_node(h);
    for (int o : r.outputs) env_[o] = Tensor::zeros(g_.node(o).shape);

    std::vector<Tensor> local(r.end - r.start + 1);
    for (std::int64_t off = 0; off < r.extent; off += pr.chunk_size) {
      const std::int64_t len = std::min(pr.chunk_size, r.extent - off);
      for (int id = r.start; id <= r.end; ++id) {
        const Node& node = g_.node(id);
        if (!r.is_internal(g_, id)) continue;
        const int d = r.chunk_dim.at(id);
        Tensor& slot = local[id - r.start];
        {
          std::vector<Tensor> ins;
          for (int k = 0; k < static_cast<int>(node.inputs.size()); ++k) {
            const int p = node.inputs[k];
            if (r.is_internal(g_, p)) {
              ins.push_back(local[p - r.start]);
              continue;
            }
            const int e = node.flow.source_dim(d, k);
            ins.push_back(e >= 0 ? value(p).slice(e, off, len) : value(p));
          }
          if (is_out(id)) {
            Tensor dst = env_[id].slice(d, off, len);
            eval_node(node, ins, &dst);
            slot = std::move(dst);
          } else {
            slot = eval_node(node, ins);
          }
        }
        for (int p : distinct_inputs(node)) {
          if (r.is_internal(g_, p) && !is_out(p) && last_[p] == id) local[p - r.start] = Tensor();
        }
        if (!is_out(id) && last_[id] == id) slot = Tensor();
      }
      for (auto& t : local) t = Tensor();
    }
    std::vector<int> ext = r.chunk_inputs;
    ext.insert(ext.end(), r.nonchunk_inputs.begin(), r.nonchunk_inputs.end());
    for (int p : ext) {
      if (!is_param(p) && r.contains(last_[p])) env_[p] = Tensor();
    }
  }

  const Graph& g_;
  const ChunkPlan* plan_;
  std::vector<int> last_;
  std::vector<Tensor> env_;
};

}  // namespace

ExecResult execute(const Graph& g, std::vector<Tensor> inputs, const ChunkPlan* plan) {
  if (plan != nullptr) validate_plan(g, *plan);
  return Executor(g, plan).run(std::move(inputs));
}

}  // namespace axial
