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

#include "axial/fusion.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "axial/errors.h"
#include "axial/execution.h"

namespace axial {
namespace {

using nlohmann::json;

// Copies a graph node by node while letting a pass substitute nodes.
// Parameters are emitted lazily right before their first kept consumer, so
// parameters that lose every consumer disappear.
class Rebuilder {
 public:
  explicit Rebuilder(const Graph& g) : g_(g), remap_(g.size(), -1) {}

  int map(int old_id) {
    if (remap_[old_id] < 0) {
      const Node& n = g_.node(old_id);
      if (n.op != OpKind::kParam) throw GraphError("rewrite referenced node " + std::to_string(old_id) + " early");
      remap_[old_id] = out_.add_param(n.name, n.value);
    }
    return remap_[old_id];
  }

  std::vector<int> map_all(const std::vector<int>& ids) {
    std::vector<int> r;
    for (int i : ids) r.push_back(map(i));
    return r;
  }

  void copy(int i) {
    const Node& n = g_.node(i);
    if (n.op == OpKind::kInput) {
      remap_[i] = out_.add_input(n.name, n.shape);
    } else if (n.op != OpKind::kParam) {
      remap_[i] = out_.add_op(n.op, map_all(n.inputs), n.attrs, n.name);
    }
  }

  void alias(int old_id, int new_id) { remap_[old_id] = new_id; }
  Graph& out() { return out_; }

  Graph finish() {
    std::vector<int> outs;
    for (int o : g_.outputs()) outs.push_back(map(o));
    out_.set_outputs(outs);
    return std::move(out_);
  }

 private:
  const Graph& g_;
  Graph out_;
  std::vector<int> remap_;
};

std::int64_t peak_of(const Graph& g) { return estimate_memory(g, nullptr, 1).peak_bytes; }

// Applies groups one at a time and keeps those that do not raise the peak.
template <class Group>
Graph apply_greedily(const Graph& g, const std::vector<Group>& groups,
                     const std::function<Graph(const std::vector<Group>&)>& build) {
  std::vector<Group> accepted;
  Graph current = g;
  std::int64_t peak = peak_of(g);
  for (const Group& grp : groups) {
    accepted.push_back(grp);
    Graph trial = build(accepted);
    const std::int64_t p = peak_of(trial);
    if (p <= peak) {
      current = std::move(trial);
      peak = p;
    } else {
      accepted.pop_back();
    }
  }
  return current;
}

// ---------------------------------------------------------------------------
// merge-GEMM

using GemmGroup = std::vector<int>;  // linear node ids, ascending

Graph build_merged(const Graph& g, const std::vector<GemmGroup>& groups) {
  std::map<int, const GemmGroup*> first;
  std::set<int> member;
  for (const auto& grp : groups) {
    first[grp.front()] = &grp;
    member.insert(grp.begin(), grp.end());
  }
  Rebuilder rb(g);
  for (int i = 0; i < g.size(); ++i) {
    const auto it = first.find(i);
    if (it != first.end()) {
      const GemmGroup& grp = *it->second;
      std::vector<Tensor> ws, bs;
      std::string name = "merged";
      for (int l : grp) {
        ws.push_back(g.node(g.node(l).inputs[1]).value);
        bs.push_back(g.node(g.node(l).inputs[2]).value);
        name += ":" + g.node(g.node(l).inputs[1]).name;
      }
      Graph& out = rb.out();
      const int x = rb.map(g.node(grp.front()).inputs[0]);
      const int w = out.add_param(name + ".w", concat_last_axis(ws));
      const int b = out.add_param(name + ".b", concat_last_axis(bs));
      const int merged = out.add_op(OpKind::kLinear, {x, w, b}, json::object(), "merged_linear");
      const int axis = static_cast<int>(out.node(merged).shape.size()) - 1;
      std::int64_t start = 0;
      for (int l : grp) {
        const std::int64_t len = g.node(l).shape.back();
        rb.alias(l, out.add_op(OpKind::kSlice, {merged},
                               {{"axis", axis}, {"start", start}, {"length", len}}, "split"));
        start += len;
      }
    } else if (member.count(i) == 0) {
      rb.copy(i);
    }
  }
  return rb.finish();
}

// ---------------------------------------------------------------------------
// Elementwise fusion

struct Fusion {
  int tail = 0;
  std::vector<int> removed;  // nodes folded into the tail, ascending
  OpKind op = OpKind::kFusedElementwise;
  std::vector<int> inputs;   // old ids
  json attrs;
};

Graph build_fused(const Graph& g, const std::vector<Fusion>& fusions) {
  std::map<int, const Fusion*> at_tail;
  std::set<int> removed;
  for (const auto& f : fusions) {
    at_tail[f.tail] = &f;
    removed.insert(f.removed.begin(), f.removed.end());
  }
  Rebuilder rb(g);
  for (int i = 0; i < g.size(); ++i) {
    if (removed.count(i)) continue;
    const auto it = at_tail.find(i);
    if (it == at_tail.end()) {
      rb.copy(i);
      continue;
    }
    const Fusion& f = *it->second;
    rb.alias(i, rb.out().add_op(f.op, rb.map_all(f.inputs), f.attrs, op_name(f.op)));
  }
  return rb.finish();
}

bool single_private_use(const Graph& g, const std::vector<std::vector<int>>& cons, int id, int user) {
  return !g.is_output(id) && cons[id].size() == 1 && cons[id][0] == user &&
         std::count(g.node(user).inputs.begin(), g.node(user).inputs.end(), id) == 1;
}

std::vector<Fusion> softmax_fusions(const Graph& g) {
  const auto cons = g.consumers();
  std::vector<Fusion> out;
  for (const Node& s : g.nodes()) {
    if (s.op != OpKind::kSoftmax) continue;
    Fusion f;
    f.tail = s.id;
    f.op = OpKind::kFusedSoftmax;
    double factor = 1.0;
    int cur = s.inputs[0];
    if (g.node(cur).op == OpKind::kScale && single_private_use(g, cons, cur, s.id)) {
      factor = g.node(cur).attrs.at("factor").get<double>();
      f.removed.push_back(cur);
      cur = g.node(cur).inputs[0];
    }
    const int user = f.removed.empty() ? s.id : f.removed.back();
    const Node& a = g.node(cur);
    bool has_bias = false;
    if (a.op == OpKind::kAdd && single_private_use(g, cons, cur, user) && a.inputs[0] != a.inputs[1]) {
      // The full-shaped operand stays x; the other broadcasts as bias.
      const Shape& s0 = g.node(a.inputs[0]).shape;
      const Shape& s1 = g.node(a.inputs[1]).shape;
      int x = -1, bias = -1;
      if (s0 == a.shape) {
        x = a.inputs[0];
        bias = a.inputs[1];
      } else if (s1 == a.shape) {
        x = a.inputs[1];
        bias = a.inputs[0];
      }
      if (x >= 0) {
        f.removed.push_back(cur);
        f.inputs = {x, bias};
        has_bias = true;
      }
    }
    if (!has_bias) {
      if (f.removed.empty()) continue;  // plain softmax, nothing to fuse
      f.inputs = {cur};
    }
    std::sort(f.removed.begin(), f.removed.end());
    f.attrs = {{"axis", s.attrs.at("axis")}, {"scale", factor}, {"has_mask", false}, {"has_bias", has_bias}};
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Fusion> chain_fusions(const Graph& g) {
  const auto cons = g.consumers();
  std::vector<bool> taken(g.size(), false);
  std::vector<Fusion> out;
  for (const Node& head : g.nodes()) {
    if (!is_elementwise(head.op) || taken[head.id]) continue;
    std::vector<int> chain = {head.id};
    for (;;) {
      const int tail = chain.back();
      if (g.is_output(tail) || cons[tail].size() != 1) break;
      const Node& c = g.node(cons[tail][0]);
      if (!is_elementwise(c.op) || taken[c.id] || c.shape != head.shape) break;
      chain.push_back(c.id);
    }
    if (chain.size() < 2) continue;
    for (int id : chain) taken[id] = true;

    Fusion f;
    f.tail = chain.back();
    f.removed.assign(chain.begin(), chain.end() - 1);
    std::vector<FusedStep> program;
    auto operand = [&](int id) {
      const auto pos = std::find(chain.begin(), chain.end(), id);
      if (pos != chain.end() && pos - chain.begin() < static_cast<long>(program.size())) {
        return FusedOperand{false, static_cast<int>(pos - chain.begin())};
      }
      auto in = std::find(f.inputs.begin(), f.inputs.end(), id);
      if (in == f.inputs.end()) {
        f.inputs.push_back(id);
        in = f.inputs.end() - 1;
      }
      return FusedOperand{true, static_cast<int>(in - f.inputs.begin())};
    };
    for (int id : chain) {
      const Node& n = g.node(id);
      FusedStep st;
      switch (n.op) {
        case OpKind::kAdd: st.kind = FusedOpKind::kAdd; break;
        case OpKind::kMul: st.kind = FusedOpKind::kMul; break;
        case OpKind::kSigmoid: st.kind = FusedOpKind::kSigmoid; break;
        case OpKind::kRelu: st.kind = FusedOpKind::kRelu; break;
        default:
          st.kind = FusedOpKind::kScale;
          st.constant = n.attrs.at("factor").get<double>();
      }
      st.lhs = operand(n.inputs[0]);
      if (n.inputs.size() > 1) st.rhs = operand(n.inputs[1]);
      program.push_back(st);
    }
    f.attrs = {{"program", fused_program_to_json(program)}};
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

Graph fuse_merge_gemm(const Graph& g) {
  const auto cons = g.consumers();
  std::vector<GemmGroup> groups;
  for (const Node& x : g.nodes()) {
    std::map<std::int64_t, GemmGroup> by_width;
    for (int c : cons[x.id]) {
      const Node& l = g.node(c);
      if (l.op != OpKind::kLinear || l.inputs.size() != 3 || l.inputs[0] != x.id) continue;
      if (g.node(l.inputs[1]).op != OpKind::kParam || g.node(l.inputs[2]).op != OpKind::kParam) continue;
      by_width[g.node(l.inputs[1]).shape[0]].push_back(c);
    }
    for (auto& [w, grp] : by_width) {
      if (grp.size() >= 2) groups.push_back(grp);
    }
  }
  return apply_greedily<GemmGroup>(g, groups, [&](const std::vector<GemmGroup>& acc) {
    return build_merged(g, acc);
  });
}

Graph fuse_elementwise(const Graph& g) {
  const Graph softmaxed = apply_greedily<Fusion>(g, softmax_fusions(g), [&](const std::vector<Fusion>& acc) {
    return build_fused(g, acc);
  });
  return apply_greedily<Fusion>(softmaxed, chain_fusions(softmaxed), [&](const std::vector<Fusion>& acc) {
    return build_fused(softmaxed, acc);
  });
}

}  // namespace axial
