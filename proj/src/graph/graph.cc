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

#include "axial/graph.h"

#include <algorithm>
#include <array>
#include <cstring>
#include <numeric>
#include <set>

#include "axial/errors.h"

namespace axial {
namespace {

using nlohmann::json;

struct OpName {
  OpKind op;
  const char* name;
};

constexpr std::array<OpName, 21> kOpNames = {{
    {OpKind::kInput, "input"},
    {OpKind::kParam, "param"},
    {OpKind::kLinear, "linear"},
    {OpKind::kMatmul, "matmul"},
    {OpKind::kContract, "contract_k"},
    {OpKind::kOuter, "outer"},
    {OpKind::kLayernorm, "layernorm"},
    {OpKind::kSoftmax, "softmax"},
    {OpKind::kFusedSoftmax, "fused_softmax"},
    {OpKind::kSigmoid, "sigmoid"},
    {OpKind::kRelu, "relu"},
    {OpKind::kScale, "scale"},
    {OpKind::kAdd, "add"},
    {OpKind::kMul, "mul"},
    {OpKind::kMean, "mean"},
    {OpKind::kSum, "sum"},
    {OpKind::kPermute, "permute"},
    {OpKind::kReshape, "reshape"},
    {OpKind::kConcat, "concat"},
    {OpKind::kSlice, "slice"},
    {OpKind::kFusedElementwise, "fused_elementwise"},
}};

void expect_inputs(OpKind op, const std::vector<Shape>& in, std::size_t lo, std::size_t hi) {
  if (in.size() < lo || in.size() > hi) {
    throw GraphError(std::string(op_name(op)) + " takes " + std::to_string(lo) +
                     (lo == hi ? "" : "-" + std::to_string(hi)) + " inputs, got " +
                     std::to_string(in.size()));
  }
}

DimFlow empty_flow(std::size_t out_rank, const std::vector<Shape>& in) {
  DimFlow f;
  f.out.resize(out_rank);
  f.in_compute.resize(in.size());
  return f;
}

// Right-aligned broadcast mapping. An input dim feeds an output dim when the
// extents agree; extent-1 broadcast dims are read whole.
DimFlow broadcast_flow(const std::vector<Shape>& in, const Shape& out) {
  DimFlow f = empty_flow(out.size(), in);
  const int r = static_cast<int>(out.size());
  for (int d = 0; d < r; ++d) {
    for (std::size_t k = 0; k < in.size(); ++k) {
      const int e = d - (r - static_cast<int>(in[k].size()));
      if (e >= 0 && in[k][e] == out[d]) f.out[d].sources.push_back({static_cast<int>(k), e});
    }
  }
  return f;
}

void mark_compute(DimFlow& f, const std::vector<Shape>& in, const Shape& out, int axis) {
  const int r = static_cast<int>(out.size());
  f.out[axis].compute = true;
  f.out[axis].sources.clear();
  for (std::size_t k = 0; k < in.size(); ++k) {
    const int e = axis - (r - static_cast<int>(in[k].size()));
    if (e >= 0) f.in_compute[k].push_back(e);
  }
}

DimFlow identity_flow(const Shape& s, std::size_t n_inputs = 1) {
  DimFlow f;
  f.out.resize(s.size());
  f.in_compute.resize(n_inputs);
  for (std::size_t d = 0; d < s.size(); ++d) f.out[d].sources.push_back({0, static_cast<int>(d)});
  return f;
}

struct ContractLabels {
  std::string a, b, out;
};

ContractLabels parse_contract(const std::string& spec) {
  const auto comma = spec.find(',');
  const auto arrow = spec.find("->");
  if (comma == std::string::npos || arrow == std::string::npos || arrow < comma) {
    throw GraphError("malformed contraction spec '" + spec + "'");
  }
  return {spec.substr(0, comma), spec.substr(comma + 1, arrow - comma - 1), spec.substr(arrow + 2)};
}

Shape shape_attr(const json& attrs) {
  if (!attrs.contains("shape")) throw GraphError("missing 'shape' attribute");
  return attrs.at("shape").get<Shape>();
}

int axis_attr(const json& attrs, int rank) {
  if (!attrs.contains("axis")) throw GraphError("missing 'axis' attribute");
  return normalize_axis(attrs.at("axis").get<int>(), rank);
}

Signature infer_contract(const json& attrs, const std::vector<Shape>& in) {
  const ContractLabels l = parse_contract(attrs.at("spec").get<std::string>());
  if (l.a.size() != in[0].size() || l.b.size() != in[1].size()) {
    throw DimensionError("contraction '" + attrs.at("spec").get<std::string>() +
                         "' does not match operand shapes " + to_string(in[0]) + ", " +
                         to_string(in[1]));
  }
  Signature s;
  s.flow = empty_flow(l.out.size(), in);
  for (std::size_t d = 0; d < l.out.size(); ++d) {
    const char c = l.out[d];
    const auto pa = l.a.find(c);
    const auto pb = l.b.find(c);
    if (pa == std::string::npos && pb == std::string::npos) {
      throw DimensionError(std::string("output label '") + c + "' missing from operands");
    }
    std::int64_t extent = -1;
    if (pa != std::string::npos) {
      extent = in[0][pa];
      s.flow.out[d].sources.push_back({0, static_cast<int>(pa)});
    }
    if (pb != std::string::npos) {
      if (extent >= 0 && in[1][pb] != extent) {
        throw DimensionError(std::string("label '") + c + "' has extents " + std::to_string(extent) +
                             " and " + std::to_string(in[1][pb]));
      }
      extent = in[1][pb];
      s.flow.out[d].sources.push_back({1, static_cast<int>(pb)});
    }
    s.shape.push_back(extent);
  }
  for (std::size_t i = 0; i < l.a.size(); ++i) {
    if (l.out.find(l.a[i]) == std::string::npos) s.flow.in_compute[0].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < l.b.size(); ++i) {
    if (l.out.find(l.b[i]) == std::string::npos) s.flow.in_compute[1].push_back(static_cast<int>(i));
  }
  return s;
}

// Length of the leading run of dims a reshape leaves untouched.
int reshape_prefix(const Shape& from, const Shape& to) {
  int p = 0;
  while (p < static_cast<int>(std::min(from.size(), to.size())) && from[p] == to[p]) ++p;
  return p;
}

}  // namespace

const char* op_name(OpKind op) {
  for (const auto& e : kOpNames) {
    if (e.op == op) return e.name;
  }
  return "unknown";
}

OpKind op_from_name(std::string_view name) {
  for (const auto& e : kOpNames) {
    if (name == e.name) return e.op;
  }
  throw GraphError("unknown op kind '" + std::string(name) + "'");
}

bool is_elementwise(OpKind op) {
  return op == OpKind::kAdd || op == OpKind::kMul || op == OpKind::kSigmoid ||
         op == OpKind::kRelu || op == OpKind::kScale;
}

int DimFlow::source_dim(int dim, int input) const {
  for (const auto& s : out.at(dim).sources) {
    if (s.input == input) return s.dim;
  }
  return -1;
}

json DimFlow::to_json() const {
  json outs = json::array();
  for (const auto& o : out) {
    if (o.compute) {
      outs.push_back("compute");
    } else {
      json src = json::array();
      for (const auto& s : o.sources) src.push_back({s.input, s.dim});
      outs.push_back(src);
    }
  }
  return {{"out", outs}, {"in_compute", in_compute}};
}

DimFlow DimFlow::from_json(const json& j) {
  DimFlow f;
  for (const auto& o : j.at("out")) {
    OutDim d;
    if (o.is_string()) {
      if (o.get<std::string>() != "compute") throw GraphError("bad dim_flow entry " + o.dump());
      d.compute = true;
    } else {
      for (const auto& s : o) d.sources.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
    }
    f.out.push_back(d);
  }
  f.in_compute = j.at("in_compute").get<std::vector<std::vector<int>>>();
  return f;
}

Signature infer_signature(OpKind op, const json& attrs, const std::vector<Shape>& in) {
  Signature s;
  switch (op) {
    case OpKind::kInput:
    case OpKind::kParam:
      expect_inputs(op, in, 0, 0);
      s.shape = shape_attr(attrs);
      s.flow = empty_flow(s.shape.size(), in);
      return s;
    case OpKind::kLinear: {
      expect_inputs(op, in, 2, 3);
      const Shape& x = in[0];
      if (x.empty() || in[1].size() != 2 || x.back() != in[1][0]) {
        throw DimensionError("linear shape mismatch: " + to_string(x) + " x " + to_string(in[1]));
      }
      if (in.size() == 3 && (in[2].size() != 1 || in[2][0] != in[1][1])) {
        throw DimensionError("linear bias " + to_string(in[2]) + " does not match weight " +
                             to_string(in[1]));
      }
      s.shape = x;
      s.shape.back() = in[1][1];
      const int r = static_cast<int>(x.size());
      s.flow = empty_flow(r, in);
      for (int d = 0; d + 1 < r; ++d) s.flow.out[d].sources.push_back({0, d});
      s.flow.out[r - 1].sources.push_back({1, 1});
      if (in.size() == 3) s.flow.out[r - 1].sources.push_back({2, 0});
      s.flow.in_compute[0].push_back(r - 1);
      s.flow.in_compute[1].push_back(0);
      return s;
    }
    case OpKind::kMatmul: {
      expect_inputs(op, in, 2, 2);
      const Shape& a = in[0];
      const Shape& b = in[1];
      if (a.size() < 2 || b.size() < 2 || a.back() != b[b.size() - 2]) {
        throw DimensionError("matmul shape mismatch: " + to_string(a) + " x " + to_string(b));
      }
      const Shape al(a.begin(), a.end() - 2), bl(b.begin(), b.end() - 2);
      s.shape = broadcast_shapes(al, bl);
      s.flow = broadcast_flow({al, bl}, s.shape);
      s.shape.push_back(a[a.size() - 2]);
      s.shape.push_back(b.back());
      s.flow.out.push_back({false, {{0, static_cast<int>(a.size()) - 2}}});
      s.flow.out.push_back({false, {{1, static_cast<int>(b.size()) - 1}}});
      s.flow.in_compute = {{static_cast<int>(a.size()) - 1}, {static_cast<int>(b.size()) - 2}};
      return s;
    }
    case OpKind::kContract:
      expect_inputs(op, in, 2, 2);
      return infer_contract(attrs, in);
    case OpKind::kOuter: {
      expect_inputs(op, in, 2, 2);
      s.shape = in[0];
      s.shape.insert(s.shape.end(), in[1].begin(), in[1].end());
      s.flow = empty_flow(s.shape.size(), in);
      const int ra = static_cast<int>(in[0].size());
      for (int d = 0; d < static_cast<int>(s.shape.size()); ++d) {
        s.flow.out[d].sources.push_back(d < ra ? DimSource{0, d} : DimSource{1, d - ra});
      }
      return s;
    }
    case OpKind::kLayernorm: {
      expect_inputs(op, in, 3, 3);
      const Shape& x = in[0];
      if (x.empty() || in[1] != Shape{x.back()} || in[2] != Shape{x.back()}) {
        throw DimensionError("layernorm parameters do not match " + to_string(x));
      }
      s.shape = x;
      s.flow = empty_flow(x.size(), in);
      const int r = static_cast<int>(x.size());
      for (int d = 0; d + 1 < r; ++d) s.flow.out[d].sources.push_back({0, d});
      s.flow.out[r - 1].compute = true;
      s.flow.in_compute[0].push_back(r - 1);
      s.flow.in_compute[1].push_back(0);
      s.flow.in_compute[2].push_back(0);
      return s;
    }
    case OpKind::kSoftmax: {
      expect_inputs(op, in, 1, 1);
      s.shape = in[0];
      s.flow = identity_flow(s.shape);
      mark_compute(s.flow, in, s.shape, axis_attr(attrs, static_cast<int>(s.shape.size())));
      return s;
    }
    case OpKind::kFusedSoftmax: {
      expect_inputs(op, in, 1, 3);
      s.shape = in[0];
      for (std::size_t k = 1; k < in.size(); ++k) {
        if (broadcast_shapes(s.shape, in[k]) != s.shape) {
          throw DimensionError("fused softmax operand " + to_string(in[k]) +
                               " does not broadcast to " + to_string(s.shape));
        }
      }
      const std::size_t extra = (attrs.value("has_mask", false) ? 1 : 0) +
                                (attrs.value("has_bias", false) ? 1 : 0);
      if (extra + 1 != in.size()) throw GraphError("fused_softmax input count disagrees with attrs");
      s.flow = broadcast_flow(in, s.shape);
      mark_compute(s.flow, in, s.shape, axis_attr(attrs, static_cast<int>(s.shape.size())));
      return s;
    }
    case OpKind::kSigmoid:
    case OpKind::kRelu:
    case OpKind::kScale:
      expect_inputs(op, in, 1, 1);
      if (op == OpKind::kScale && !attrs.contains("factor")) throw GraphError("scale needs 'factor'");
      s.shape = in[0];
      s.flow = identity_flow(s.shape);
      return s;
    case OpKind::kAdd:
    case OpKind::kMul:
      expect_inputs(op, in, 2, 2);
      s.shape = broadcast_shapes(in[0], in[1]);
      s.flow = broadcast_flow(in, s.shape);
      return s;
    case OpKind::kFusedElementwise: {
      if (in.empty()) throw GraphError("fused_elementwise needs inputs");
      if (!attrs.contains("program")) throw GraphError("fused_elementwise needs 'program'");
      s.shape = in[0];
      for (const auto& x : in) s.shape = broadcast_shapes(s.shape, x);
      s.flow = broadcast_flow(in, s.shape);
      return s;
    }
    case OpKind::kMean:
    case OpKind::kSum: {
      expect_inputs(op, in, 1, 1);
      const int r = static_cast<int>(in[0].size());
      const int a = axis_attr(attrs, r);
      s.flow.in_compute = {{a}};
      for (int d = 0; d < r; ++d) {
        if (d == a) continue;
        s.shape.push_back(in[0][d]);
        s.flow.out.push_back({false, {{0, d}}});
      }
      if (s.shape.empty()) {
        s.shape.push_back(1);
        s.flow.out.push_back({true, {}});
      }
      return s;
    }
    case OpKind::kPermute: {
      expect_inputs(op, in, 1, 1);
      const auto perm = attrs.at("perm").get<std::vector<int>>();
      if (perm.size() != in[0].size()) {
        throw DimensionError("permutation rank does not match " + to_string(in[0]));
      }
      std::vector<int> sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t d = 0; d < sorted.size(); ++d) {
        if (sorted[d] != static_cast<int>(d)) throw DimensionError("invalid permutation");
      }
      s.flow = empty_flow(perm.size(), in);
      for (std::size_t d = 0; d < perm.size(); ++d) {
        s.shape.push_back(in[0][perm[d]]);
        s.flow.out[d].sources.push_back({0, perm[d]});
      }
      return s;
    }
    case OpKind::kReshape: {
      expect_inputs(op, in, 1, 1);
      s.shape = shape_attr(attrs);
      if (numel(s.shape) != numel(in[0])) {
        throw DimensionError("cannot reshape " + to_string(in[0]) + " to " + to_string(s.shape));
      }
      const int p = reshape_prefix(in[0], s.shape);
      s.flow = empty_flow(s.shape.size(), in);
      for (int d = 0; d < static_cast<int>(s.shape.size()); ++d) {
        if (d < p) {
          s.flow.out[d].sources.push_back({0, d});
        } else {
          s.flow.out[d].compute = true;
        }
      }
      for (int d = p; d < static_cast<int>(in[0].size()); ++d) s.flow.in_compute[0].push_back(d);
      return s;
    }
    case OpKind::kConcat: {
      if (in.empty()) throw GraphError("concat needs inputs");
      s.shape = in[0];
      const int r = static_cast<int>(s.shape.size());
      s.shape[r - 1] = 0;
      for (const auto& x : in) {
        if (static_cast<int>(x.size()) != r || !std::equal(x.begin(), x.end() - 1, in[0].begin())) {
          throw DimensionError("concat shape mismatch: " + to_string(x) + " vs " + to_string(in[0]));
        }
        s.shape[r - 1] += x.back();
      }
      s.flow = empty_flow(r, in);
      for (int d = 0; d + 1 < r; ++d) {
        for (std::size_t k = 0; k < in.size(); ++k) {
          s.flow.out[d].sources.push_back({static_cast<int>(k), d});
        }
      }
      s.flow.out[r - 1].compute = true;
      for (auto& c : s.flow.in_compute) c.push_back(r - 1);
      return s;
    }
    case OpKind::kSlice: {
      expect_inputs(op, in, 1, 1);
      const int r = static_cast<int>(in[0].size());
      const int a = axis_attr(attrs, r);
      const auto start = attrs.at("start").get<std::int64_t>();
      const auto len = attrs.at("length").get<std::int64_t>();
      if (start < 0 || len <= 0 || start + len > in[0][a]) {
        throw DimensionError("slice [" + std::to_string(start) + ", +" + std::to_string(len) +
                             ") out of range for " + to_string(in[0]));
      }
      s.shape = in[0];
      s.shape[a] = len;
      s.flow = identity_flow(s.shape);
      s.flow.out[a] = {true, {}};
      s.flow.in_compute[0].push_back(a);
      return s;
    }
  }
  throw GraphError("unhandled op kind");
}

int Graph::push(Node n) {
  n.id = size();
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

int Graph::add_input(const std::string& name, Shape shape) {
  Node n;
  n.op = OpKind::kInput;
  n.name = name;
  n.attrs = {{"shape", shape}};
  n.shape = std::move(shape);
  n.flow = empty_flow(n.shape.size(), {});
  const int id = push(std::move(n));
  inputs_.push_back(id);
  return id;
}

int Graph::add_param(const std::string& name, Tensor value) {
  Node n;
  n.op = OpKind::kParam;
  n.name = name;
  n.shape = value.shape();
  n.attrs = {{"shape", n.shape}};
  n.flow = empty_flow(n.shape.size(), {});
  n.value = value.is_contiguous() ? std::move(value) : value.clone();
  return push(std::move(n));
}

int Graph::add_op(OpKind op, std::vector<int> inputs, json attrs, std::string name) {
  if (op == OpKind::kInput || op == OpKind::kParam) {
    throw GraphError("use add_input/add_param for source nodes");
  }
  std::vector<Shape> shapes;
  for (int i : inputs) {
    if (i < 0 || i >= size()) {
      throw GraphError("node " + std::to_string(size()) + " references unknown input " + std::to_string(i));
    }
    shapes.push_back(nodes_[i].shape);
  }
  Signature sig = infer_signature(op, attrs, shapes);
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.attrs = std::move(attrs);
  n.shape = std::move(sig.shape);
  n.flow = std::move(sig.flow);
  n.name = name.empty() ? op_name(op) : std::move(name);
  return push(std::move(n));
}

void Graph::set_outputs(std::vector<int> ids) {
  for (int i : ids) {
    if (i < 0 || i >= size()) throw GraphError("output references unknown node " + std::to_string(i));
  }
  outputs_ = std::move(ids);
}

bool Graph::is_output(int id) const {
  return std::find(outputs_.begin(), outputs_.end(), id) != outputs_.end();
}

std::vector<std::vector<int>> Graph::consumers() const {
  std::vector<std::vector<int>> c(nodes_.size());
  for (const auto& n : nodes_) {
    for (int i : n.inputs) {
      if (c[i].empty() || c[i].back() != n.id) c[i].push_back(n.id);
    }
  }
  return c;
}

std::vector<int> Graph::last_use() const {
  std::vector<int> last(nodes_.size());
  for (const auto& n : nodes_) last[n.id] = n.id;
  for (const auto& n : nodes_) {
    for (int i : n.inputs) last[i] = std::max(last[i], n.id);
  }
  for (int o : outputs_) last[o] = size();
  return last;
}

void Graph::validate() const {
  std::set<int> declared_inputs(inputs_.begin(), inputs_.end());
  if (!std::is_sorted(inputs_.begin(), inputs_.end()) || declared_inputs.size() != inputs_.size()) {
    throw GraphError("graph inputs must be listed once each in ascending id order");
  }
  for (int i = 0; i < size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != i) throw GraphError("node at position " + std::to_string(i) + " has id " + std::to_string(n.id));
    std::vector<Shape> shapes;
    for (int in : n.inputs) {
      if (in < 0 || in >= i) {
        throw GraphError("node " + std::to_string(i) + " (" + op_name(n.op) +
                         ") references input " + std::to_string(in) + " that is not an earlier node");
      }
      shapes.push_back(nodes_[in].shape);
    }
    Signature sig;
    try {
      sig = infer_signature(n.op, n.attrs, shapes);
    } catch (const std::exception& e) {
      throw GraphError("node " + std::to_string(i) + " (" + op_name(n.op) + "): " + e.what());
    }
    if (sig.shape != n.shape) {
      throw GraphError("node " + std::to_string(i) + " declares shape " + to_string(n.shape) +
                       " but its inputs give " + to_string(sig.shape));
    }
    if (!(sig.flow == n.flow)) {
      throw GraphError("node " + std::to_string(i) + " has an inconsistent dim_flow");
    }
    if ((n.op == OpKind::kInput) != (declared_inputs.count(i) > 0)) {
      throw GraphError("node " + std::to_string(i) + " input declaration mismatch");
    }
    if (n.op == OpKind::kParam && (!n.value.defined() || n.value.shape() != n.shape)) {
      throw GraphError("param node " + std::to_string(i) + " has no matching value");
    }
  }
  for (int o : outputs_) {
    if (o < 0 || o >= size()) throw GraphError("output references unknown node " + std::to_string(o));
  }
}

json Graph::to_json() const {
  json nodes = json::array();
  for (const auto& n : nodes_) {
    json e = {{"id", n.id},
              {"op", op_name(n.op)},
              {"name", n.name},
              {"inputs", n.inputs},
              {"attrs", n.attrs},
              {"shape", n.shape},
              {"dim_flow", n.flow.to_json()}};
    if (n.op == OpKind::kParam) e["value"] = n.value.to_vector();
    nodes.push_back(std::move(e));
  }
  return {{"schema", "axialfold.graph/1"}, {"nodes", nodes}, {"inputs", inputs_}, {"outputs", outputs_}};
}

Graph Graph::from_json(const json& j) {
  Graph g;
  try {
    if (j.value("schema", "") != "axialfold.graph/1") {
      throw GraphError("unsupported graph schema '" + j.value("schema", "") + "'");
    }
    for (const auto& e : j.at("nodes")) {
      Node n;
      n.id = e.at("id").get<int>();
      n.op = op_from_name(e.at("op").get<std::string>());
      n.name = e.value("name", "");
      n.inputs = e.at("inputs").get<std::vector<int>>();
      n.attrs = e.value("attrs", json::object());
      n.shape = e.at("shape").get<Shape>();
      n.flow = DimFlow::from_json(e.at("dim_flow"));
      if (n.op == OpKind::kParam) n.value = Tensor::from_vector(n.shape, e.at("value").get<std::vector<double>>());
      g.nodes_.push_back(std::move(n));
    }
    g.inputs_ = j.at("inputs").get<std::vector<int>>();
    g.outputs_ = j.at("outputs").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("malformed graph document: ") + e.what());
  } catch (const DimensionError& e) {
    throw GraphError(std::string("malformed graph document: ") + e.what());
  }
  g.validate();
  return g;
}

Graph Graph::parse(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw GraphError("graph JSON parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  return from_json(j);
}

std::uint64_t Graph::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& n : nodes_) {
    const std::string s = std::string(op_name(n.op)) + json(n.inputs).dump() + n.attrs.dump() +
                          json(n.shape).dump();
    mix(s.data(), s.size());
    if (n.op == OpKind::kParam) {
      const auto v = n.value.to_vector();
      mix(v.data(), v.size() * sizeof(double));
    }
  }
  const std::string io = json(inputs_).dump() + json(outputs_).dump();
  mix(io.data(), io.size());
  return h;
}

}  // namespace axial
