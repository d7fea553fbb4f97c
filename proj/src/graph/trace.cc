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

#include "axial/trace.h"

#include "axial/evoformer_program.h"

namespace axial {

using nlohmann::json;

int TraceOps::param(const std::string& name) {
  const auto it = param_ids_.find(name);
  if (it != param_ids_.end()) return it->second;
  const int id = g_.add_param(name, params_.at(name));
  param_ids_.emplace(name, id);
  return id;
}

int TraceOps::linear(int x, int w, int b) { return g_.add_op(OpKind::kLinear, {x, w, b}); }

int TraceOps::layernorm(int x, int g, int b) {
  return g_.add_op(OpKind::kLayernorm, {x, g, b}, {{"eps", 1e-5}});
}

int TraceOps::contract(const std::string& spec, int a, int b, double s) {
  return g_.add_op(OpKind::kContract, {a, b}, {{"spec", spec}, {"scale", s}});
}

int TraceOps::add(int a, int b) { return g_.add_op(OpKind::kAdd, {a, b}); }
int TraceOps::mul(int a, int b) { return g_.add_op(OpKind::kMul, {a, b}); }
int TraceOps::sigmoid(int x) { return g_.add_op(OpKind::kSigmoid, {x}); }
int TraceOps::relu(int x) { return g_.add_op(OpKind::kRelu, {x}); }
int TraceOps::scale(int x, double f) { return g_.add_op(OpKind::kScale, {x}, {{"factor", f}}); }

int TraceOps::softmax(int x, int axis) {
  return g_.add_op(OpKind::kSoftmax, {x},
                   {{"axis", normalize_axis(axis, static_cast<int>(shape(x).size()))}});
}

int TraceOps::permute(int x, const std::vector<int>& perm) {
  return g_.add_op(OpKind::kPermute, {x}, {{"perm", perm}});
}

int TraceOps::reshape(int x, const Shape& s) { return g_.add_op(OpKind::kReshape, {x}, {{"shape", s}}); }

Graph trace_evoformer(const EvoConfig& config, const BlockParams& params) {
  config.validate();
  Graph g;
  const int m = g.add_input("m", {config.n_seq, config.n_res, config.h_msa});
  const int z = g.add_input("z", {config.n_res, config.n_res, config.h_pair});
  TraceOps ops(g, params);
  EvoformerProgram<TraceOps> program(ops, config);
  const auto [m_out, z_out] = program.block(m, z);
  g.set_outputs({m_out, z_out});
  return g;
}

}  // namespace axial
