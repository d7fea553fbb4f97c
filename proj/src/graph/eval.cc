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

#include <string>

#include "axial/errors.h"
#include "axial/graph.h"

namespace axial {
namespace {

using nlohmann::json;

const char* fused_kind_name(FusedOpKind k) {
  switch (k) {
    case FusedOpKind::kAdd: return "add";
    case FusedOpKind::kMul: return "mul";
    case FusedOpKind::kSigmoid: return "sigmoid";
    case FusedOpKind::kRelu: return "relu";
    case FusedOpKind::kScale: return "scale";
  }
  return "?";
}

FusedOpKind fused_kind_from_name(const std::string& s) {
  for (FusedOpKind k : {FusedOpKind::kAdd, FusedOpKind::kMul, FusedOpKind::kSigmoid,
                        FusedOpKind::kRelu, FusedOpKind::kScale}) {
    if (s == fused_kind_name(k)) return k;
  }
  throw GraphError("unknown fused step '" + s + "'");
}

json operand_json(const FusedOperand& o) { return {{"input", o.from_input}, {"index", o.index}}; }

FusedOperand operand_from(const json& j) {
  return {j.at("input").get<bool>(), j.at("index").get<int>()};
}

const Tensor& arg(const std::vector<Tensor>& in, std::size_t k) {
  if (k >= in.size()) throw GraphError("missing operand " + std::to_string(k));
  return in[k];
}

}  // namespace

json fused_program_to_json(const std::vector<FusedStep>& program) {
  json steps = json::array();
  for (const auto& s : program) {
    steps.push_back({{"kind", fused_kind_name(s.kind)},
                     {"lhs", operand_json(s.lhs)},
                     {"rhs", operand_json(s.rhs)},
                     {"constant", s.constant}});
  }
  return steps;
}

std::vector<FusedStep> fused_program_from_json(const json& j) {
  std::vector<FusedStep> program;
  for (const auto& e : j) {
    FusedStep s;
    s.kind = fused_kind_from_name(e.at("kind").get<std::string>());
    s.lhs = operand_from(e.at("lhs"));
    s.rhs = operand_from(e.at("rhs"));
    s.constant = e.at("constant").get<double>();
    program.push_back(s);
  }
  return program;
}

Tensor eval_node(const Node& n, const std::vector<Tensor>& in, Tensor* out) {
  const json& a = n.attrs;
  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kParam:
      throw GraphError("source node " + std::to_string(n.id) + " is not evaluated");
    case OpKind::kLinear:
      return linear(arg(in, 0), arg(in, 1), in.size() > 2 ? in[2] : Tensor(), out);
    case OpKind::kMatmul:
      return matmul(arg(in, 0), arg(in, 1), out);
    case OpKind::kContract:
      return contract(a.at("spec").get<std::string>(), arg(in, 0), arg(in, 1),
                      a.value("scale", 1.0), out);
    case OpKind::kOuter:
      return outer(arg(in, 0), arg(in, 1), out);
    case OpKind::kLayernorm:
      return layernorm(arg(in, 0), arg(in, 1), arg(in, 2), a.value("eps", 1e-5), out);
    case OpKind::kSoftmax:
      return softmax(arg(in, 0), a.at("axis").get<int>(), out);
    case OpKind::kFusedSoftmax: {
      std::size_t k = 1;
      const Tensor mask = a.value("has_mask", false) ? arg(in, k++) : Tensor();
      const Tensor bias = a.value("has_bias", false) ? arg(in, k++) : Tensor();
      return fused_softmax_mask_bias(arg(in, 0), mask, bias, a.at("axis").get<int>(),
                                     a.value("scale", 1.0), out);
    }
    case OpKind::kSigmoid:
      return sigmoid(arg(in, 0), out);
    case OpKind::kRelu:
      return relu(arg(in, 0), out);
    case OpKind::kScale:
      return scale(arg(in, 0), a.at("factor").get<double>(), out);
    case OpKind::kAdd:
      return add(arg(in, 0), arg(in, 1), out);
    case OpKind::kMul:
      return mul(arg(in, 0), arg(in, 1), out);
    case OpKind::kMean:
      return mean_over_axis(arg(in, 0), a.at("axis").get<int>(), out);
    case OpKind::kSum:
      return sum_over_axis(arg(in, 0), a.at("axis").get<int>(), out);
    case OpKind::kPermute:
      return permute(arg(in, 0), a.at("perm").get<std::vector<int>>(), out);
    case OpKind::kReshape: {
      // Leading dims shared with the input follow it, so a chunked input
      // yields the matching chunk of the target shape.
      Shape target = a.at("shape").get<Shape>();
      const Tensor& x = arg(in, 0);
      for (std::size_t d = 0; d < target.size() && !n.flow.out[d].compute; ++d) target[d] = x.shape()[d];
      return reshape(x, target, out);
    }
    case OpKind::kConcat:
      return concat_last_axis(in, out);
    case OpKind::kSlice:
      return slice_axis(arg(in, 0), a.at("axis").get<int>(), a.at("start").get<std::int64_t>(),
                        a.at("length").get<std::int64_t>(), out);
    case OpKind::kFusedElementwise: {
      Shape shape = arg(in, 0).shape();
      for (const auto& t : in) shape = broadcast_shapes(shape, t.shape());
      return fused_elementwise(fused_program_from_json(a.at("program")), in, shape, out);
    }
  }
  throw GraphError("unhandled op kind");
}

}  // namespace axial
