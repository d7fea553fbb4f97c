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

#ifndef AXIAL_GRAPH_H_
#define AXIAL_GRAPH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "axial/tensor.h"
#include "json.hpp"

namespace axial {

enum class OpKind {
  kInput,
  kParam,
  kLinear,
  kMatmul,
  kContract,
  kOuter,
  kLayernorm,
  kSoftmax,
  kFusedSoftmax,
  kSigmoid,
  kRelu,
  kScale,
  kAdd,
  kMul,
  kMean,
  kSum,
  kPermute,
  kReshape,
  kConcat,
  kSlice,
  kFusedElementwise,
};

const char* op_name(OpKind op);
// Throws GraphError for unknown names.
OpKind op_from_name(std::string_view name);
// add, mul, sigmoid, relu, scale.
bool is_elementwise(OpKind op);

// Output dimension `dim` of a node reads dimension `dim` of input `input`.
struct DimSource {
  int input = 0;
  int dim = 0;
  bool operator==(const DimSource&) const = default;
};

struct OutDim {
  // A COMPUTE dim mixes positions along it and can never be chunked.
  bool compute = false;
  std::vector<DimSource> sources;
  bool operator==(const OutDim&) const = default;
};

// How each output dimension of a node relates to its input dimensions.
// Slicing a free output dim, and the mapped dims of each mapped input,
// reproduces the slice of the full output. Inputs with no source for a
// dim (broadcast or contracted) are read whole.
struct DimFlow {
  std::vector<OutDim> out;
  std::vector<std::vector<int>> in_compute;

  bool is_compute(int dim) const { return out.at(dim).compute; }
  // Input dim feeding output `dim` from input `input`, or -1 when none.
  int source_dim(int dim, int input) const;
  bool operator==(const DimFlow&) const = default;

  nlohmann::json to_json() const;
  static DimFlow from_json(const nlohmann::json& j);
};

struct Node {
  int id = 0;
  OpKind op = OpKind::kInput;
  std::vector<int> inputs;
  nlohmann::json attrs = nlohmann::json::object();
  Shape shape;
  DimFlow flow;
  std::string name;
  Tensor value;  // kParam only

  std::int64_t numel() const { return axial::numel(shape); }
};

// Shape and flow of an op applied to inputs of the given shapes. Throws
// DimensionError or GraphError when the op rejects them.
struct Signature {
  Shape shape;
  DimFlow flow;
};
Signature infer_signature(OpKind op, const nlohmann::json& attrs,
                          const std::vector<Shape>& input_shapes);

// Topologically ordered node list. Node ids equal positions, so inputs
// always reference smaller ids.
class Graph {
 public:
  int add_input(const std::string& name, Shape shape);
  // Weight constant. Parameters belong to the model, not to the activation
  // footprint, and are never freed or chunked.
  int add_param(const std::string& name, Tensor value);
  int add_op(OpKind op, std::vector<int> inputs,
             nlohmann::json attrs = nlohmann::json::object(), std::string name = "");
  void set_outputs(std::vector<int> ids);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(id); }
  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }
  bool is_output(int id) const;

  // Distinct consumer ids per node, ascending.
  std::vector<std::vector<int>> consumers() const;
  // Id of the last consumer, or the node's own id when it has none. Graph
  // outputs report size() since they outlive execution.
  std::vector<int> last_use() const;

  // Re-derives every shape and flow and checks ordering. Throws GraphError.
  void validate() const;

  nlohmann::json to_json() const;
  static Graph from_json(const nlohmann::json& j);
  // Parses JSON text; syntax errors carry line and column.
  static Graph parse(std::string_view text);
  // Stable 64-bit FNV-1a hash of the structure and parameter values.
  std::uint64_t digest() const;

 private:
  int push(Node n);

  std::vector<Node> nodes_;
  std::vector<int> inputs_;
  std::vector<int> outputs_;
};

// Program attribute of fused_elementwise nodes.
nlohmann::json fused_program_to_json(const std::vector<FusedStep>& program);
std::vector<FusedStep> fused_program_from_json(const nlohmann::json& j);

// Evaluates one non-source node. When `out` is given the result is written
// into it and no memory is allocated.
Tensor eval_node(const Node& node, const std::vector<Tensor>& inputs, Tensor* out = nullptr);

}  // namespace axial

#endif  // AXIAL_GRAPH_H_
