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

#ifndef AXIAL_TRACE_H_
#define AXIAL_TRACE_H_

#include <map>
#include <string>
#include <vector>

#include "axial/evoformer.h"
#include "axial/graph.h"

namespace axial {

// Records the evoformer program as graph nodes instead of running it. Each
// engine primitive becomes one node.
class TraceOps {
 public:
  using Value = int;

  TraceOps(Graph& graph, const BlockParams& params) : g_(graph), params_(params) {}

  // Parameter nodes are created at first use and shared afterwards.
  int param(const std::string& name);
  Shape shape(int x) const { return g_.node(x).shape; }
  int linear(int x, int w, int b);
  int layernorm(int x, int g, int b);
  int contract(const std::string& spec, int a, int b, double s);
  int add(int a, int b);
  int mul(int a, int b);
  int sigmoid(int x);
  int relu(int x);
  int scale(int x, double f);
  int softmax(int x, int axis);
  int permute(int x, const std::vector<int>& perm);
  int reshape(int x, const Shape& s);

 private:
  Graph& g_;
  const BlockParams& params_;
  std::map<std::string, int> param_ids_;
};

// Graph with inputs {m, z} and outputs {m', z'} computing evoformer_block.
Graph trace_evoformer(const EvoConfig& config, const BlockParams& params);

}  // namespace axial

#endif  // AXIAL_TRACE_H_
