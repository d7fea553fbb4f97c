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


#ifndef AXIAL_TESTS_FIXTURES_H_
#define AXIAL_TESTS_FIXTURES_H_

#include <cstdint>
#include <random>
#include <vector>

#include "axial/evoformer.h"
#include "axial/graph.h"
#include "test_util.h"

namespace axial::testing {

// x1[128] outer x2[128], then summed over its second axis.
inline Graph outer_rowsum(std::int64_t n = 128) {
  Graph g;
  const int x1 = g.add_input("x1", {n});
  const int x2 = g.add_input("x2", {n});
  const int y = g.add_op(OpKind::kOuter, {x1, x2});
  const int z = g.add_op(OpKind::kSum, {y}, {{"axis", 1}});
  g.set_outputs({z});
  return g;
}

inline EvoConfig small_config(std::int64_t n_s, std::int64_t n_r) {
  EvoConfig c;
  c.n_seq = n_s;
  c.n_res = n_r;
  c.h_msa = 8;
  c.h_pair = 4;
  c.n_head_msa = 2;
  c.n_head_pair = 2;
  c.hidden_proj = 4;
  return c;
}

inline std::vector<Tensor> block_inputs(const EvoConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor m = random_tensor({c.n_seq, c.n_res, c.h_msa}, rng);
  Tensor z = random_tensor({c.n_res, c.n_res, c.h_pair}, rng);
  return {m, z};
}

inline std::vector<Tensor> clones(const std::vector<Tensor>& ts) {
  std::vector<Tensor> out;
  for (const auto& t : ts) out.push_back(t.clone());
  return out;
}

}  // namespace axial::testing

#endif  // AXIAL_TESTS_FIXTURES_H_
