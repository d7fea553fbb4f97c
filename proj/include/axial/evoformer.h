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

#ifndef AXIAL_EVOFORMER_H_
#define AXIAL_EVOFORMER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "axial/tensor.h"
#include "json.hpp"

namespace axial {

// Dimensions of one evoformer block. MSA activations are
// [n_seq, n_res, h_msa]; pair activations are [n_res, n_res, h_pair].
struct EvoConfig {
  std::int64_t n_seq = 8;
  std::int64_t n_res = 16;
  std::int64_t h_msa = 8;
  std::int64_t h_pair = 4;
  int n_head_msa = 2;
  int n_head_pair = 2;
  std::int64_t hidden_proj = 4;
  int transition_factor = 4;

  std::int64_t c_head_msa() const { return h_msa / n_head_msa; }
  std::int64_t c_head_pair() const { return h_pair / n_head_pair; }
  // Throws DimensionError on non-positive extents or indivisible heads.
  void validate() const;

  nlohmann::json to_json() const;
  static EvoConfig from_json(const nlohmann::json& j);
};

// Weights of one block keyed by "<submodule>.<layer>.<w|b|gamma|beta>".
class BlockParams {
 public:
  BlockParams() = default;
  explicit BlockParams(EvoConfig config) : config_(config) {}

  // Deterministic initialization from a 64-bit seed.
  static BlockParams random(const EvoConfig& config, std::uint64_t seed);
  // Every parameter replaced by zeros of the same shape.
  BlockParams zeros_like() const;

  const EvoConfig& config() const { return config_; }
  const Tensor& at(const std::string& name) const;
  void set(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  const std::map<std::string, Tensor>& all() const { return params_; }

  nlohmann::json to_json() const;
  static BlockParams from_json(const nlohmann::json& j);

 private:
  EvoConfig config_;
  std::map<std::string, Tensor> params_;
};

// Name and shape of every parameter a block expects, in creation order.
std::vector<std::pair<std::string, Shape>> parameter_layout(const EvoConfig& config);

enum class Stack { kMsa, kPair };

// Reference single-device implementations. Inputs are validated against the
// parameter set's EvoConfig.
Tensor msa_row_attention(const Tensor& m, const Tensor& z, const BlockParams& p);
Tensor msa_col_attention(const Tensor& m, const BlockParams& p);
Tensor transition(const Tensor& x, const BlockParams& p, Stack stack);
Tensor outer_product_mean(const Tensor& m, const BlockParams& p);
Tensor tri_update_outgoing(const Tensor& z, const BlockParams& p);
Tensor tri_update_incoming(const Tensor& z, const BlockParams& p);
Tensor pair_attention_row(const Tensor& z, const BlockParams& p);
Tensor pair_attention_col(const Tensor& z, const BlockParams& p);

struct BlockOutput {
  Tensor m;
  Tensor z;
};

BlockOutput evoformer_block(const Tensor& m, const Tensor& z, const BlockParams& p);

}  // namespace axial

#endif  // AXIAL_EVOFORMER_H_
