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

#ifndef AXIAL_EVOFORMER_PROGRAM_H_
#define AXIAL_EVOFORMER_PROGRAM_H_

#include <cmath>
#include <string>
#include <utility>

#include "axial/evoformer.h"
#include "axial/tensor.h"

namespace axial {

// The evoformer block written once against an abstract operation backend.
// `Ops` provides:
//   using Value;
//   Value param(const std::string& name);
//   Shape shape(const Value&);
//   Value linear(Value x, Value w, Value b);
//   Value layernorm(Value x, Value gamma, Value beta);
//   Value contract(const std::string& spec, Value a, Value b, double scale);
//   Value add(Value a, Value b);  Value mul(Value a, Value b);
//   Value sigmoid(Value x);  Value relu(Value x);  Value scale(Value x, double f);
//   Value softmax(Value x, int axis);
//   Value permute(Value x, std::vector<int> perm);
//   Value reshape(Value x, Shape shape);
// Eager execution, graph tracing and per-shard DAP execution all run this
// code, so their operation sequences are identical by construction.
//
// The pieces work on any leading extents, which lets DAP call them on shards.
template <class Ops>
class EvoformerProgram {
 public:
  using Value = typename Ops::Value;

  EvoformerProgram(Ops& ops, const EvoConfig& config) : ops_(ops), cfg_(config) {}

  Value lin(const Value& x, const std::string& layer) {
    return ops_.linear(x, ops_.param(layer + ".w"), ops_.param(layer + ".b"));
  }

  Value ln(const Value& x, const std::string& layer) {
    return ops_.layernorm(x, ops_.param(layer + ".gamma"), ops_.param(layer + ".beta"));
  }

  // [.., heads*c] -> [.., heads, c]
  Value split_heads(const Value& x, int heads) {
    Shape s = ops_.shape(x);
    const std::int64_t width = s.back();
    s.back() = heads;
    s.push_back(width / heads);
    return ops_.reshape(x, s);
  }

  // [.., heads, c] -> [.., heads*c]
  Value merge_heads(const Value& x) {
    Shape s = ops_.shape(x);
    const std::int64_t c = s.back();
    s.pop_back();
    s.back() *= c;
    return ops_.reshape(x, s);
  }

  // Per-pair attention bias for MSA row attention: [i, j, heads].
  Value msa_pair_bias(const Value& z) {
    return lin(ln(z, "msa_row.ln_z"), "msa_row.bias");
  }

  // Gated row attention over residues j for every sequence s, biased by
  // pair_bias [i, j, heads].
  Value msa_row_attention(const Value& m, const Value& pair_bias) {
    const int h = cfg_.n_head_msa;
    const Value mln = ln(m, "msa_row.ln_m");
    const Value q = split_heads(lin(mln, "msa_row.q"), h);
    const Value k = split_heads(lin(mln, "msa_row.k"), h);
    const Value v = split_heads(lin(mln, "msa_row.v"), h);
    Value logits = ops_.contract("sihc,sjhc->shij", q, k, 1.0);
    logits = ops_.add(logits, ops_.permute(pair_bias, {2, 0, 1}));
    logits = ops_.scale(logits, inv_sqrt(cfg_.c_head_msa()));
    const Value a = ops_.softmax(logits, -1);
    const Value o = merge_heads(ops_.contract("shij,sjhc->sihc", a, v, 1.0));
    const Value g = ops_.sigmoid(lin(m, "msa_row.gate"));
    return lin(ops_.mul(g, o), "msa_row.out");
  }

  // Gated column attention over sequences for every residue; no pair bias.
  Value msa_col_attention(const Value& m) {
    const int h = cfg_.n_head_msa;
    const Value mln = ln(m, "msa_col.ln_m");
    const Value q = split_heads(lin(mln, "msa_col.q"), h);
    const Value k = split_heads(lin(mln, "msa_col.k"), h);
    const Value v = split_heads(lin(mln, "msa_col.v"), h);
    Value logits = ops_.contract("sihc,tihc->ihst", q, k, 1.0);
    logits = ops_.scale(logits, inv_sqrt(cfg_.c_head_msa()));
    const Value a = ops_.softmax(logits, -1);
    const Value o = merge_heads(ops_.contract("ihst,tihc->sihc", a, v, 1.0));
    const Value g = ops_.sigmoid(lin(m, "msa_col.gate"));
    return lin(ops_.mul(g, o), "msa_col.out");
  }

  Value transition(const Value& x, Stack stack) {
    const std::string p = stack == Stack::kMsa ? "msa_transition" : "pair_transition";
    return lin(ops_.relu(lin(ln(x, p + ".ln"), p + ".fc1")), p + ".fc2");
  }

  struct Projections {
    Value a;
    Value b;
  };

  Projections opm_projections(const Value& m) {
    const Value mln = ln(m, "opm.ln");
    return {lin(mln, "opm.a"), lin(mln, "opm.b")};
  }

  // o_ij = mean_s a_si (x) b_sj, then a linear map of the flattened product.
  Value opm_combine(const Value& a, const Value& b) {
    const Shape sa = ops_.shape(a);
    const Shape sb = ops_.shape(b);
    const double inv_s = 1.0 / static_cast<double>(sa[0]);
    const Value o = ops_.contract("sip,sjq->ijpq", a, b, inv_s);
    const Value flat = ops_.reshape(o, Shape{sa[1], sb[1], sa[2] * sb[2]});
    return lin(flat, "opm.out");
  }

  struct TriangleInputs {
    Value gate;
    Value a;
    Value b;
  };

  TriangleInputs tri_projections(const Value& z, const std::string& p) {
    const Value zln = ln(z, p + ".ln_in");
    const Value g = ops_.sigmoid(lin(zln, p + ".gate"));
    const Value a = ops_.mul(ops_.sigmoid(lin(zln, p + ".a_gate")), lin(zln, p + ".a_proj"));
    const Value b = ops_.mul(ops_.sigmoid(lin(zln, p + ".b_gate")), lin(zln, p + ".b_proj"));
    return {g, a, b};
  }

  Value tri_finish(const Value& gate, const Value& x, const std::string& p) {
    return ops_.mul(gate, lin(ln(x, p + ".ln_out"), p + ".out"));
  }

  // sum_k a_ik (.) b_jk
  Value tri_outgoing_combine(const TriangleInputs& t) {
    return tri_finish(t.gate, ops_.contract("ikc,jkc->ijc", t.a, t.b, 1.0), "tri_out");
  }

  // sum_k a_ki (.) b_kj
  Value tri_incoming_combine(const TriangleInputs& t) {
    return tri_finish(t.gate, ops_.contract("kic,kjc->ijc", t.a, t.b, 1.0), "tri_in");
  }

  // Attention over k within each row i of z; the key bias for (i, k) comes
  // from z_ik itself, so rows stay independent.
  Value pair_attention_row(const Value& z) {
    const int h = cfg_.n_head_pair;
    const Value zln = ln(z, "pair_row.ln");
    const Value q = split_heads(lin(zln, "pair_row.q"), h);
    const Value k = split_heads(lin(zln, "pair_row.k"), h);
    const Value v = split_heads(lin(zln, "pair_row.v"), h);
    const Value bias = key_bias(lin(zln, "pair_row.bias"), {0, 2, 1});
    Value logits = ops_.contract("ijhc,ikhc->ihjk", q, k, 1.0);
    logits = ops_.add(logits, bias);
    logits = ops_.scale(logits, inv_sqrt(cfg_.c_head_pair()));
    const Value a = ops_.softmax(logits, -1);
    const Value o = merge_heads(ops_.contract("ihjk,ikhc->ijhc", a, v, 1.0));
    const Value g = ops_.sigmoid(lin(z, "pair_row.gate"));
    return lin(ops_.mul(g, o), "pair_row.out");
  }

  // Attention over k within each column j of z, key bias from z_kj.
  Value pair_attention_col(const Value& z) {
    const int h = cfg_.n_head_pair;
    const Value zln = ln(z, "pair_col.ln");
    const Value q = split_heads(lin(zln, "pair_col.q"), h);
    const Value k = split_heads(lin(zln, "pair_col.k"), h);
    const Value v = split_heads(lin(zln, "pair_col.v"), h);
    const Value bias = key_bias(lin(zln, "pair_col.bias"), {1, 2, 0});
    Value logits = ops_.contract("ijhc,kjhc->jhik", q, k, 1.0);
    logits = ops_.add(logits, bias);
    logits = ops_.scale(logits, inv_sqrt(cfg_.c_head_pair()));
    const Value a = ops_.softmax(logits, -1);
    const Value o = merge_heads(ops_.contract("jhik,kjhc->ijhc", a, v, 1.0));
    const Value g = ops_.sigmoid(lin(z, "pair_col.gate"));
    return lin(ops_.mul(g, o), "pair_col.out");
  }

  std::pair<Value, Value> block(Value m, Value z) {
    m = ops_.add(m, msa_row_attention(m, msa_pair_bias(z)));
    m = ops_.add(m, msa_col_attention(m));
    m = ops_.add(m, transition(m, Stack::kMsa));
    const Projections pr = opm_projections(m);
    z = ops_.add(z, opm_combine(pr.a, pr.b));
    z = ops_.add(z, tri_outgoing_combine(tri_projections(z, "tri_out")));
    z = ops_.add(z, tri_incoming_combine(tri_projections(z, "tri_in")));
    z = ops_.add(z, pair_attention_row(z));
    z = ops_.add(z, pair_attention_col(z));
    z = ops_.add(z, transition(z, Stack::kPair));
    return {m, z};
  }

 private:
  static double inv_sqrt(std::int64_t c) { return 1.0 / std::sqrt(static_cast<double>(c)); }

  // [a, b, heads] permuted to [outer, heads, key] then viewed as
  // [outer, heads, 1, key] to broadcast over queries.
  Value key_bias(const Value& raw, std::vector<int> perm) {
    const Value p = ops_.permute(raw, std::move(perm));
    const Shape s = ops_.shape(p);
    return ops_.reshape(p, Shape{s[0], s[1], 1, s[2]});
  }

  Ops& ops_;
  const EvoConfig& cfg_;
};

// Executes the program directly on tensors.
class EagerOps {
 public:
  using Value = Tensor;

  explicit EagerOps(const BlockParams& params) : params_(params) {}

  Tensor param(const std::string& name) { return params_.at(name); }
  Shape shape(const Tensor& x) { return x.shape(); }
  Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) { return axial::linear(x, w, b); }
  Tensor layernorm(const Tensor& x, const Tensor& g, const Tensor& b) {
    return axial::layernorm(x, g, b);
  }
  Tensor contract(const std::string& spec, const Tensor& a, const Tensor& b, double s) {
    return axial::contract(spec, a, b, s);
  }
  Tensor add(const Tensor& a, const Tensor& b) { return axial::add(a, b); }
  Tensor mul(const Tensor& a, const Tensor& b) { return axial::mul(a, b); }
  Tensor sigmoid(const Tensor& x) { return axial::sigmoid(x); }
  Tensor relu(const Tensor& x) { return axial::relu(x); }
  Tensor scale(const Tensor& x, double f) { return axial::scale(x, f); }
  Tensor softmax(const Tensor& x, int axis) { return axial::softmax(x, axis); }
  Tensor permute(const Tensor& x, const std::vector<int>& perm) { return axial::permute(x, perm); }
  Tensor reshape(const Tensor& x, const Shape& s) { return axial::reshape(x, s); }

 private:
  const BlockParams& params_;
};

}  // namespace axial

#endif  // AXIAL_EVOFORMER_PROGRAM_H_
