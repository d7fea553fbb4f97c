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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "axial/errors.h"
#include "axial/evoformer.h"
#include "axial/evoformer_program.h"
#include "evoformer_oracle.h"
#include "test_util.h"

namespace axial {
namespace {

using oracle::from_grid;
using oracle::Oracle;
using oracle::to_grid;
using testing::random_tensor;

EvoConfig small_config(std::int64_t n_s, std::int64_t n_r) {
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

struct Inputs {
  Tensor m;
  Tensor z;
};

Inputs make_inputs(const EvoConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Inputs in;
  in.m = random_tensor({c.n_seq, c.n_res, c.h_msa}, rng);
  in.z = random_tensor({c.n_res, c.n_res, c.h_pair}, rng);
  return in;
}

// Runs every sub-module on one configuration and compares with the loop
// oracle.
void check_all_ops(const EvoConfig& c, std::uint64_t seed) {
  SCOPED_TRACE("seed " + std::to_string(seed) + " N_s=" + std::to_string(c.n_seq) +
               " N_r=" + std::to_string(c.n_res));
  const BlockParams p = BlockParams::random(c, seed);
  const Inputs in = make_inputs(c, seed);
  const Oracle o(p);
  const auto gm = to_grid(in.m);
  const auto gz = to_grid(in.z);
  EXPECT_LE(max_abs_diff(msa_row_attention(in.m, in.z, p), from_grid(o.msa_row_attention(gm, gz))), 1e-12);
  EXPECT_LE(max_abs_diff(msa_col_attention(in.m, p), from_grid(o.msa_col_attention(gm))), 1e-12);
  EXPECT_LE(max_abs_diff(transition(in.m, p, Stack::kMsa), from_grid(o.transition(gm, "msa_transition"))), 1e-12);
  EXPECT_LE(max_abs_diff(transition(in.z, p, Stack::kPair), from_grid(o.transition(gz, "pair_transition"))), 1e-12);
  EXPECT_LE(max_abs_diff(outer_product_mean(in.m, p), from_grid(o.outer_product_mean(gm))), 1e-12);
  EXPECT_LE(max_abs_diff(tri_update_outgoing(in.z, p), from_grid(o.triangle(gz, "tri_out", true))), 1e-12);
  EXPECT_LE(max_abs_diff(tri_update_incoming(in.z, p), from_grid(o.triangle(gz, "tri_in", false))), 1e-12);
  EXPECT_LE(max_abs_diff(pair_attention_row(in.z, p), from_grid(o.pair_attention(gz, true))), 1e-12);
  EXPECT_LE(max_abs_diff(pair_attention_col(in.z, p), from_grid(o.pair_attention(gz, false))), 1e-12);
}

TEST(MsaRowAttention, Seed7MatchesLoopOracle) {
  const EvoConfig c = small_config(3, 4);
  const BlockParams p = BlockParams::random(c, 7);
  const Inputs in = make_inputs(c, 7);
  const Tensor got = msa_row_attention(in.m, in.z, p);
  EXPECT_EQ(got.shape(), in.m.shape());
  EXPECT_LE(max_abs_diff(got, from_grid(Oracle(p).msa_row_attention(to_grid(in.m), to_grid(in.z)))), 1e-12);
}

TEST(MsaRowAttention, SingletonIsGatedValue) {
  const EvoConfig c = small_config(1, 1);
  const BlockParams p = BlockParams::random(c, 2);
  const Inputs in = make_inputs(c, 2);
  const Oracle o(p);
  const auto x = to_grid(in.m)[0][0];
  const auto v = o.lin(o.ln(x, "msa_row.ln_m"), "msa_row.v");
  auto g = o.lin(x, "msa_row.gate");
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = Oracle::sig(g[i]) * v[i];
  const auto want = o.lin(g, "msa_row.out");
  const Tensor got = msa_row_attention(in.m, in.z, p);
  for (std::int64_t i = 0; i < c.h_msa; ++i) EXPECT_NEAR(got.at({0, 0, i}), want[i], 1e-12);
}

TEST(MsaRowAttention, ClosedGateLeavesOutputBias) {
  const EvoConfig c = small_config(2, 3);
  BlockParams p = BlockParams::random(c, 4);
  p.set("msa_row.gate.w", Tensor::zeros({c.h_msa, c.h_msa}));
  p.set("msa_row.gate.b", Tensor::full({c.h_msa}, -1e30));
  const Inputs in = make_inputs(c, 4);
  const Tensor got = msa_row_attention(in.m, in.z, p);
  const Tensor& b = p.at("msa_row.out.b");
  for (std::int64_t s = 0; s < c.n_seq; ++s)
    for (std::int64_t i = 0; i < c.n_res; ++i)
      for (std::int64_t h = 0; h < c.h_msa; ++h) EXPECT_EQ(got.at({s, i, h}), b.at({h}));
}

TEST(MsaRowAttention, SequencePermutationIsBitExact) {
  const EvoConfig c = small_config(4, 5);
  const BlockParams p = BlockParams::random(c, 31);
  const Inputs in = make_inputs(c, 31);
  const std::vector<std::int64_t> perm = {2, 0, 3, 1};
  Tensor mp = Tensor::zeros(in.m.shape());
  for (std::int64_t s = 0; s < c.n_seq; ++s)
    for (std::int64_t i = 0; i < c.n_res; ++i)
      for (std::int64_t h = 0; h < c.h_msa; ++h) mp.mutable_at({s, i, h}) = in.m.at({perm[s], i, h});
  const Tensor base = msa_row_attention(in.m, in.z, p);
  const Tensor moved = msa_row_attention(mp, in.z, p);
  for (std::int64_t s = 0; s < c.n_seq; ++s)
    for (std::int64_t i = 0; i < c.n_res; ++i)
      for (std::int64_t h = 0; h < c.h_msa; ++h) {
        EXPECT_EQ(moved.at({s, i, h}), base.at({perm[s], i, h}));
      }
}

TEST(MsaColAttention, Seed11MatchesLoopOracle) {
  const EvoConfig c = small_config(4, 5);
  const BlockParams p = BlockParams::random(c, 11);
  const Inputs in = make_inputs(c, 11);
  EXPECT_LE(max_abs_diff(msa_col_attention(in.m, p), from_grid(Oracle(p).msa_col_attention(to_grid(in.m)))), 1e-12);
}

TEST(MsaColAttention, SingleSequenceHasUnitWeight) {
  const EvoConfig c = small_config(1, 3);
  const BlockParams p = BlockParams::random(c, 12);
  const Inputs in = make_inputs(c, 12);
  const Oracle o(p);
  const auto gm = to_grid(in.m);
  const Tensor got = msa_col_attention(in.m, p);
  for (std::int64_t i = 0; i < c.n_res; ++i) {
    const auto v = o.lin(o.ln(gm[0][i], "msa_col.ln_m"), "msa_col.v");
    auto g = o.lin(gm[0][i], "msa_col.gate");
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = Oracle::sig(g[k]) * v[k];
    const auto want = o.lin(g, "msa_col.out");
    for (std::int64_t h = 0; h < c.h_msa; ++h) EXPECT_NEAR(got.at({0, i, h}), want[h], 1e-12);
  }
}

TEST(MsaColAttention, EquivariantUnderSequencePermutation) {
  const EvoConfig c = small_config(4, 3);
  const BlockParams p = BlockParams::random(c, 19);
  const Inputs in = make_inputs(c, 19);
  const std::vector<std::int64_t> perm = {3, 1, 0, 2};
  auto permuted = [&](const Tensor& t) {
    Tensor out = Tensor::zeros(t.shape());
    for (std::int64_t s = 0; s < c.n_seq; ++s)
      for (std::int64_t i = 0; i < c.n_res; ++i)
        for (std::int64_t h = 0; h < c.h_msa; ++h) out.mutable_at({s, i, h}) = t.at({perm[s], i, h});
    return out;
  };
  EXPECT_LE(max_abs_diff(msa_col_attention(permuted(in.m), p), permuted(msa_col_attention(in.m, p))), 1e-12);
}

TEST(Transition, Seed3MatchesLoopOracle) {
  const EvoConfig c = small_config(3, 4);
  const BlockParams p = BlockParams::random(c, 3);
  const Inputs in = make_inputs(c, 3);
  const Oracle o(p);
  const Tensor tm = transition(in.m, p, Stack::kMsa);
  const Tensor tz = transition(in.z, p, Stack::kPair);
  EXPECT_EQ(tm.shape(), in.m.shape());
  EXPECT_EQ(tz.shape(), in.z.shape());
  EXPECT_LE(max_abs_diff(tm, from_grid(o.transition(to_grid(in.m), "msa_transition"))), 1e-12);
  EXPECT_LE(max_abs_diff(tz, from_grid(o.transition(to_grid(in.z), "pair_transition"))), 1e-12);
}

TEST(Transition, ZeroWeightsPropagateBiasOnly) {
  const EvoConfig c = small_config(2, 3);
  BlockParams p = BlockParams::random(c, 8);
  for (const char* w : {"msa_transition.fc1.w", "msa_transition.fc2.w"}) {
    p.set(w, Tensor::zeros(p.at(w).shape()));
  }
  const Inputs in = make_inputs(c, 8);
  const Tensor got = transition(in.m, p, Stack::kMsa);
  const Tensor& b = p.at("msa_transition.fc2.b");
  for (std::int64_t s = 0; s < c.n_seq; ++s)
    for (std::int64_t i = 0; i < c.n_res; ++i)
      for (std::int64_t h = 0; h < c.h_msa; ++h) EXPECT_EQ(got.at({s, i, h}), b.at({h}));
}

TEST(OuterProductMean, Seed5MatchesLoopOracle) {
  const EvoConfig c = small_config(4, 5);
  const BlockParams p = BlockParams::random(c, 5);
  const Inputs in = make_inputs(c, 5);
  const Tensor got = outer_product_mean(in.m, p);
  EXPECT_EQ(got.shape(), (Shape{c.n_res, c.n_res, c.h_pair}));
  EXPECT_LE(max_abs_diff(got, from_grid(Oracle(p).outer_product_mean(to_grid(in.m)))), 1e-12);
}

TEST(OuterProductMean, SingleSequenceIsOneOuterProduct) {
  const EvoConfig c = small_config(1, 3);
  const BlockParams p = BlockParams::random(c, 6);
  const Inputs in = make_inputs(c, 6);
  const Oracle o(p);
  const auto gm = to_grid(in.m);
  const Tensor got = outer_product_mean(in.m, p);
  const std::size_t P = c.hidden_proj;
  for (std::int64_t i = 0; i < c.n_res; ++i) {
    for (std::int64_t j = 0; j < c.n_res; ++j) {
      const auto a = o.lin(o.ln(gm[0][i], "opm.ln"), "opm.a");
      const auto b = o.lin(o.ln(gm[0][j], "opm.ln"), "opm.b");
      std::vector<double> flat(P * P);
      for (std::size_t x = 0; x < P; ++x)
        for (std::size_t y = 0; y < P; ++y) flat[x * P + y] = a[x] * b[y];
      const auto want = o.lin(flat, "opm.out");
      for (std::int64_t h = 0; h < c.h_pair; ++h) EXPECT_NEAR(got.at({i, j, h}), want[h], 1e-12);
    }
  }
}

TEST(OuterProductMean, OnesProjectionsGiveOnes) {
  EvoConfig c = small_config(3, 4);
  c.hidden_proj = 2;
  c.h_pair = 8;
  BlockParams p = BlockParams::random(c, 9);
  for (const char* l : {"opm.a", "opm.b"}) {
    p.set(std::string(l) + ".w", Tensor::zeros({c.h_msa, 2}));
    p.set(std::string(l) + ".b", Tensor::full({2}, 1.0));
  }
  Tensor w = Tensor::zeros({4, c.h_pair});
  for (std::int64_t k = 0; k < 4; ++k) w.mutable_at({k, k}) = 1.0;
  p.set("opm.out.w", w);
  p.set("opm.out.b", Tensor::zeros({c.h_pair}));
  const Inputs in = make_inputs(c, 9);
  const Tensor got = outer_product_mean(in.m, p);
  for (std::int64_t i = 0; i < c.n_res; ++i)
    for (std::int64_t j = 0; j < c.n_res; ++j)
      for (std::int64_t h = 0; h < c.h_pair; ++h) {
        EXPECT_NEAR(got.at({i, j, h}), h < 4 ? 1.0 : 0.0, 1e-15);
      }
}

TEST(TriangleUpdate, Seed13MatchesLoopOracle) {
  const EvoConfig c = small_config(2, 6);
  const BlockParams p = BlockParams::random(c, 13);
  const Inputs in = make_inputs(c, 13);
  const Oracle o(p);
  EXPECT_LE(max_abs_diff(tri_update_outgoing(in.z, p), from_grid(o.triangle(to_grid(in.z), "tri_out", true))), 1e-12);
  EXPECT_LE(max_abs_diff(tri_update_incoming(in.z, p), from_grid(o.triangle(to_grid(in.z), "tri_in", false))), 1e-12);
}

TEST(TriangleUpdate, SingleResidue) {
  const EvoConfig c = small_config(1, 1);
  const BlockParams p = BlockParams::random(c, 14);
  const Inputs in = make_inputs(c, 14);
  const Oracle o(p);
  const auto gz = to_grid(in.z);
  EXPECT_LE(max_abs_diff(tri_update_outgoing(in.z, p), from_grid(o.triangle(gz, "tri_out", true))), 1e-12);
  EXPECT_LE(max_abs_diff(tri_update_incoming(in.z, p), from_grid(o.triangle(gz, "tri_in", false))), 1e-12);
  // With one residue both directions reduce to the single product a_11 b_11.
  EXPECT_LE(max_abs_diff(from_grid(o.triangle(gz, "tri_in", true)), from_grid(o.triangle(gz, "tri_in", false))), 0.0);
}

TEST(TriangleUpdate, IncomingOnTransposeMatchesOutgoing) {
  const EvoConfig c = small_config(2, 5);
  const BlockParams p = BlockParams::random(c, 15);
  const Inputs in = make_inputs(c, 15);
  // Incoming with a and b swapped, applied to z transposed, renames the
  // indices of outgoing.
  BlockParams q = p;
  const std::vector<std::pair<std::string, std::string>> rename = {
      {"ln_in.gamma", "ln_in.gamma"}, {"ln_in.beta", "ln_in.beta"}, {"gate.w", "gate.w"},
      {"gate.b", "gate.b"},           {"a_gate.w", "b_gate.w"},     {"a_gate.b", "b_gate.b"},
      {"a_proj.w", "b_proj.w"},       {"a_proj.b", "b_proj.b"},     {"b_gate.w", "a_gate.w"},
      {"b_gate.b", "a_gate.b"},       {"b_proj.w", "a_proj.w"},     {"b_proj.b", "a_proj.b"},
      {"ln_out.gamma", "ln_out.gamma"}, {"ln_out.beta", "ln_out.beta"}, {"out.w", "out.w"},
      {"out.b", "out.b"}};
  for (const auto& [dst, src] : rename) q.set("tri_in." + dst, p.at("tri_out." + src));
  const Tensor zt = permute(in.z, {1, 0, 2});
  const Tensor want = permute(tri_update_outgoing(in.z, p), {1, 0, 2});
  EXPECT_LE(max_abs_diff(tri_update_incoming(zt, q), want), 1e-12);
}

TEST(PairAttention, Seed17MatchesLoopOracle) {
  const EvoConfig c = small_config(2, 6);
  const BlockParams p = BlockParams::random(c, 17);
  const Inputs in = make_inputs(c, 17);
  const Oracle o(p);
  EXPECT_LE(max_abs_diff(pair_attention_row(in.z, p), from_grid(o.pair_attention(to_grid(in.z), true))), 1e-12);
  EXPECT_LE(max_abs_diff(pair_attention_col(in.z, p), from_grid(o.pair_attention(to_grid(in.z), false))), 1e-12);
}

TEST(PairAttention, SingletonHasUnitWeight) {
  const EvoConfig c = small_config(1, 1);
  const BlockParams p = BlockParams::random(c, 18);
  const Inputs in = make_inputs(c, 18);
  const Oracle o(p);
  const auto x = to_grid(in.z)[0][0];
  for (const std::string pre : {"pair_row", "pair_col"}) {
    const auto v = o.lin(o.ln(x, pre + ".ln"), pre + ".v");
    auto g = o.lin(x, pre + ".gate");
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = Oracle::sig(g[i]) * v[i];
    const auto want = o.lin(g, pre + ".out");
    const Tensor got = pre == "pair_row" ? pair_attention_row(in.z, p) : pair_attention_col(in.z, p);
    for (std::int64_t h = 0; h < c.h_pair; ++h) EXPECT_NEAR(got.at({0, 0, h}), want[h], 1e-12);
  }
}

// Captures every softmax the program evaluates.
class RecordingOps : public EagerOps {
 public:
  using EagerOps::EagerOps;
  Tensor softmax(const Tensor& x, int axis) {
    Tensor y = EagerOps::softmax(x, axis);
    seen.push_back(y);
    return y;
  }
  std::vector<Tensor> seen;
};

TEST(Attention, WeightsSumToOne) {
  const EvoConfig c = small_config(3, 5);
  const BlockParams p = BlockParams::random(c, 21);
  const Inputs in = make_inputs(c, 21);
  RecordingOps ops(p);
  EvoformerProgram<RecordingOps> prog(ops, c);
  prog.block(in.m, in.z);
  ASSERT_EQ(ops.seen.size(), 4u);
  for (const Tensor& a : ops.seen) {
    const Tensor sums = sum_over_axis(a, -1);
    for (double s : sums.values()) EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Ops, NamedAndRandomSeedsMatchLoopOracle) {
  for (std::uint64_t seed : {7u, 11u, 3u, 5u, 13u, 17u}) check_all_ops(small_config(3, 4), seed);
  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 100; seed < 124; ++seed) {
    EvoConfig c;
    c.n_seq = 1 + static_cast<std::int64_t>(rng() % 4);
    c.n_res = 1 + static_cast<std::int64_t>(rng() % 6);
    c.n_head_msa = 1 + static_cast<int>(rng() % 2);
    c.n_head_pair = 1 + static_cast<int>(rng() % 2);
    c.h_msa = c.n_head_msa * (1 + static_cast<std::int64_t>(rng() % 3));
    c.h_pair = c.n_head_pair * (1 + static_cast<std::int64_t>(rng() % 3));
    c.hidden_proj = 1 + static_cast<std::int64_t>(rng() % 3);
    c.transition_factor = 1 + static_cast<int>(rng() % 4);
    check_all_ops(c, seed);
  }
}

TEST(Block, MatchesLoopOracle) {
  const EvoConfig c = small_config(4, 6);
  const BlockParams p = BlockParams::random(c, 23);
  const Inputs in = make_inputs(c, 23);
  const BlockOutput out = evoformer_block(in.m, in.z, p);
  EXPECT_EQ(out.m.shape(), in.m.shape());
  EXPECT_EQ(out.z.shape(), in.z.shape());
  const auto [om, oz] = Oracle(p).block(to_grid(in.m), to_grid(in.z));
  EXPECT_LE(max_abs_diff(out.m, from_grid(om)), 1e-12);
  EXPECT_LE(max_abs_diff(out.z, from_grid(oz)), 1e-12);
}

TEST(Block, EqualsSeparateCallsBitExactly) {
  const EvoConfig c = small_config(4, 6);
  const BlockParams p = BlockParams::random(c, 23);
  const Inputs in = make_inputs(c, 23);
  Tensor m = in.m;
  Tensor z = in.z;
  m = add(m, msa_row_attention(m, z, p));
  m = add(m, msa_col_attention(m, p));
  m = add(m, transition(m, p, Stack::kMsa));
  z = add(z, outer_product_mean(m, p));
  z = add(z, tri_update_outgoing(z, p));
  z = add(z, tri_update_incoming(z, p));
  z = add(z, pair_attention_row(z, p));
  z = add(z, pair_attention_col(z, p));
  z = add(z, transition(z, p, Stack::kPair));
  const BlockOutput out = evoformer_block(in.m, in.z, p);
  EXPECT_TRUE(bit_equal(out.m, m));
  EXPECT_TRUE(bit_equal(out.z, z));
}

TEST(Block, AllZeroParametersIsIdentity) {
  const EvoConfig c = small_config(3, 4);
  const BlockParams p = BlockParams::random(c, 1).zeros_like();
  const Inputs in = make_inputs(c, 1);
  const BlockOutput out = evoformer_block(in.m, in.z, p);
  EXPECT_TRUE(bit_equal(out.m, in.m));
  EXPECT_TRUE(bit_equal(out.z, in.z));
}

TEST(Block, ZeroWeightsLeaveConstantBiasContributions) {
  const EvoConfig c = small_config(3, 4);
  BlockParams p = BlockParams::random(c, 2);
  const BlockParams original = p;
  for (const auto& [name, t] : original.all()) {
    if (name.size() > 2 && name.compare(name.size() - 2, 2, ".w") == 0) {
      p.set(name, Tensor::zeros(t.shape()));
    }
  }
  const Inputs in = make_inputs(c, 2);
  const BlockOutput out = evoformer_block(in.m, in.z, p);
  auto sig = [](const Tensor& t) { return sigmoid(t); };
  const Tensor dm = add(add(p.at("msa_row.out.b"), p.at("msa_col.out.b")), p.at("msa_transition.fc2.b"));
  Tensor dz = add(p.at("opm.out.b"), mul(sig(p.at("tri_out.gate.b")), p.at("tri_out.out.b")));
  dz = add(dz, mul(sig(p.at("tri_in.gate.b")), p.at("tri_in.out.b")));
  dz = add(add(dz, p.at("pair_row.out.b")), add(p.at("pair_col.out.b"), p.at("pair_transition.fc2.b")));
  EXPECT_LE(max_abs_diff(out.m, add(in.m, dm)), 1e-12);
  EXPECT_LE(max_abs_diff(out.z, add(in.z, dz)), 1e-12);
}

TEST(Block, RejectsMismatchedShapes) {
  const EvoConfig c = small_config(2, 3);
  const BlockParams p = BlockParams::random(c, 1);
  EXPECT_THROW(evoformer_block(Tensor::zeros({2, 4, 8}), Tensor::zeros({3, 3, 4}), p), DimensionError);
  EXPECT_THROW(msa_col_attention(Tensor::zeros({2, 3, 4}), p), DimensionError);
}

TEST(Config, RejectsIndivisibleHeads) {
  EvoConfig c = small_config(2, 3);
  c.n_head_msa = 3;
  EXPECT_THROW(c.validate(), DimensionError);
  EXPECT_THROW(BlockParams::random(c, 1), DimensionError);
}

TEST(Params, JsonRoundTripIsBitStable) {
  const EvoConfig c = small_config(2, 3);
  const BlockParams p = BlockParams::random(c, 42);
  const std::string text = p.to_json().dump();
  const BlockParams q = BlockParams::from_json(nlohmann::json::parse(text));
  ASSERT_EQ(p.all().size(), q.all().size());
  for (const auto& [name, t] : p.all()) EXPECT_TRUE(bit_equal(t, q.at(name))) << name;
  EXPECT_EQ(q.to_json().dump(), text);
}

TEST(Params, SameSeedSameWeights) {
  const EvoConfig c = small_config(2, 3);
  const BlockParams a = BlockParams::random(c, 5);
  const BlockParams b = BlockParams::random(c, 5);
  const BlockParams d = BlockParams::random(c, 6);
  EXPECT_TRUE(bit_equal(a.at("opm.a.w"), b.at("opm.a.w")));
  EXPECT_FALSE(bit_equal(a.at("opm.a.w"), d.at("opm.a.w")));
}

}  // namespace
}  // namespace axial
