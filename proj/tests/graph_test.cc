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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "axial/errors.h"
#include "axial/evoformer.h"
#include "axial/execution.h"
#include "axial/fusion.h"
#include "axial/graph.h"
#include "axial/trace.h"
#include "fixtures.h"
#include "graph_gen.h"
#include "test_util.h"

namespace axial {
namespace {

using testing::block_inputs;
using testing::clones;
using testing::outer_rowsum;
using testing::random_graph;
using testing::small_config;
using testing::random_tensor;

// Values of every node, nothing freed.
std::vector<Tensor> eval_all(const Graph& g, const std::vector<Tensor>& inputs) {
  std::vector<Tensor> v(g.size());
  for (std::size_t k = 0; k < inputs.size(); ++k) v[g.inputs()[k]] = inputs[k];
  for (const Node& n : g.nodes()) {
    if (n.op == OpKind::kParam) v[n.id] = n.value;
    if (n.op == OpKind::kInput || n.op == OpKind::kParam) continue;
    std::vector<Tensor> ins;
    for (int p : n.inputs) ins.push_back(v[p]);
    v[n.id] = eval_node(n, ins);
  }
  return v;
}

TEST(Estimator, ChainPeakIs2048) {
  Graph g;
  const int x = g.add_input("x", {128});
  const int y = g.add_op(OpKind::kRelu, {x});
  const int z = g.add_op(OpKind::kScale, {y}, {{"factor", 2.0}});
  g.set_outputs({z});
  const MemoryProfile p = estimate_memory(g, nullptr, 8);
  EXPECT_EQ(p.peak_bytes, 2048);
  std::mt19937_64 rng(1);
  EXPECT_EQ(execute(g, {random_tensor({128}, rng)}).peak_bytes, 2048);
}

TEST(Estimator, InputsOnlyPeakIsTheirSum) {
  Graph g;
  const int a = g.add_input("a", {3, 5});
  const int b = g.add_input("b", {7});
  g.set_outputs({a, b});
  EXPECT_EQ(estimate_memory(g, nullptr, 8).peak_bytes, (15 + 7) * 8);
  EXPECT_EQ(execute(g, {Tensor::zeros({3, 5}), Tensor::zeros({7})}).peak_bytes, (15 + 7) * 8);
}

TEST(Estimator, OuterRowsumPeakIs133120) {
  const Graph g = outer_rowsum();
  const MemoryProfile p = estimate_memory(g, nullptr, 8);
  EXPECT_EQ(p.peak_bytes, 133120);
  EXPECT_EQ(p.peak_node, 2);
  std::mt19937_64 rng(2);
  const ExecResult r = execute(g, {random_tensor({128}, rng), random_tensor({128}, rng)});
  EXPECT_EQ(r.peak_bytes, 133120);
}

TEST(Estimator, ReportingElementSizeScales) {
  const Graph g = outer_rowsum();
  EXPECT_EQ(estimate_memory(g, nullptr, 2).peak_bytes * 4, estimate_memory(g, nullptr, 8).peak_bytes);
  EXPECT_THROW(estimate_memory(g, nullptr, 0), DomainError);
}

TEST(Estimator, MatchesMeasuredPeakOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto rg = random_graph(seed);
    rg.graph.validate();
    const std::int64_t want = estimate_memory(rg.graph, nullptr, 8).peak_bytes;
    const ExecResult r = execute(rg.graph, clones(rg.inputs));
    EXPECT_EQ(r.peak_bytes, want) << "seed " << seed;
    const auto ref = eval_all(rg.graph, rg.inputs);
    for (std::size_t k = 0; k < r.outputs.size(); ++k) {
      EXPECT_TRUE(bit_equal(r.outputs[k], ref[rg.graph.outputs()[k]])) << "seed " << seed;
    }
  }
}

TEST(Estimator, HandWrittenChunkPlanMatchesMeasurement) {
  const Graph g = outer_rowsum();
  ChunkPlan plan;
  plan.regions.push_back({make_region(g, 2, 3, {{2, 0}, {3, 0}}), 8});
  EXPECT_EQ(plan.regions[0].region.chunk_inputs, std::vector<int>{0});
  EXPECT_EQ(plan.regions[0].region.nonchunk_inputs, std::vector<int>{1});
  EXPECT_EQ(plan.regions[0].region.outputs, std::vector<int>{3});
  EXPECT_EQ(plan.regions[0].iterations(), 16);
  EXPECT_EQ(estimate_memory(g, &plan, 8).peak_bytes, 11264);
  std::mt19937_64 rng(3);
  const std::vector<Tensor> in = {random_tensor({128}, rng), random_tensor({128}, rng)};
  const ExecResult full = execute(g, clones(in));
  const ExecResult chunked = execute(g, clones(in), &plan);
  EXPECT_EQ(chunked.peak_bytes, 11264);
  EXPECT_LE(max_abs_diff(full.outputs[0], chunked.outputs[0]), 1e-12);
}

TEST(Estimator, RejectsIllegalPlans) {
  const Graph g = outer_rowsum();
  EXPECT_THROW(make_region(g, 2, 3, {{2, 1}, {3, 0}}), PlanError);  // reduced dim
  EXPECT_THROW(make_region(g, 0, 3, {{2, 0}, {3, 0}}), PlanError);  // covers inputs
  try {
    make_region(g, 2, 3, {{2, 1}, {3, 0}});
  } catch (const PlanError& e) {
    EXPECT_NE(std::string(e.what()).find("node 3"), std::string::npos) << e.what();
  }
  ChunkPlan plan;
  plan.regions.push_back({make_region(g, 2, 3, {{2, 0}, {3, 0}}), 200});
  EXPECT_THROW(estimate_memory(g, &plan), PlanError);
}

TEST(Footprint, SingleNodeAndFullThreshold) {
  Graph g;
  const int x = g.add_input("x", {4});
  g.set_outputs({x});
  const MemoryProfile p = estimate_memory(g);
  EXPECT_EQ(footprint_stats(p, 0.2), 0.0);
  const MemoryProfile q = estimate_memory(outer_rowsum());
  EXPECT_EQ(footprint_stats(q, 1.0 + 1e-9), 1.0);
  // Only the two inputs sit below 20% of the outer-product peak.
  EXPECT_EQ(footprint_stats(q, 0.2), 0.5);
}

TEST(DimFlow, SlicingFreeDimsReproducesOutputSlices) {
  std::set<OpKind> covered;
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    auto rg = random_graph(seed, 30);
    const Graph& g = rg.graph;
    const auto v = eval_all(g, rg.inputs);
    for (const Node& n : g.nodes()) {
      if (n.op == OpKind::kInput || n.op == OpKind::kParam) continue;
      for (int d = 0; d < static_cast<int>(n.shape.size()); ++d) {
        if (n.flow.is_compute(d) || n.shape[d] < 2) continue;
        const std::int64_t off = 1, len = n.shape[d] - 1;
        std::vector<Tensor> ins;
        for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) {
          const int e = n.flow.source_dim(d, k);
          const Tensor& t = v[n.inputs[k]];
          ins.push_back(e >= 0 ? t.slice(e, off, len) : t);
        }
        const Tensor got = eval_node(n, ins);
        EXPECT_LE(max_abs_diff(got, v[n.id].slice(d, off, len)), 1e-12)
            << op_name(n.op) << " dim " << d << " seed " << seed;
        covered.insert(n.op);
      }
    }
  }
  for (OpKind k : {OpKind::kLinear, OpKind::kMatmul, OpKind::kContract, OpKind::kOuter,
                   OpKind::kLayernorm, OpKind::kSoftmax, OpKind::kFusedSoftmax, OpKind::kSigmoid,
                   OpKind::kRelu, OpKind::kScale, OpKind::kAdd, OpKind::kMul, OpKind::kMean,
                   OpKind::kSum, OpKind::kPermute, OpKind::kReshape, OpKind::kConcat,
                   OpKind::kSlice, OpKind::kFusedElementwise}) {
    EXPECT_TRUE(covered.count(k)) << op_name(k) << " never exercised";
  }
}

TEST(DimFlow, SoftmaxAxisIsCompute) {
  Graph g;
  const int x = g.add_input("x", {4, 5});
  const int s = g.add_op(OpKind::kSoftmax, {x}, {{"axis", 1}});
  EXPECT_FALSE(g.node(s).flow.is_compute(0));
  EXPECT_TRUE(g.node(s).flow.is_compute(1));
  EXPECT_EQ(g.node(s).flow.in_compute[0], std::vector<int>{1});
}

TEST(EvalNode, AllocatesOnlyTheOutput) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    auto rg = random_graph(seed);
    const auto v = eval_all(rg.graph, rg.inputs);
    for (const Node& n : rg.graph.nodes()) {
      if (n.op == OpKind::kInput || n.op == OpKind::kParam) continue;
      std::vector<Tensor> ins;
      for (int p : n.inputs) ins.push_back(v[p]);
      set_alloc_recording(true);
      take_alloc_events();
      Tensor y = eval_node(n, ins);
      Tensor dst = Tensor::zeros(n.shape);
      const auto events = take_alloc_events();
      take_alloc_events();
      eval_node(n, ins, &dst);
      const auto into = take_alloc_events();
      set_alloc_recording(false);
      ASSERT_EQ(events.size(), 2u) << op_name(n.op);
      EXPECT_EQ(events[0].delta_bytes, y.bytes()) << op_name(n.op);
      EXPECT_TRUE(into.empty()) << op_name(n.op);
    }
  }
}

TEST(Trace, ExecutionMatchesBlock) {
  const EvoConfig c = small_config(4, 6);
  const BlockParams p = BlockParams::random(c, 23);
  const Graph g = trace_evoformer(c, p);
  g.validate();
  EXPECT_GT(g.size(), 9);
  EXPECT_EQ(g.inputs().size(), 2u);
  EXPECT_EQ(g.outputs().size(), 2u);
  EXPECT_EQ(g.node(g.inputs()[0]).name, "m");
  EXPECT_EQ(g.node(g.inputs()[1]).name, "z");
  const auto in = block_inputs(c, 23);
  const BlockOutput want = evoformer_block(in[0], in[1], p);
  const ExecResult r = execute(g, clones(in));
  EXPECT_LE(max_abs_diff(r.outputs[0], want.m), 1e-12);
  EXPECT_LE(max_abs_diff(r.outputs[1], want.z), 1e-12);
  EXPECT_EQ(r.peak_bytes, estimate_memory(g, nullptr, 8).peak_bytes);
}

TEST(Trace, EveryParameterBecomesOneNode) {
  const EvoConfig c = small_config(2, 3);
  const BlockParams p = BlockParams::random(c, 1);
  const Graph g = trace_evoformer(c, p);
  std::set<std::string> names;
  for (const Node& n : g.nodes()) {
    if (n.op == OpKind::kParam) {
      EXPECT_TRUE(names.insert(n.name).second) << n.name;
    }
  }
  EXPECT_EQ(names.size(), p.all().size());
}

TEST(GraphIo, RoundTripIsStructurallyIdentical) {
  const EvoConfig c = small_config(2, 3);
  const Graph g = trace_evoformer(c, BlockParams::random(c, 4));
  const Graph h = Graph::parse(g.to_json().dump());
  ASSERT_EQ(h.size(), g.size());
  for (int i = 0; i < g.size(); ++i) {
    const Node& a = g.node(i);
    const Node& b = h.node(i);
    EXPECT_EQ(a.op, b.op);
    EXPECT_EQ(a.inputs, b.inputs);
    EXPECT_EQ(a.attrs, b.attrs);
    EXPECT_EQ(a.shape, b.shape);
    EXPECT_TRUE(a.flow == b.flow);
    if (a.op == OpKind::kParam) {
      EXPECT_TRUE(bit_equal(a.value, b.value));
    }
  }
  EXPECT_EQ(h.inputs(), g.inputs());
  EXPECT_EQ(h.outputs(), g.outputs());
  EXPECT_EQ(h.digest(), g.digest());
  EXPECT_EQ(h.to_json().dump(), g.to_json().dump());
}

TEST(GraphIo, MalformedJsonReportsLocation) {
  try {
    Graph::parse("{\n  \"nodes\": [\n    {\"id\": 0,,}\n  ]\n}");
    FAIL() << "expected a parse error";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(GraphIo, ForwardReferenceIsRejected) {
  Graph g = outer_rowsum();
  nlohmann::json j = g.to_json();
  j["nodes"][2]["inputs"] = {0, 3};
  try {
    Graph::from_json(j);
    FAIL() << "expected a validation error";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("not an earlier node"), std::string::npos) << e.what();
  }
}

TEST(GraphIo, InconsistentShapeIsRejected) {
  nlohmann::json j = outer_rowsum().to_json();
  j["nodes"][2]["shape"] = {128, 127};
  EXPECT_THROW(Graph::from_json(j), GraphError);
}

int count_op(const Graph& g, OpKind op) {
  int n = 0;
  for (const Node& x : g.nodes()) n += x.op == op;
  return n;
}

TEST(MergeGemm, QkvBecomeOneLinearAndThreeSlices) {
  Graph g;
  // The [64, 64] score matrix dominates, so the merged buffer fits under it.
  const int x = g.add_input("x", {64, 4});
  std::mt19937_64 rng(5);
  std::vector<int> outs;
  for (int k = 0; k < 3; ++k) {
    const int w = g.add_param("w" + std::to_string(k), random_tensor({4, 4}, rng));
    const int b = g.add_param("b" + std::to_string(k), random_tensor({4}, rng));
    outs.push_back(g.add_op(OpKind::kLinear, {x, w, b}));
  }
  const int qk = g.add_op(OpKind::kContract, {outs[0], outs[1]}, {{"spec", "ic,jc->ij"}});
  const int o = g.add_op(OpKind::kMatmul, {qk, outs[2]});
  g.set_outputs({o});
  const Graph f = fuse_merge_gemm(g);
  f.validate();
  EXPECT_EQ(count_op(f, OpKind::kLinear), 1);
  EXPECT_EQ(count_op(f, OpKind::kSlice), 3);
  EXPECT_LE(f.size(), g.size());
  EXPECT_LE(estimate_memory(f).peak_bytes, estimate_memory(g).peak_bytes);
  const auto in = std::vector<Tensor>{random_tensor({64, 4}, rng)};
  EXPECT_LE(max_abs_diff(execute(g, clones(in)).outputs[0], execute(f, clones(in)).outputs[0]), 1e-12);
}

TEST(MergeGemm, NoSharedInputsLeavesGraphUnchanged) {
  const Graph g = outer_rowsum();
  const Graph f = fuse_merge_gemm(g);
  EXPECT_EQ(f.to_json().dump(), g.to_json().dump());
}

TEST(MergeGemm, TracedBlockSeed29) {
  const EvoConfig c = small_config(4, 8);
  const Graph g = trace_evoformer(c, BlockParams::random(c, 29));
  const Graph f = fuse_merge_gemm(g);
  f.validate();
  EXPECT_LT(count_op(f, OpKind::kLinear), count_op(g, OpKind::kLinear));
  EXPECT_LE(f.size(), g.size());
  EXPECT_LE(estimate_memory(f).peak_bytes, estimate_memory(g).peak_bytes);
  const auto in = block_inputs(c, 29);
  const ExecResult a = execute(g, clones(in));
  const ExecResult b = execute(f, clones(in));
  EXPECT_LE(max_abs_diff(a.outputs[0], b.outputs[0]), 1e-12);
  EXPECT_LE(max_abs_diff(a.outputs[1], b.outputs[1]), 1e-12);
  EXPECT_EQ(b.peak_bytes, estimate_memory(f, nullptr, 8).peak_bytes);
}

TEST(FuseElementwise, AddSigmoidMulCollapses) {
  Graph g;
  const int a = g.add_input("a", {4, 5});
  const int b = g.add_input("b", {4, 5});
  const int s = g.add_op(OpKind::kAdd, {a, b});
  const int t = g.add_op(OpKind::kSigmoid, {s});
  const int u = g.add_op(OpKind::kMul, {t, a});
  g.set_outputs({u});
  const Graph f = fuse_elementwise(g);
  EXPECT_EQ(f.size(), 3);
  EXPECT_EQ(f.node(2).op, OpKind::kFusedElementwise);
  std::mt19937_64 rng(6);
  const std::vector<Tensor> in = {random_tensor({4, 5}, rng), random_tensor({4, 5}, rng)};
  EXPECT_LE(max_abs_diff(execute(g, clones(in)).outputs[0], execute(f, clones(in)).outputs[0]), 1e-12);
  EXPECT_LE(estimate_memory(f).peak_bytes, estimate_memory(g).peak_bytes);
}

TEST(FuseElementwise, MatmulIsABarrier) {
  Graph g;
  const int a = g.add_input("a", {4, 4});
  const int s = g.add_op(OpKind::kSigmoid, {a});
  const int m = g.add_op(OpKind::kMatmul, {s, s});
  const int r = g.add_op(OpKind::kRelu, {m});
  g.set_outputs({r});
  const Graph f = fuse_elementwise(g);
  EXPECT_EQ(count_op(f, OpKind::kFusedElementwise), 0);
  EXPECT_EQ(count_op(f, OpKind::kMatmul), 1);
}

TEST(FuseElementwise, TracedBlockKeepsOutputsAndPeak) {
  const EvoConfig c = small_config(4, 8);
  const Graph g = trace_evoformer(c, BlockParams::random(c, 29));
  const Graph f = fuse_elementwise(fuse_merge_gemm(g));
  f.validate();
  EXPECT_EQ(count_op(f, OpKind::kFusedSoftmax), 4);
  EXPECT_EQ(count_op(f, OpKind::kSoftmax), 0);
  EXPECT_GT(count_op(f, OpKind::kFusedElementwise), 0);
  EXPECT_LE(estimate_memory(f).peak_bytes, estimate_memory(g).peak_bytes);
  const auto in = block_inputs(c, 29);
  const ExecResult a = execute(g, clones(in));
  const ExecResult b = execute(f, clones(in));
  EXPECT_LE(max_abs_diff(a.outputs[0], b.outputs[0]), 1e-12);
  EXPECT_LE(max_abs_diff(a.outputs[1], b.outputs[1]), 1e-12);
  EXPECT_EQ(b.peak_bytes, estimate_memory(f, nullptr, 8).peak_bytes);
}

TEST(Executor, RejectsWrongInputs) {
  const Graph g = outer_rowsum();
  EXPECT_THROW(execute(g, {Tensor::zeros({128})}), GraphError);
  EXPECT_THROW(execute(g, {Tensor::zeros({128}), Tensor::zeros({127})}), DimensionError);
}

TEST(Executor, SharedInputsAreCopiedNotFreed) {
  const Graph g = outer_rowsum();
  std::mt19937_64 rng(8);
  const Tensor x1 = random_tensor({128}, rng);
  const Tensor x2 = random_tensor({128}, rng);
  const ExecResult r = execute(g, {x1, x2});
  EXPECT_EQ(r.peak_bytes, 133120);
  EXPECT_EQ(x1.numel(), 128);
}

}  // namespace
}  // namespace axial
