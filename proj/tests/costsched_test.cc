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


#include "axial/costsched.h"

#include <random>

#include <gtest/gtest.h>

#include "axial/dap.h"
#include "axial/errors.h"
#include "fixtures.h"
#include "timeline_gen.h"

namespace axial {
namespace {

using testing::random_timeline;
using testing::uniform;
using testing::worked_example;

CommModel model(double k, int n, int heads = 4) {
  CommModel m;
  m.k = k;
  m.n_devices = n;
  m.n_heads = heads;
  return m;
}

TEST(TpVolume, ClosedForm) {
  EXPECT_EQ(tp_volume(model(1, 4)), 18.0);
  EXPECT_EQ(tp_volume(model(1, 1)), 0.0);
  EXPECT_EQ(tp_volume(model(1, 2)), 12.0);
}

TEST(TpVolume, HeadCountCapsTheMesh) {
  try {
    tp_volume(model(1, 8, 4));
    FAIL() << "expected a scaling error";
  } catch (const TpScalingError& e) {
    EXPECT_EQ(e.head_cap(), 4);
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
  EXPECT_THROW(tp_volume(model(0, 2)), DomainError);
}

TEST(DapVolume, ClosedFormBreakdown) {
  const DapBreakdown b = dap_breakdown(model(1, 4));
  EXPECT_EQ(b.outer_product_mean, 0.75);
  EXPECT_EQ(b.triangle_update, 1.5);
  EXPECT_EQ(b.transpose, 2.25);
  EXPECT_EQ(b.attention_ff, 0.0);
  EXPECT_EQ(dap_volume(model(1, 4)), 4.5);
  EXPECT_EQ(dap_volume(model(1, 1)), 0.0);
  EXPECT_EQ(dap_volume(model(1, 2)), 4.5);
}

TEST(DapVolume, PerRowOverrides) {
  CommModel m = model(1, 4);
  m.k_opm = 4.0;
  EXPECT_EQ(dap_breakdown(m).outer_product_mean, 3.0);
  EXPECT_EQ(dap_breakdown(m).triangle_update, 1.5);
}

TEST(Compare, RatiosAndSingleDevice) {
  EXPECT_EQ(*compare(model(1, 4)).ratio, 4.0);
  EXPECT_NEAR(*compare(model(1, 2)).ratio, 12.0 / 4.5, 1e-15);
  const VolumeReport one = compare(model(1, 1));
  EXPECT_FALSE(one.ratio.has_value());
  EXPECT_EQ(one.to_json().at("ratio"), "n/a");
  EXPECT_EQ(compare(model(1, 4)).to_json().at("dap_total"), 4.5);
}

TEST(Compare, DapBelowTpAndBothGrowWithK) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 63);
    const double k = uniform(rng, 1e-3, 1e9);
    const CommModel m = model(k, n, n);
    EXPECT_LT(dap_volume(m), tp_volume(m)) << k << " " << n;
    const CommModel bigger = model(2 * k, n, n);
    EXPECT_GT(dap_volume(bigger), dap_volume(m));
    EXPECT_GT(tp_volume(bigger), tp_volume(m));
  }
}

TEST(ForwardVolume, SixTransposesAndThreeGathers) {
  const ForwardVolume f = dap_forward_volume(model(1, 4));
  EXPECT_EQ(f.all_to_all, 6.0 * 3.0 / 16.0);
  EXPECT_EQ(f.all_gather, 3.0 * 0.75);
}

TEST(ForwardVolume, MatchesSimulatorLedger) {
  const EvoConfig c = testing::small_config(8, 16);
  const BlockParams p = BlockParams::random(c, 31);
  const auto in = testing::block_inputs(c, 31);
  for (int n : {1, 2, 4, 8}) {
    const DeviceMesh mesh(n);
    const DapOutput out = dap_evoformer_block(shard(in[0], 0, mesh), shard(in[1], 0, mesh), p, mesh);
    const ForwardVolume want = dap_forward_prediction(c, n, kReportElementSize);
    for (int d = 0; d < n; ++d) {
      EXPECT_EQ(static_cast<double>(out.ledger.at(d, Collective::kAllToAll).bytes), want.all_to_all) << n;
      EXPECT_EQ(static_cast<double>(out.ledger.at(d, Collective::kAllGather).bytes), want.all_gather) << n;
    }
  }
}

TEST(ActivationMemory, ExceedsTwentyGigabytesAtFortyEightLayers) {
  EXPECT_EQ(activation_memory(384, 4, 48, 2), 21743271936);
  EXPECT_GT(activation_memory(384, 4, 48, 2), 20LL * 1000 * 1000 * 1000);
  EXPECT_EQ(activation_memory(1, 1, 1, 2), 2);
  EXPECT_EQ(activation_memory(384, 4, 48, 8), 4 * activation_memory(384, 4, 48, 2));
  EXPECT_THROW(activation_memory(0, 4, 48, 2), DomainError);
  EXPECT_THROW(activation_memory(1 << 22, 1 << 20, 1 << 10, 8), DomainError);
}

TEST(Schedule, WorkedExample) {
  EXPECT_EQ(simulate_schedule(worked_example(), ScheduleMode::kSync).makespan, 19.0);
  const Schedule a = simulate_schedule(worked_example(), ScheduleMode::kAsync);
  EXPECT_EQ(a.makespan, 15.0);
  ASSERT_EQ(a.events.size(), 3u);
  EXPECT_EQ(a.events[1].id, "C");
  EXPECT_EQ(a.events[1].start, 0.0);
  EXPECT_EQ(a.events[2].start, 10.0);
}

TEST(Schedule, NoOverlapAvailable) {
  std::vector<TimelineEvent> chain = {{"a", Stream::kCompute, 3, {}},
                                      {"c", Stream::kComm, 2, {"a"}},
                                      {"b", Stream::kCompute, 4, {"c"}}};
  EXPECT_EQ(simulate_schedule(chain, ScheduleMode::kSync).makespan,
            simulate_schedule(chain, ScheduleMode::kAsync).makespan);
  auto zero = worked_example();
  zero[1].duration = 0.0;
  EXPECT_EQ(simulate_schedule(zero, ScheduleMode::kSync).makespan,
            simulate_schedule(zero, ScheduleMode::kAsync).makespan);
}

TEST(Schedule, AsyncNeverSlowerOnRandomDags) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto evs = random_timeline(seed);
    const double sync = simulate_schedule(evs, ScheduleMode::kSync).makespan;
    const double async = simulate_schedule(evs, ScheduleMode::kAsync).makespan;
    EXPECT_LE(async, sync) << seed;
    for (auto& e : evs) e.stream = Stream::kCompute;
    EXPECT_EQ(simulate_schedule(evs, ScheduleMode::kAsync).makespan, sync) << seed;
  }
}

TEST(Schedule, RejectsBadTimelines) {
  std::vector<TimelineEvent> cyc = {{"a", Stream::kCompute, 1, {"b"}}, {"b", Stream::kComm, 1, {"a"}}};
  EXPECT_THROW(simulate_schedule(cyc, ScheduleMode::kSync), ScheduleError);
  std::vector<TimelineEvent> dangling = {{"a", Stream::kCompute, 1, {"x"}}};
  EXPECT_THROW(simulate_schedule(dangling, ScheduleMode::kAsync), ScheduleError);
  std::vector<TimelineEvent> dup = {{"a", Stream::kCompute, 1, {}}, {"a", Stream::kComm, 1, {}}};
  EXPECT_THROW(simulate_schedule(dup, ScheduleMode::kAsync), ScheduleError);
  std::vector<TimelineEvent> neg = {{"a", Stream::kCompute, -1, {}}};
  EXPECT_THROW(simulate_schedule(neg, ScheduleMode::kAsync), ScheduleError);
}

TEST(Schedule, TimelineJsonRoundTrip) {
  const auto evs = worked_example();
  const auto back = timeline_from_json(timeline_to_json(evs));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].deps, (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(back[1].stream, Stream::kComm);
  const auto j = simulate_schedule(back, ScheduleMode::kAsync).to_json();
  EXPECT_EQ(j.at("makespan"), 15.0);
  EXPECT_EQ(j.at("events")[2].at("end"), 15.0);
  EXPECT_THROW(timeline_from_json(nlohmann::json{{"schema", "x"}}), ScheduleError);
  EXPECT_THROW(timeline_from_json(nlohmann::json::parse(R"({"schema":"axialfold.timeline/1","events":[{"id":"a"}]})")),
               ScheduleError);
}

}  // namespace
}  // namespace axial
