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


#include "axial/autochunk.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "axial/errors.h"

namespace axial {
namespace {

using nlohmann::json;

const PlannedRegion* region_of(const ChunkPlan& plan, int id) {
  for (const auto& pr : plan.regions) {
    if (pr.region.contains(id)) return &pr;
  }
  return nullptr;
}

ChunkPlan with_region(const ChunkPlan& plan, const PlannedRegion& extra) {
  ChunkPlan out;
  out.regions = plan.regions;
  auto at = std::lower_bound(out.regions.begin(), out.regions.end(), extra,
                             [](const PlannedRegion& a, const PlannedRegion& b) {
                               return a.region.start < b.region.start;
                             });
  out.regions.insert(at, extra);
  return out;
}

// Peak over all counted nodes and how many nodes reach it.
std::pair<std::int64_t, int> peak_and_count(const MemoryProfile& prof) {
  int count = 0;
  for (std::size_t i = 0; i < prof.footprints.size(); ++i) {
    if (prof.counted[i] && prof.footprints[i] == prof.peak_bytes) ++count;
  }
  return {prof.peak_bytes, count};
}

std::int64_t span_peak(const MemoryProfile& prof, const ChunkSpan& span) {
  std::int64_t best = 0;
  for (int id = span.start; id <= span.end; ++id) {
    if (prof.counted[id]) best = std::max(best, prof.footprints[id]);
  }
  return best;
}

bool has_free_dim(const Node& n, std::int64_t extent) {
  for (int d = 0; d < static_cast<int>(n.shape.size()); ++d) {
    if (n.flow.is_compute(d) || n.shape[d] < 2) continue;
    if (extent < 0 || n.shape[d] == extent) return true;
  }
  return false;
}

// Upward dimension trace over one sub-span. Nodes are visited from the end
// backwards, so every in-span consumer of a node is settled before the node
// itself; each node then either inherits the dim its consumers ask for, is
// hoisted (a permute of an outside value that some consumer reads whole),
// or, for a region output, branches over its free dims.
class SpanTracer {
 public:
  SpanTracer(const Graph& g, int start, int end) : g_(g), start_(start), end_(end) {}

  std::vector<std::pair<std::map<int, int>, std::vector<int>>> run() {
    State st;
    const int len = end_ - start_ + 1;
    st.dim.assign(len, -1);
    st.want.assign(len, -1);
    st.conflict.assign(len, false);
    st.whole.assign(len, false);
    search(end_, std::move(st));
    return std::move(found_);
  }

 private:
  static constexpr int kMaxSolutions = 8;

  struct State {
    std::vector<int> dim, want;
    std::vector<bool> conflict, whole;
    std::vector<int> hoisted;
    std::int64_t extent = -1;
  };

  bool internal(int p, int below) const {
    return p >= start_ && p < below && g_.node(p).op != OpKind::kParam;
  }

  bool hoistable(int id) const {
    const Node& n = g_.node(id);
    if (n.op != OpKind::kPermute) return false;
    const int src = n.inputs[0];
    return src < start_ || g_.node(src).op == OpKind::kParam;
  }

  bool assign(State& st, int id, int d) const {
    const Node& n = g_.node(id);
    if (d < 0 || d >= static_cast<int>(n.shape.size()) || n.flow.is_compute(d) || n.shape[d] < 2) {
      return false;
    }
    if (st.extent >= 0 && n.shape[d] != st.extent) return false;
    st.extent = n.shape[d];
    st.dim[id - start_] = d;
    for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) {
      const int p = n.inputs[k];
      if (!internal(p, id)) continue;
      const int e = n.flow.source_dim(d, k);
      const int slot = p - start_;
      if (e < 0) {
        st.whole[slot] = true;
      } else if (st.want[slot] < 0) {
        st.want[slot] = e;
      } else if (st.want[slot] != e) {
        st.conflict[slot] = true;
      }
    }
    return true;
  }

  void search(int id, State st) {
    for (; id >= start_; --id) {
      if (static_cast<int>(found_.size()) >= kMaxSolutions) return;
      const Node& n = g_.node(id);
      if (n.op == OpKind::kParam) continue;
      if (n.op == OpKind::kInput) return;
      const int slot = id - start_;
      if (st.whole[slot]) {
        if (!hoistable(id)) return;
        st.hoisted.push_back(id);
        continue;
      }
      if (st.conflict[slot]) return;
      if (st.want[slot] >= 0) {
        if (!assign(st, id, st.want[slot])) return;
        continue;
      }
      std::vector<int> options;
      for (int d = 0; d < static_cast<int>(n.shape.size()); ++d) {
        if (!n.flow.is_compute(d) && n.shape[d] >= 2 && (st.extent < 0 || n.shape[d] == st.extent)) {
          options.push_back(d);
        }
      }
      if (options.empty()) return;
      for (std::size_t k = 0; k + 1 < options.size(); ++k) {
        State branch = st;
        if (assign(branch, id, options[k])) search(id - 1, std::move(branch));
      }
      if (!assign(st, id, options.back())) return;
    }
    std::map<int, int> dims;
    for (int id2 = start_; id2 <= end_; ++id2) {
      if (st.dim[id2 - start_] >= 0) dims[id2] = st.dim[id2 - start_];
    }
    std::vector<int> hoisted = st.hoisted;
    std::sort(hoisted.begin(), hoisted.end());
    found_.emplace_back(std::move(dims), std::move(hoisted));
  }

  const Graph& g_;
  int start_, end_;
  std::vector<std::pair<std::map<int, int>, std::vector<int>>> found_;
};

// Span peak of a candidate as a function of the slice length. Every
// footprint in the span is exactly affine in it (chunk buffers scale with
// the slice, everything else is fixed), so two estimates pin it down.
struct AffinePeak {
  std::vector<std::int64_t> base, slope;
  std::int64_t at(std::int64_t len) const {
    std::int64_t best = 0;
    for (std::size_t i = 0; i < base.size(); ++i) best = std::max(best, base[i] + slope[i] * len);
    return best;
  }
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ChunkSpan find_max_chunk(const Graph& g, const ChunkPlan& plan, const MemoryProfile& profile,
                         int window) {
  ChunkSpan span;
  const int n = g.size();
  if (static_cast<int>(profile.footprints.size()) != n) {
    throw PlanError("memory profile does not match the graph");
  }
  int driver = -1;
  for (int id = 0; id < n; ++id) {
    if (!profile.counted[id] || region_of(plan, id) != nullptr) continue;
    if (driver < 0 || profile.footprints[id] > profile.footprints[driver]) driver = id;
  }
  if (driver < 0 || g.node(driver).op == OpKind::kInput) return span;

  const auto cons = g.consumers();
  auto held = [&](int p) { return cons[p].empty() ? p : cons[p].back(); };
  int lo = driver, hi = driver;
  for (int p = 0; p <= driver; ++p) {
    const OpKind op = g.node(p).op;
    if (op == OpKind::kInput || op == OpKind::kParam) continue;
    if (held(p) < driver && p != driver) continue;
    lo = std::min(lo, p);
    hi = std::max(hi, held(p));
  }
  auto blocked = [&](int id) {
    return g.node(id).op == OpKind::kInput || region_of(plan, id) != nullptr;
  };
  int start = driver, budget = window;
  while (start - 1 >= lo && !blocked(start - 1)) {
    if (g.node(start - 1).op != OpKind::kParam) {
      if (budget == 0) break;
      --budget;
    }
    --start;
  }
  int end = driver;
  budget = window;
  while (end + 1 <= hi && !blocked(end + 1)) {
    if (g.node(end + 1).op != OpKind::kParam) {
      if (budget == 0) break;
      --budget;
    }
    ++end;
  }
  while (g.node(start).op == OpKind::kParam) ++start;
  while (g.node(end).op == OpKind::kParam) --end;
  span.start = start;
  span.end = end;
  span.driver = driver;
  return span;
}

std::vector<ChunkRegion> find_possible_chunks(const Graph& g, const ChunkPlan& plan,
                                              const ChunkSpan& span) {
  std::vector<ChunkRegion> out;
  if (span.empty()) return out;
  for (int id = span.start; id <= span.end; ++id) {
    if (region_of(plan, id) != nullptr) throw PlanError("search span overlaps an existing region");
  }
  for (int e = span.driver; e <= span.end; ++e) {
    const Node& last = g.node(e);
    if (last.op == OpKind::kParam || !has_free_dim(last, -1)) continue;
    for (int s = span.driver; s >= span.start; --s) {
      const Node& first = g.node(s);
      if (first.op == OpKind::kParam || first.op == OpKind::kInput) continue;
      // Stage one: both ends need a free dim of a common extent.
      bool shared = false;
      for (int d = 0; d < static_cast<int>(first.shape.size()) && !shared; ++d) {
        if (!first.flow.is_compute(d) && first.shape[d] >= 2) shared = has_free_dim(last, first.shape[d]);
      }
      if (!shared && first.op != OpKind::kPermute) continue;
      // Stage two: trace dims upward from the region outputs.
      for (auto& [dims, hoisted] : SpanTracer(g, s, e).run()) {
        ChunkRegion r;
        if (check_region(g, s, e, dims, hoisted, &r).empty()) out.push_back(std::move(r));
      }
    }
  }
  return out;
}

std::optional<ChunkChoice> find_best_chunk(const Graph& g, const ChunkPlan& plan,
                                           std::int64_t budget_bytes,
                                           const std::vector<ChunkRegion>& candidates,
                                           const ChunkSpan& span, int element_size, json* log) {
  if (candidates.empty() || span.empty()) return std::nullopt;
  const MemoryProfile base = estimate_memory(g, &plan, element_size);
  const auto [cur_peak, cur_count] = peak_and_count(base);
  const std::int64_t cur_span = span_peak(base, span);

  std::optional<ChunkChoice> best;
  std::tuple<int, std::int64_t, std::int64_t, std::int64_t, int> best_key{};
  std::vector<std::pair<decltype(best_key), json>> entries;
  for (const ChunkRegion& cand : candidates) {
    const std::int64_t extent = cand.extent;
    auto profile_at = [&](std::int64_t size) {
      const ChunkPlan trial = with_region(plan, {cand, size});
      return estimate_memory(g, &trial, element_size);
    };
    const MemoryProfile one = profile_at(1), two = profile_at(2);
    AffinePeak model;
    for (int id = span.start; id <= span.end; ++id) {
      if (!one.counted[id]) continue;
      model.slope.push_back(two.footprints[id] - one.footprints[id]);
      model.base.push_back(one.footprints[id] - model.slope.back());
    }
    const std::int64_t floor_peak = model.at(1);
    const std::int64_t target = floor_peak <= budget_bytes ? budget_bytes : floor_peak;
    // Halve from the full extent until the target is met, then walk down
    // from just below the previous (too large) size.
    std::int64_t size = extent, prev = -1;
    while (model.at(size) > target) {
      prev = size;
      size = (size + 1) / 2;
    }
    if (prev > 0) {
      for (std::int64_t s = prev - 1; s > size; --s) {
        if (model.at(s) <= target) {
          size = s;
          break;
        }
      }
    }
    const MemoryProfile chosen = profile_at(size);
    const std::int64_t sp = span_peak(chosen, span);
    if (sp != model.at(size)) throw std::logic_error("span footprint is not affine in the slice length");
    const auto [peak, count] = peak_and_count(chosen);
    const bool progress = peak < cur_peak || (peak == cur_peak && count < cur_count);

    ChunkChoice choice;
    choice.planned = {cand, size};
    choice.peak_bytes = peak;
    choice.span_peak_bytes = sp;
    choice.meets_budget = sp <= budget_bytes;
    const std::int64_t iters = choice.planned.iterations();
    const auto key = choice.meets_budget
                         ? std::make_tuple(0, iters, sp - cur_span, std::int64_t{0}, cand.start)
                         : std::make_tuple(1, sp, iters, std::int64_t{0}, cand.start);
    if (log != nullptr) {
      entries.push_back({key, json{{"start", cand.start},
                                   {"end", cand.end},
                                   {"extent", extent},
                                   {"chunk_size", size},
                                   {"iterations", iters},
                                   {"span_peak_bytes", sp},
                                   {"peak_bytes", peak},
                                   {"accepted", progress}}});
    }
    if (!progress) continue;
    if (!best || key < best_key) {
      best = std::move(choice);
      best_key = key;
    }
  }
  if (log != nullptr) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    constexpr std::size_t kLogged = 8;
    json top = json::array();
    for (std::size_t i = 0; i < entries.size() && i < kLogged; ++i) top.push_back(entries[i].second);
    *log = {{"considered", candidates.size()}, {"best_ranked", top}};
  }
  return best;
}

ChunkPlan autochunk_search(const Graph& g, std::int64_t budget_bytes, const AutoChunkOptions& options) {
  if (budget_bytes <= 0) throw DomainError("memory budget must be positive");
  if (options.window < 1) throw DomainError("search window must be at least 1");
  g.validate();
  ChunkPlan plan;
  json log = json::array();
  for (int step = 0;; ++step) {
    const MemoryProfile prof = estimate_memory(g, &plan, options.element_size);
    if (prof.peak_bytes <= budget_bytes) {
      plan.search_log = std::move(log);
      return plan;
    }
    const ChunkSpan span = find_max_chunk(g, plan, prof, options.window);
    json entry = {{"step", step}, {"peak_bytes", prof.peak_bytes}, {"driver", span.driver}};
    if (span.empty()) {
      log.push_back(std::move(entry));
      break;
    }
    entry["span"] = {span.start, span.end};
    const auto candidates = find_possible_chunks(g, plan, span);
    json cand_log;
    const auto best = find_best_chunk(g, plan, budget_bytes, candidates, span, options.element_size,
                                      &cand_log);
    entry["candidates"] = std::move(cand_log);
    if (!best) {
      log.push_back(std::move(entry));
      break;
    }
    entry["chosen"] = {{"start", best->planned.region.start},
                       {"end", best->planned.region.end},
                       {"chunk_size", best->planned.chunk_size},
                       {"iterations", best->planned.iterations()},
                       {"peak_bytes", best->peak_bytes}};
    log.push_back(std::move(entry));
    plan = with_region(plan, best->planned);
  }
  const std::int64_t reached = estimate_memory(g, &plan, options.element_size).peak_bytes;
  throw InfeasibleBudgetError("no chunk plan fits " + std::to_string(budget_bytes) +
                                  " bytes; lowest peak reached is " + std::to_string(reached) + " bytes",
                              reached);
}

ExecutionPlan plan_codegen(const Graph& g, const ChunkPlan& plan) {
  validate_plan(g, plan);
  ExecutionPlan ep;
  ep.graph_digest = g.digest();
  std::size_t next = 0;
  for (int i = 0; i < g.size();) {
    if (next < plan.regions.size() && plan.regions[next].region.start == i) {
      const PlannedRegion& pr = plan.regions[next++];
      const ChunkRegion& r = pr.region;
      LoopSpec loop;
      loop.start = r.start;
      loop.end = r.end;
      loop.extent = r.extent;
      loop.chunk_size = pr.chunk_size;
      loop.iterations = pr.iterations();
      loop.last_chunk = r.extent - (loop.iterations - 1) * pr.chunk_size;
      loop.hoisted = r.hoisted;
      loop.preallocated = r.outputs;
      for (int id = r.start; id <= r.end; ++id) {
        if (!r.is_internal(g, id)) continue;
        const Node& n = g.node(id);
        const int d = r.chunk_dim.at(id);
        loop.body.emplace_back(id, d);
        for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) {
          const int e = n.flow.source_dim(d, k);
          if (!r.is_internal(g, n.inputs[k]) && e >= 0) loop.slices.push_back({id, k, e});
        }
      }
      for (int o : r.outputs) loop.scatters.emplace_back(o, r.chunk_dim.at(o));
      ScheduleStep step;
      step.loop = std::move(loop);
      ep.schedule.push_back(std::move(step));
      i = r.end + 1;
    } else {
      ScheduleStep step;
      step.node = i++;
      ep.schedule.push_back(std::move(step));
    }
  }
  return ep;
}

json ExecutionPlan::to_json() const {
  json steps = json::array();
  for (const ScheduleStep& s : schedule) {
    if (!s.loop) {
      steps.push_back({{"node", s.node}});
      continue;
    }
    const LoopSpec& l = *s.loop;
    json body = json::array(), slices = json::array(), scatters = json::array();
    for (const auto& [id, d] : l.body) body.push_back({{"node", id}, {"dim", d}});
    for (const SliceSpec& sl : l.slices) {
      slices.push_back({{"node", sl.node}, {"input", sl.input}, {"dim", sl.dim}});
    }
    for (const auto& [id, d] : l.scatters) scatters.push_back({{"node", id}, {"dim", d}});
    steps.push_back({{"loop",
                      {{"start", l.start},
                       {"end", l.end},
                       {"extent", l.extent},
                       {"chunk_size", l.chunk_size},
                       {"iterations", l.iterations},
                       {"last_chunk", l.last_chunk},
                       {"hoisted", l.hoisted},
                       {"preallocated", l.preallocated},
                       {"body", body},
                       {"slice_specs", slices},
                       {"scatter_specs", scatters}}}});
  }
  return {{"schema", "axialfold.execplan/1"}, {"graph_digest", hex(graph_digest)}, {"schedule", steps}};
}

ExecutionPlan ExecutionPlan::from_json(const json& j) {
  try {
    if (j.at("schema") != "axialfold.execplan/1") {
      throw PlanError("unsupported execution plan schema " + j.at("schema").dump());
    }
    ExecutionPlan ep;
    ep.graph_digest = std::stoull(j.at("graph_digest").get<std::string>(), nullptr, 16);
    for (const json& s : j.at("schedule")) {
      ScheduleStep step;
      if (s.contains("node")) {
        step.node = s.at("node").get<int>();
      } else {
        const json& l = s.at("loop");
        LoopSpec loop;
        loop.start = l.at("start");
        loop.end = l.at("end");
        loop.extent = l.at("extent");
        loop.chunk_size = l.at("chunk_size");
        loop.iterations = l.at("iterations");
        loop.last_chunk = l.at("last_chunk");
        loop.hoisted = l.at("hoisted").get<std::vector<int>>();
        loop.preallocated = l.at("preallocated").get<std::vector<int>>();
        for (const json& b : l.at("body")) loop.body.emplace_back(b.at("node"), b.at("dim"));
        for (const json& sl : l.at("slice_specs")) {
          loop.slices.push_back({sl.at("node"), sl.at("input"), sl.at("dim")});
        }
        for (const json& sc : l.at("scatter_specs")) loop.scatters.emplace_back(sc.at("node"), sc.at("dim"));
        step.loop = std::move(loop);
      }
      ep.schedule.push_back(std::move(step));
    }
    return ep;
  } catch (const json::exception& e) {
    throw PlanError(std::string("malformed execution plan: ") + e.what());
  } catch (const std::logic_error& e) {
    throw PlanError(std::string("malformed execution plan: ") + e.what());
  }
}

ChunkPlan ExecutionPlan::to_chunk_plan(const Graph& g) const {
  if (graph_digest != g.digest()) {
    throw PlanError("execution plan was made for graph " + hex(graph_digest) + ", not " + hex(g.digest()));
  }
  ChunkPlan plan;
  int expect = 0;
  for (const ScheduleStep& s : schedule) {
    if (!s.loop) {
      if (s.node != expect) throw PlanError("schedule visits node " + std::to_string(s.node) + " out of order");
      ++expect;
      continue;
    }
    const LoopSpec& l = *s.loop;
    if (l.start != expect) throw PlanError("loop at node " + std::to_string(l.start) + " is out of order");
    std::map<int, int> dims(l.body.begin(), l.body.end());
    PlannedRegion pr{make_region(g, l.start, l.end, dims, l.hoisted), l.chunk_size};
    plan.regions.push_back(pr);
    // The recorded loop must be exactly what the region implies.
    ChunkPlan single;
    single.regions.push_back(pr);
    const ExecutionPlan fresh = plan_codegen(g, single);
    const auto it = std::find_if(fresh.schedule.begin(), fresh.schedule.end(),
                                 [](const ScheduleStep& st) { return st.loop.has_value(); });
    if (!(*it->loop == l)) throw PlanError("loop at node " + std::to_string(l.start) + " disagrees with its region");
    expect = l.end + 1;
  }
  if (expect != g.size()) throw PlanError("schedule does not cover the graph");
  validate_plan(g, plan);
  return plan;
}

ExecResult execute_chunked(const Graph& g, const ChunkPlan& plan, std::vector<Tensor> inputs) {
  return execute(g, std::move(inputs), &plan);
}

ExecResult execute_chunked(const Graph& g, const ExecutionPlan& plan, std::vector<Tensor> inputs) {
  const ChunkPlan chunks = plan.to_chunk_plan(g);
  return execute(g, std::move(inputs), &chunks);
}

}  // namespace axial
