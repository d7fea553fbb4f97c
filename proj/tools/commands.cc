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


#include "commands.h"

#include <cstdint>
#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "axial/autochunk.h"
#include "axial/costsched.h"
#include "axial/dap.h"
#include "axial/errors.h"
#include "axial/execution.h"
#include "axial/trace.h"

namespace axial::cli {
namespace {

using nlohmann::json;

constexpr double kEquivalenceTol = 1e-9;
constexpr double kFootprintThreshold = 0.2;
// Share of evoformer operations reported at full scale, shown next to ours.
constexpr double kReferenceFootprintShare = 0.95;
constexpr int kExecElementSize = 8;  // the executor runs in float64

// Same A/C/B timeline as tools/data/example_timeline.json.
constexpr const char* kBuiltinTimeline = R"({
  "schema": "axialfold.timeline/1",
  "events": [
    {"id": "A", "stream": "compute", "duration": 10, "deps": []},
    {"id": "C", "stream": "comm", "duration": 4, "deps": []},
    {"id": "B", "stream": "compute", "duration": 5, "deps": ["A", "C"]}
  ]
})";

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void check_element_size(int es) {
  if (es != 2 && es != 4 && es != 8) throw DomainError("element size must be 2, 4 or 8");
}

// Uniform in [-1, 1) from the top 53 bits of each draw, so inputs depend only
// on the seed.
Tensor random_input(const Shape& shape, std::mt19937_64& rng) {
  Tensor t = Tensor::zeros(shape);
  for (double& v : t.mutable_values()) v = -1.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return t;
}

std::vector<Tensor> block_inputs(const EvoConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  Tensor m = random_input({c.n_seq, c.n_res, c.h_msa}, rng);
  Tensor z = random_input({c.n_res, c.n_res, c.h_pair}, rng);
  return {m, z};
}

std::vector<Tensor> clones(const std::vector<Tensor>& ts) {
  std::vector<Tensor> out;
  for (const auto& t : ts) out.push_back(t.clone());
  return out;
}

double output_diff(const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, max_abs_diff(a[i], b[i]));
  return d;
}

json error_report(const std::string& kind, const std::string& message) {
  return {{"schema", "axialfold.error/1"}, {"error", kind}, {"message", message}};
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  if (j.is_array()) {
    bool scalars = true;
    for (const auto& v : j) scalars = scalars && !v.is_structured();
    if (!scalars) {
      for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
      return;
    }
  }
  out << prefix << "  " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

}  // namespace

EvoConfig DimOptions::config() const {
  EvoConfig c;
  c.n_seq = n_seq;
  c.n_res = n_res;
  c.h_msa = h_msa;
  c.h_pair = h_pair;
  c.n_head_msa = heads;
  c.n_head_pair = heads;
  c.hidden_proj = hidden_proj;
  c.validate();
  return c;
}

Outcome cmd_analyze(const AnalyzeOptions& o) {
  check_element_size(o.element_size);
  if (o.layers < 1) throw DomainError("layers must be at least 1");
  const EvoConfig c = o.dims.config();
  Graph g;
  if (o.graph_in.empty()) {
    g = trace_evoformer(c, BlockParams::random(c, o.dims.seed));
  } else {
    std::ifstream in(o.graph_in);
    if (!in) throw std::invalid_argument("cannot open " + o.graph_in);
    std::stringstream ss;
    ss << in.rdbuf();
    g = Graph::parse(ss.str());
    g.validate();
  }
  if (!o.graph_out.empty()) write_text_file(o.graph_out, g.to_json().dump() + "\n");

  const MemoryProfile prof = estimate_memory(g, nullptr, o.element_size);
  json report = {{"schema", "axialfold.analyze/1"},
                 {"source", o.graph_in.empty() ? "traced" : "file"},
                 {"nodes", g.size()},
                 {"graph_digest", g.digest()},
                 {"profile", prof.to_json()},
                 {"footprint",
                  {{"threshold", kFootprintThreshold},
                   {"fraction_below", footprint_stats(prof, kFootprintThreshold)},
                   {"reference_fraction", kReferenceFootprintShare}}}};
  if (o.graph_in.empty()) {
    report["config"] = c.to_json();
    report["seed"] = o.dims.seed;
  }
  report["activation_memory"] = {
      {"n_res", c.n_res},
      {"heads", c.n_head_pair},
      {"layers", o.layers},
      {"element_size", o.element_size},
      {"bytes", activation_memory(c.n_res, c.n_head_pair, o.layers, o.element_size)}};
  return {report, kOk};
}

Outcome cmd_commvolume(const CommVolumeOptions& o) {
  CommModel model;
  model.k = o.k;
  model.n_devices = o.devices;
  model.n_heads = o.heads;
  model.validate();
  if (o.mode == "both") return {compare(model).to_json(), kOk};
  json report = {{"schema", "axialfold.volume/1"},
                 {"k", model.k},
                 {"devices", model.n_devices},
                 {"heads", model.n_heads},
                 {"mode", o.mode}};
  if (o.mode == "tp") {
    report["tp_total"] = tp_volume(model);
  } else if (o.mode == "dap") {
    const DapBreakdown b = dap_breakdown(model);
    report["dap_total"] = b.total();
    report["rows"] = {{"attention_ff", b.attention_ff},
                      {"outer_product_mean", b.outer_product_mean},
                      {"triangle_update", b.triangle_update},
                      {"transpose", b.transpose}};
  } else {
    throw std::invalid_argument("mode must be both, tp or dap");
  }
  return {report, kOk};
}

Outcome cmd_simulate(const SimulateOptions& o) {
  check_element_size(o.element_size);
  const EvoConfig c = o.dims.config();
  DeviceMesh mesh(o.devices);
  if (o.order_seed) mesh = mesh.permuted(*o.order_seed);
  mesh.concurrent = o.concurrent;

  const BlockParams params = BlockParams::random(c, o.dims.seed);
  const auto in = block_inputs(c, o.dims.seed);
  const BlockOutput ref = evoformer_block(in[0], in[1], params);
  const DapOutput out =
      dap_evoformer_block(shard(in[0], 0, mesh), shard(in[1], 0, mesh), params, mesh, o.element_size);
  const double diff_m = max_abs_diff(unshard(out.m), ref.m);
  const double diff_z = max_abs_diff(unshard(out.z), ref.z);

  const ForwardVolume pred = dap_forward_prediction(c, o.devices, o.element_size);
  bool bytes_match = true;
  json per_device = json::array();
  for (int d = 0; d < o.devices; ++d) {
    const auto a2a = out.ledger.at(d, Collective::kAllToAll).bytes;
    const auto ag = out.ledger.at(d, Collective::kAllGather).bytes;
    const bool ok = static_cast<double>(a2a) == pred.all_to_all && static_cast<double>(ag) == pred.all_gather;
    bytes_match = bytes_match && ok;
    per_device.push_back({{"device", d}, {"all_to_all_bytes", a2a}, {"all_gather_bytes", ag}, {"match", ok}});
  }
  const double diff = std::max(diff_m, diff_z);
  const bool pass = diff <= kEquivalenceTol && bytes_match;
  json report = {{"schema", "axialfold.simulate/1"},
                 {"config", c.to_json()},
                 {"seed", o.dims.seed},
                 {"devices", o.devices},
                 {"concurrent", o.concurrent},
                 {"device_order", mesh.order},
                 {"max_abs_diff", {{"m", diff_m}, {"z", diff_z}}},
                 {"tolerance", kEquivalenceTol},
                 {"calls",
                  {{"alltoall", out.ledger.calls(Collective::kAllToAll)},
                   {"allgather", out.ledger.calls(Collective::kAllGather)},
                   {"allreduce", out.ledger.calls(Collective::kAllReduce)},
                   {"bias_gather", out.ledger.calls(Collective::kBiasGather)}}},
                 {"prediction_per_device",
                  {{"all_to_all_bytes", pred.all_to_all}, {"all_gather_bytes", pred.all_gather}}},
                 {"measured_per_device", per_device},
                 {"bytes_match_prediction", bytes_match},
                 {"ledger", out.ledger.to_json()},
                 {"pass", pass}};
  return {report, pass ? kOk : kFailure};
}

Outcome cmd_plan(const PlanOptions& o) {
  check_element_size(o.element_size);
  if (o.budget.has_value() == o.budget_frac.has_value())
    throw std::invalid_argument("give exactly one of --budget and --budget-frac");
  if (o.budget_frac && !(*o.budget_frac > 0.0)) throw DomainError("budget fraction must be positive");
  const EvoConfig c = o.dims.config();
  const Graph g = trace_evoformer(c, BlockParams::random(c, o.dims.seed));
  const std::int64_t unchunked = estimate_memory(g, nullptr, o.element_size).peak_bytes;
  const std::int64_t budget =
      o.budget ? *o.budget : static_cast<std::int64_t>(*o.budget_frac * static_cast<double>(unchunked));

  json report = {{"schema", "axialfold.planfile/1"},
                 {"config", c.to_json()},
                 {"seed", o.dims.seed},
                 {"element_size", o.element_size},
                 {"budget_bytes", budget},
                 {"unchunked_peak_bytes", unchunked}};
  if (o.budget_frac) report["budget_frac"] = *o.budget_frac;

  AutoChunkOptions opts;
  opts.element_size = o.element_size;
  opts.window = o.window;
  try {
    const ChunkPlan plan = autochunk_search(g, budget, opts);
    const std::int64_t est = estimate_memory(g, &plan, o.element_size).peak_bytes;
    report["estimated_peak_bytes"] = est;
    report["reduction"] = 1.0 - static_cast<double>(est) / static_cast<double>(unchunked);
    report["execution_plan"] = plan_codegen(g, plan).to_json();
    report["search_log"] = plan.search_log;
    return {report, kOk};
  } catch (const InfeasibleBudgetError& e) {
    report["schema"] = "axialfold.error/1";
    report["error"] = "infeasible_budget";
    report["message"] = e.what();
    report["min_peak_bytes"] = e.min_peak_bytes();
    return {report, kInfeasible};
  }
}

Outcome cmd_run_plan(const RunPlanOptions& o) {
  const json file = read_json_file(o.plan_file);
  if (file.value("schema", "") != "axialfold.planfile/1")
    throw PlanError(o.plan_file + " is not a plan file");
  const EvoConfig c = EvoConfig::from_json(file.at("config"));
  c.validate();
  const auto seed = file.at("seed").get<std::uint64_t>();
  const int es = file.at("element_size").get<int>();
  check_element_size(es);
  const std::int64_t budget = file.at("budget_bytes").get<std::int64_t>();

  const Graph g = trace_evoformer(c, BlockParams::random(c, seed));
  const ExecutionPlan ep = ExecutionPlan::from_json(file.at("execution_plan"));
  const ChunkPlan plan = ep.to_chunk_plan(g);

  const auto in = block_inputs(c, seed);
  const ExecResult plain = execute(g, clones(in));
  const ExecResult chunked = execute_chunked(g, ep, clones(in));
  const double diff = output_diff(plain.outputs, chunked.outputs);
  // The executor counts 8-byte elements; scale to the plan's element size.
  const std::int64_t measured = chunked.peak_bytes / kExecElementSize * es;
  const std::int64_t estimate = estimate_memory(g, &plan, es).peak_bytes;
  const std::int64_t unchunked = plain.peak_bytes / kExecElementSize * es;
  const bool pass = measured <= budget && diff <= kEquivalenceTol;
  json report = {{"schema", "axialfold.runplan/1"},
                 {"config", c.to_json()},
                 {"seed", seed},
                 {"element_size", es},
                 {"loops", plan.regions.size()},
                 {"budget_bytes", budget},
                 {"unchunked_peak_bytes", unchunked},
                 {"measured_peak_bytes", measured},
                 {"estimated_peak_bytes", estimate},
                 {"measured_equals_estimate", measured == estimate},
                 {"max_abs_diff", diff},
                 {"tolerance", kEquivalenceTol},
                 {"pass", pass}};
  return {report, pass ? kOk : kFailure};
}

Outcome cmd_schedule(const ScheduleOptions& o) {
  const json tj = o.timeline_file.empty() ? json::parse(kBuiltinTimeline) : read_json_file(o.timeline_file);
  const auto events = timeline_from_json(tj);
  if (o.mode != "both" && o.mode != "sync" && o.mode != "async")
    throw std::invalid_argument("mode must be both, sync or async");
  json report = {{"schema", "axialfold.schedulereport/1"},
                 {"timeline", o.timeline_file.empty() ? "builtin" : o.timeline_file},
                 {"events", events.size()}};
  std::optional<double> sync, async;
  if (o.mode != "async") {
    const Schedule s = simulate_schedule(events, ScheduleMode::kSync);
    sync = s.makespan;
    report["sync"] = s.to_json();
  }
  if (o.mode != "sync") {
    const Schedule s = simulate_schedule(events, ScheduleMode::kAsync);
    async = s.makespan;
    report["async"] = s.to_json();
  }
  if (sync && async) report["saved"] = *sync - *async;
  return {report, kOk};
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const TpScalingError& e) {
    json r = error_report("tp_scaling", e.what());
    r["head_cap"] = e.head_cap();
    return {r, kModelConstraint};
  } catch (const InfeasibleBudgetError& e) {
    json r = error_report("infeasible_budget", e.what());
    r["min_peak_bytes"] = e.min_peak_bytes();
    return {r, kInfeasible};
  } catch (const ShardError& e) {
    return {error_report("shard", e.what()), kUsage};
  } catch (const MeshError& e) {
    return {error_report("mesh", e.what()), kUsage};
  } catch (const ScheduleError& e) {
    return {error_report("schedule", e.what()), kUsage};
  } catch (const GraphError& e) {
    return {error_report("graph", e.what()), kUsage};
  } catch (const PlanError& e) {
    return {error_report("plan", e.what()), kUsage};
  } catch (const DimensionError& e) {
    return {error_report("dimension", e.what()), kUsage};
  } catch (const DomainError& e) {
    return {error_report("domain", e.what()), kUsage};
  } catch (const nlohmann::json::exception& e) {
    return {error_report("json", e.what()), kUsage};
  } catch (const std::invalid_argument& e) {
    return {error_report("invalid_argument", e.what()), kUsage};
  } catch (const std::exception& e) {
    return {error_report("internal", e.what()), kFailure};
  }
}

std::string render_table(const nlohmann::json& report) {
  std::ostringstream out;
  flatten(report, "", out);
  return out.str();
}

}  // namespace axial::cli
