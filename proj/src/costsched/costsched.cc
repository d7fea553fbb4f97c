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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "axial/errors.h"

namespace axial {
namespace {

using nlohmann::json;

double gather(double k, int n) { return k * (n - 1) / n; }
double transpose(double k, int n) { return k * (n - 1) / (static_cast<double>(n) * n); }

const char* stream_name(Stream s) { return s == Stream::kComm ? "comm" : "compute"; }

}  // namespace

void CommModel::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(k)) throw DomainError("activation size K must be positive");
  for (const auto& o : {k_attention, k_opm, k_triangle, k_transpose}) {
    if (o && !positive(*o)) throw DomainError("per-row activation size must be positive");
  }
  if (n_devices < 1) throw DomainError("device count must be at least 1");
  if (n_heads < 1) throw DomainError("head count must be at least 1");
}

double tp_volume(const CommModel& model) {
  model.validate();
  if (model.n_devices > model.n_heads) {
    throw TpScalingError("tensor parallelism splits " + std::to_string(model.n_heads) +
                             " heads, so it scales to at most " + std::to_string(model.n_heads) + " devices, not " +
                             std::to_string(model.n_devices),
                         model.n_heads);
  }
  return 24.0 * gather(model.k_attention.value_or(model.k), model.n_devices);
}

DapBreakdown dap_breakdown(const CommModel& model) {
  model.validate();
  const int n = model.n_devices;
  DapBreakdown b;
  b.outer_product_mean = gather(model.k_opm.value_or(model.k), n);
  b.triangle_update = 2.0 * gather(model.k_triangle.value_or(model.k), n);
  b.transpose = 12.0 * transpose(model.k_transpose.value_or(model.k), n);
  return b;
}

double dap_volume(const CommModel& model) { return dap_breakdown(model).total(); }

ForwardVolume dap_forward_volume(const CommModel& model) {
  model.validate();
  const int n = model.n_devices;
  return {6.0 * transpose(model.k_transpose.value_or(model.k), n),
          gather(model.k_opm.value_or(model.k), n) + 2.0 * gather(model.k_triangle.value_or(model.k), n)};
}

ForwardVolume dap_forward_prediction(const EvoConfig& c, int n, int element_size) {
  c.validate();
  if (n < 1) throw DomainError("device count must be at least 1");
  const double es = element_size;
  const double k_m = static_cast<double>(c.n_seq * c.n_res * c.h_msa) * es;
  const double k_z = static_cast<double>(c.n_res * c.n_res * c.h_pair) * es;
  const double k_opm = static_cast<double>(c.n_seq * c.n_res * c.hidden_proj) * es;
  const double k_tri = static_cast<double>(c.n_res * c.n_res * c.hidden_proj) * es;
  return {2.0 * transpose(k_m, n) + 4.0 * transpose(k_z, n), gather(k_opm, n) + 2.0 * gather(k_tri, n)};
}

json VolumeReport::to_json() const {
  json rows = {{"attention_ff", {{"tp", tp_total}, {"dap", dap.attention_ff}}},
               {"outer_product_mean", {{"tp", nullptr}, {"dap", dap.outer_product_mean}}},
               {"triangle_update", {{"tp", nullptr}, {"dap", dap.triangle_update}}},
               {"transpose", {{"tp", 0.0}, {"dap", dap.transpose}}}};
  return {{"schema", "axialfold.volume/1"},
          {"k", model.k},
          {"devices", model.n_devices},
          {"heads", model.n_heads},
          {"tp_total", tp_total},
          {"dap_total", dap.total()},
          {"ratio", ratio ? json(*ratio) : json("n/a")},
          {"rows", rows}};
}

VolumeReport compare(const CommModel& model) {
  VolumeReport r;
  r.model = model;
  r.tp_total = tp_volume(model);
  r.dap = dap_breakdown(model);
  if (r.dap.total() > 0.0) r.ratio = r.tp_total / r.dap.total();
  return r;
}

std::int64_t activation_memory(std::int64_t n_r, std::int64_t n_head, std::int64_t layers,
                               std::int64_t element_size) {
  if (n_r < 1 || n_head < 1 || layers < 1 || element_size < 1) {
    throw DomainError("activation memory needs positive n_r, heads, layers and element size");
  }
  std::int64_t out = 1;
  for (std::int64_t f : {n_r, n_r, n_r, n_head, element_size, layers}) {
    if (__builtin_mul_overflow(out, f, &out)) throw DomainError("activation memory overflows 64 bits");
  }
  return out;
}

Schedule simulate_schedule(const std::vector<TimelineEvent>& events, ScheduleMode mode) {
  const int n = static_cast<int>(events.size());
  std::map<std::string, int> index;
  for (int i = 0; i < n; ++i) {
    const auto& e = events[i];
    if (e.id.empty()) throw ScheduleError("event " + std::to_string(i) + " has no id");
    if (!index.emplace(e.id, i).second) throw ScheduleError("duplicate event id '" + e.id + "'");
    if (!std::isfinite(e.duration) || e.duration < 0.0) {
      throw ScheduleError("event '" + e.id + "' needs a finite non-negative duration");
    }
  }
  std::vector<std::vector<int>> deps(n), users(n);
  std::vector<int> waiting(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const std::string& d : events[i].deps) {
      const auto it = index.find(d);
      if (it == index.end()) throw ScheduleError("event '" + events[i].id + "' depends on unknown '" + d + "'");
      if (std::find(deps[i].begin(), deps[i].end(), it->second) != deps[i].end()) continue;
      deps[i].push_back(it->second);
      users[it->second].push_back(i);
      ++waiting[i];
    }
  }

  Schedule s;
  s.mode = mode;
  std::vector<double> end(n, 0.0);
  double free_at[2] = {0.0, 0.0};
  std::vector<bool> done(n, false);
  for (int step = 0; step < n; ++step) {
    int next = -1;
    for (int i = 0; i < n && next < 0; ++i) {
      if (!done[i] && waiting[i] == 0) next = i;
    }
    if (next < 0) {
      std::string stuck;
      for (int i = 0; i < n; ++i) {
        if (!done[i]) stuck += (stuck.empty() ? "" : ", ") + events[i].id;
      }
      throw ScheduleError("timeline has a dependency cycle among: " + stuck);
    }
    const TimelineEvent& e = events[next];
    const int lane = mode == ScheduleMode::kSync ? 0 : static_cast<int>(e.stream);
    double start = free_at[lane];
    for (int d : deps[next]) start = std::max(start, end[d]);
    end[next] = start + e.duration;
    free_at[lane] = end[next];
    done[next] = true;
    for (int u : users[next]) --waiting[u];
    s.events.push_back({e.id, e.stream, start, end[next]});
    s.makespan = std::max(s.makespan, end[next]);
  }
  return s;
}

json Schedule::to_json() const {
  json evs = json::array();
  for (const auto& e : events) {
    evs.push_back({{"id", e.id}, {"stream", stream_name(e.stream)}, {"start", e.start}, {"end", e.end}});
  }
  return {{"schema", "axialfold.schedule/1"},
          {"mode", mode == ScheduleMode::kSync ? "sync" : "async"},
          {"makespan", makespan},
          {"events", evs}};
}

std::vector<TimelineEvent> timeline_from_json(const json& j) {
  try {
    if (j.at("schema") != "axialfold.timeline/1") {
      throw ScheduleError("unsupported timeline schema " + j.at("schema").dump());
    }
    std::vector<TimelineEvent> out;
    for (const json& e : j.at("events")) {
      TimelineEvent ev;
      ev.id = e.at("id").get<std::string>();
      const std::string stream = e.at("stream").get<std::string>();
      if (stream == "compute") {
        ev.stream = Stream::kCompute;
      } else if (stream == "comm") {
        ev.stream = Stream::kComm;
      } else {
        throw ScheduleError("event '" + ev.id + "' has unknown stream '" + stream + "'");
      }
      ev.duration = e.at("duration").get<double>();
      ev.deps = e.value("deps", std::vector<std::string>{});
      out.push_back(std::move(ev));
    }
    return out;
  } catch (const json::exception& e) {
    throw ScheduleError(std::string("malformed timeline: ") + e.what());
  }
}

json timeline_to_json(const std::vector<TimelineEvent>& events) {
  json evs = json::array();
  for (const auto& e : events) {
    evs.push_back({{"id", e.id}, {"stream", stream_name(e.stream)}, {"duration", e.duration}, {"deps", e.deps}});
  }
  return {{"schema", "axialfold.timeline/1"}, {"events", evs}};
}

}  // namespace axial
