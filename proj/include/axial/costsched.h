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


#ifndef AXIAL_COSTSCHED_H_
#define AXIAL_COSTSCHED_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axial/evoformer.h"
#include "json.hpp"

namespace axial {

// Per-device communication of one evoformer block (forward and backward)
// for an intermediate activation of K bytes over N devices.
struct CommModel {
  double k = 1.0;
  int n_devices = 1;
  int n_heads = 4;  // tensor parallelism splits heads, so N <= n_heads
  // Optional per-row activation sizes; k is used when unset.
  std::optional<double> k_attention, k_opm, k_triangle, k_transpose;

  void validate() const;
};

// 12 ring all-reduces of 2K(N-1)/N each. Throws TpScalingError when N
// exceeds the head count.
double tp_volume(const CommModel& model);

struct DapBreakdown {
  double attention_ff = 0.0;  // no communication
  double outer_product_mean = 0.0;
  double triangle_update = 0.0;
  double transpose = 0.0;
  double total() const { return attention_ff + outer_product_mean + triangle_update + transpose; }
};

DapBreakdown dap_breakdown(const CommModel& model);
double dap_volume(const CommModel& model);

// Forward pass only: 6 all-to-alls and 3 all-gathers at one K.
struct ForwardVolume {
  double all_to_all = 0.0;
  double all_gather = 0.0;
};
ForwardVolume dap_forward_volume(const CommModel& model);

// Forward volumes of one DAP block at the real tensor sizes: m and z
// transposes, the OPM projection gather and the two triangle gathers.
// Bytes per device at `element_size`.
ForwardVolume dap_forward_prediction(const EvoConfig& config, int n_devices, int element_size);

struct VolumeReport {
  CommModel model;
  double tp_total = 0.0;
  DapBreakdown dap;
  std::optional<double> ratio;  // tp / dap, absent when dap is zero

  nlohmann::json to_json() const;
};

VolumeReport compare(const CommModel& model);

// Attention activation bytes: n_r^3 * n_head * element_size per layer.
std::int64_t activation_memory(std::int64_t n_r, std::int64_t n_head, std::int64_t layers,
                               std::int64_t element_size);

enum class Stream { kCompute, kComm };
enum class ScheduleMode { kSync, kAsync };

struct TimelineEvent {
  std::string id;
  Stream stream = Stream::kCompute;
  double duration = 0.0;
  std::vector<std::string> deps;
};

struct ScheduledEvent {
  std::string id;
  Stream stream = Stream::kCompute;
  double start = 0.0;
  double end = 0.0;
};

struct Schedule {
  ScheduleMode mode = ScheduleMode::kSync;
  double makespan = 0.0;
  std::vector<ScheduledEvent> events;  // in dispatch order

  nlohmann::json to_json() const;
};

// Dispatches events in dependency order, earliest listed first among the
// ready ones. Sync runs everything on one stream; async gives comm its own
// stream, and an event starts once its stream is free and its
// dependencies have ended. Throws ScheduleError on cycles, unknown or
// duplicate ids and bad durations.
Schedule simulate_schedule(const std::vector<TimelineEvent>& events, ScheduleMode mode);

std::vector<TimelineEvent> timeline_from_json(const nlohmann::json& j);
nlohmann::json timeline_to_json(const std::vector<TimelineEvent>& events);

}  // namespace axial

#endif  // AXIAL_COSTSCHED_H_
