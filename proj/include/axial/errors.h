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

#ifndef AXIAL_ERRORS_H_
#define AXIAL_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace axial {

// Shape or axis violation in a tensor or graph operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite input where a finite one is required.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or structurally invalid graph (bad JSON, forward references).
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A chunk plan that does not satisfy the legality rules for its graph.
class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No chunk plan brings the estimated peak under the requested budget.
class InfeasibleBudgetError : public std::runtime_error {
 public:
  InfeasibleBudgetError(const std::string& what, std::int64_t min_peak_bytes)
      : std::runtime_error(what), min_peak_bytes_(min_peak_bytes) {}
  std::int64_t min_peak_bytes() const { return min_peak_bytes_; }

 private:
  std::int64_t min_peak_bytes_;
};

// Sharding precondition failure (indivisible axis, bad axis index).
class ShardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Device mesh larger than the sharded extent.
class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tensor parallelism requested across more devices than attention heads.
class TpScalingError : public std::invalid_argument {
 public:
  TpScalingError(const std::string& what, int head_cap)
      : std::invalid_argument(what), head_cap_(head_cap) {}
  int head_cap() const { return head_cap_; }

 private:
  int head_cap_;
};

// Cyclic or dangling dependencies in a timeline.
class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace axial

#endif  // AXIAL_ERRORS_H_
