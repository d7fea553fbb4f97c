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


#ifndef AXIAL_TESTS_TIMELINE_GEN_H_
#define AXIAL_TESTS_TIMELINE_GEN_H_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "axial/costsched.h"
#include "test_util.h"

namespace axial::testing {

// Random DAG of compute and comm events; edges only point to earlier
// events, and the list order is shuffled so dispatch order is exercised.
inline std::vector<TimelineEvent> random_timeline(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = 2 + static_cast<int>(rng() % 30);
  std::vector<TimelineEvent> evs(n);
  for (int i = 0; i < n; ++i) {
    evs[i].id = "e" + std::to_string(i);
    evs[i].stream = rng() % 3 == 0 ? Stream::kComm : Stream::kCompute;
    evs[i].duration = rng() % 7 == 0 ? 0.0 : uniform(rng, 0.0, 10.0);
    for (int j = 0; j < i; ++j) {
      if (rng() % 4 == 0) evs[i].deps.push_back(evs[j].id);
    }
  }
  std::shuffle(evs.begin(), evs.end(), rng);
  return evs;
}

inline std::vector<TimelineEvent> worked_example() {
  return {{"A", Stream::kCompute, 10.0, {}}, {"C", Stream::kComm, 4.0, {}}, {"B", Stream::kCompute, 5.0, {"A", "C"}}};
}

}  // namespace axial::testing

#endif  // AXIAL_TESTS_TIMELINE_GEN_H_
