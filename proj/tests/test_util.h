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

#ifndef AXIAL_TESTS_TEST_UTIL_H_
#define AXIAL_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>

#include "axial/tensor.h"

namespace axial::testing {

// Uniform in [lo, hi) from the top 53 bits of a 64-bit Mersenne draw.
inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Tensor random_tensor(const Shape& shape, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(shape);
  for (double& v : t.mutable_values()) v = uniform(rng, lo, hi);
  return t;
}

}  // namespace axial::testing

#endif  // AXIAL_TESTS_TEST_UTIL_H_
