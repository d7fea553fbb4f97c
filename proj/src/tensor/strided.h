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

#ifndef AXIAL_SRC_TENSOR_STRIDED_H_
#define AXIAL_SRC_TENSOR_STRIDED_H_

#include <array>
#include <cstdint>
#include <vector>

#include "axial/errors.h"
#include "axial/tensor.h"

namespace axial::detail {

using Strides = std::vector<std::int64_t>;

// Visits every element of `shape` in row-major order and calls fn(offsets),
// where offsets[k] is the storage offset of that element in operand k.
// All stride vectors must have the rank of `shape`.
template <std::size_t K, class Fn>
void for_each_element(const Shape& shape,
                      const std::array<const Strides*, K>& strides,
                      std::array<std::int64_t, K> offsets, Fn&& fn) {
  const int rank = static_cast<int>(shape.size());
  if (rank == 0) {
    fn(offsets);
    return;
  }
  for (auto e : shape) {
    if (e <= 0) return;
  }
  const int last = rank - 1;
  std::array<std::int64_t, K> inner_step;
  for (std::size_t k = 0; k < K; ++k) inner_step[k] = (*strides[k])[last];
  std::vector<std::int64_t> index(rank, 0);
  const std::int64_t inner = shape[last];
  while (true) {
    auto o = offsets;
    for (std::int64_t i = 0; i < inner; ++i) {
      fn(o);
      for (std::size_t k = 0; k < K; ++k) o[k] += inner_step[k];
    }
    int d = last - 1;
    for (; d >= 0; --d) {
      ++index[d];
      for (std::size_t k = 0; k < K; ++k) offsets[k] += (*strides[k])[d];
      if (index[d] < shape[d]) break;
      for (std::size_t k = 0; k < K; ++k) {
        offsets[k] -= (*strides[k])[d] * shape[d];
      }
      index[d] = 0;
    }
    if (d < 0) return;
  }
}

// Same traversal for a runtime number of operands.
template <class Fn>
void for_each_element_dyn(const Shape& shape,
                          const std::vector<Strides>& strides,
                          std::vector<std::int64_t> offsets, Fn&& fn) {
  const int rank = static_cast<int>(shape.size());
  const std::size_t k_ops = strides.size();
  if (rank == 0) {
    fn(offsets.data());
    return;
  }
  for (auto e : shape) {
    if (e <= 0) return;
  }
  const int last = rank - 1;
  std::vector<std::int64_t> index(rank, 0);
  std::vector<std::int64_t> o(k_ops);
  while (true) {
    o = offsets;
    for (std::int64_t i = 0; i < shape[last]; ++i) {
      fn(o.data());
      for (std::size_t k = 0; k < k_ops; ++k) o[k] += strides[k][last];
    }
    int d = last - 1;
    for (; d >= 0; --d) {
      ++index[d];
      for (std::size_t k = 0; k < k_ops; ++k) offsets[k] += strides[k][d];
      if (index[d] < shape[d]) break;
      for (std::size_t k = 0; k < k_ops; ++k) {
        offsets[k] -= strides[k][d] * shape[d];
      }
      index[d] = 0;
    }
    if (d < 0) return;
  }
}

// Strides that read `t` as if broadcast (right-aligned) to `target`.
inline Strides broadcast_strides(const Tensor& t, const Shape& target) {
  const int r = t.rank();
  const int R = static_cast<int>(target.size());
  if (r > R) {
    throw DimensionError("cannot broadcast " + to_string(t.shape()) + " to " +
                         to_string(target));
  }
  Strides out(R, 0);
  for (int d = 0; d < r; ++d) {
    const int od = R - r + d;
    if (t.shape()[d] == target[od]) {
      out[od] = t.strides()[d];
    } else if (t.shape()[d] == 1) {
      out[od] = 0;
    } else {
      throw DimensionError("cannot broadcast " + to_string(t.shape()) +
                           " to " + to_string(target));
    }
  }
  return out;
}

// Shape with `axis` collapsed to extent 1; iterating it visits one base
// offset per lane along `axis`.
inline Shape lane_shape(const Shape& shape, int axis) {
  Shape s = shape;
  s[axis] = 1;
  return s;
}

}  // namespace axial::detail

#endif  // AXIAL_SRC_TENSOR_STRIDED_H_
