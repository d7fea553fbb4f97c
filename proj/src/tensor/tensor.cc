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

#include "axial/tensor.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>

#include "axial/errors.h"
#include "strided.h"

namespace axial {
namespace {

std::atomic<std::int64_t> g_live{0};
std::atomic<std::int64_t> g_peak{0};
std::atomic<std::int64_t> g_next_id{1};
std::atomic<bool> g_recording{false};
std::mutex g_events_mu;
std::vector<AllocEvent> g_events;

void record(std::int64_t id, std::int64_t delta) {
  if (!g_recording.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_events_mu);
  g_events.push_back({id, delta});
}

void on_alloc(std::int64_t id, std::int64_t bytes) {
  const std::int64_t live = g_live.fetch_add(bytes) + bytes;
  std::int64_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
  record(id, bytes);
}

void on_free(std::int64_t id, std::int64_t bytes) {
  g_live.fetch_sub(bytes);
  record(id, -bytes);
}

}  // namespace

std::int64_t numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Shape contiguous_strides(const Shape& shape) {
  Shape s(shape.size(), 1);
  for (int d = static_cast<int>(shape.size()) - 2; d >= 0; --d) {
    s[d] = s[d + 1] * shape[d + 1];
  }
  return s;
}

int normalize_axis(int axis, int rank) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for rank " + std::to_string(rank));
  }
  return a;
}

AllocStats alloc_stats() {
  AllocStats s;
  s.live_bytes = g_live.load();
  s.peak_bytes = g_peak.load();
  return s;
}

void reset_peak() { g_peak.store(g_live.load()); }

void set_alloc_recording(bool enabled) { g_recording.store(enabled); }

std::vector<AllocEvent> take_alloc_events() {
  std::lock_guard<std::mutex> lock(g_events_mu);
  std::vector<AllocEvent> out;
  out.swap(g_events);
  return out;
}

Storage::Storage(std::int64_t elements)
    : data_(new double[static_cast<std::size_t>(elements)]()),
      size_(elements),
      id_(g_next_id.fetch_add(1)) {
  on_alloc(id_, size_ * kExecElementSize);
}

Storage::~Storage() { on_free(id_, size_ * kExecElementSize); }

Tensor Tensor::zeros(Shape shape) {
  if (shape.empty()) throw DimensionError("tensor rank must be >= 1");
  for (auto e : shape) {
    if (e < 1) {
      throw DimensionError("tensor extents must be >= 1, got " +
                           to_string(shape));
    }
  }
  Tensor t;
  t.storage_ = std::make_shared<Storage>(axial::numel(shape));
  t.strides_ = contiguous_strides(shape);
  t.shape_ = std::move(shape);
  return t;
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t = zeros(std::move(shape));
  std::fill(t.storage_->data(), t.storage_->data() + t.storage_->size(), value);
  return t;
}

Tensor Tensor::from_vector(Shape shape, std::vector<double> values) {
  if (static_cast<std::int64_t>(values.size()) != axial::numel(shape)) {
    throw DimensionError("value count " + std::to_string(values.size()) +
                         " does not match shape " + to_string(shape));
  }
  Tensor t = zeros(std::move(shape));
  std::copy(values.begin(), values.end(), t.storage_->data());
  return t;
}

Tensor Tensor::identity(std::int64_t n) {
  Tensor t = zeros({n, n});
  for (std::int64_t i = 0; i < n; ++i) t.storage_->data()[i * n + i] = 1.0;
  return t;
}

std::int64_t Tensor::dim(int axis) const {
  return shape_[normalize_axis(axis, rank())];
}

std::int64_t Tensor::storage_id() const {
  return storage_ ? storage_->id() : 0;
}

bool Tensor::is_contiguous() const {
  return strides_ == contiguous_strides(shape_);
}

std::span<const double> Tensor::values() const {
  if (!is_contiguous()) throw DimensionError("values() on a strided view");
  return {base(), static_cast<std::size_t>(numel())};
}

std::span<double> Tensor::mutable_values() {
  if (!is_contiguous()) {
    throw DimensionError("mutable_values() on a strided view");
  }
  return {mutable_base(), static_cast<std::size_t>(numel())};
}

double Tensor::at(std::initializer_list<std::int64_t> index) const {
  return at(std::span<const std::int64_t>(index.begin(), index.size()));
}

double Tensor::at(std::span<const std::int64_t> index) const {
  if (static_cast<int>(index.size()) != rank()) {
    throw DimensionError("index rank mismatch for shape " + to_string(shape_));
  }
  std::int64_t off = 0;
  for (int d = 0; d < rank(); ++d) {
    if (index[d] < 0 || index[d] >= shape_[d]) {
      throw DimensionError("index out of range for shape " + to_string(shape_));
    }
    off += index[d] * strides_[d];
  }
  return base()[off];
}

double& Tensor::mutable_at(std::initializer_list<std::int64_t> index) {
  return mutable_at(std::span<const std::int64_t>(index.begin(), index.size()));
}

double& Tensor::mutable_at(std::span<const std::int64_t> index) {
  std::int64_t off = 0;
  for (int d = 0; d < rank(); ++d) off += index[d] * strides_[d];
  return mutable_base()[off];
}

std::vector<double> Tensor::to_vector() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(numel()));
  const double* p = base();
  detail::for_each_element<1>(shape_, {&strides_}, {0},
                              [&](const auto& o) { out.push_back(p[o[0]]); });
  return out;
}

Tensor Tensor::clone() const {
  Tensor t = zeros(shape_);
  double* dst = t.mutable_base();
  const double* src = base();
  std::int64_t i = 0;
  detail::for_each_element<1>(shape_, {&strides_}, {0},
                              [&](const auto& o) { dst[i++] = src[o[0]]; });
  return t;
}

Tensor Tensor::slice(int axis, std::int64_t start, std::int64_t length) const {
  const int a = normalize_axis(axis, rank());
  if (start < 0 || length < 1 || start + length > shape_[a]) {
    throw DimensionError("slice [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") out of range on axis " +
                         std::to_string(a) + " of " + to_string(shape_));
  }
  Tensor v = *this;
  v.offset_ += start * strides_[a];
  v.shape_[a] = length;
  return v;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (std::memcmp(&va[i], &vb[i], sizeof(double)) != 0) return false;
  }
  return true;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("max_abs_diff shape mismatch " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = std::abs(va[i] - vb[i]);
    if (std::isnan(d)) return std::numeric_limits<double>::infinity();
    m = std::max(m, d);
  }
  return m;
}

}  // namespace axial
