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

#ifndef AXIAL_TENSOR_H_
#define AXIAL_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace axial {

using Shape = std::vector<std::int64_t>;

// Execution always uses 64-bit floats. Reports may rescale byte counts to a
// model element size (2 bytes models BFloat16).
inline constexpr int kExecElementSize = 8;
inline constexpr int kDefaultModelElementSize = 2;

std::int64_t numel(const Shape& shape);
std::string to_string(const Shape& shape);
Shape contiguous_strides(const Shape& shape);
// Normalizes a possibly negative axis; throws DimensionError when out of range.
int normalize_axis(int axis, int rank);

// Byte counters maintained by every tensor storage allocation.
struct AllocStats {
  std::int64_t live_bytes = 0;
  std::int64_t peak_bytes = 0;
  int element_size_model = kDefaultModelElementSize;

  std::int64_t live_model_bytes() const {
    return live_bytes / kExecElementSize * element_size_model;
  }
  std::int64_t peak_model_bytes() const {
    return peak_bytes / kExecElementSize * element_size_model;
  }
};

// One allocation (+bytes) or release (-bytes) seen by the tracker.
struct AllocEvent {
  std::int64_t storage_id;
  std::int64_t delta_bytes;
};

AllocStats alloc_stats();
// Sets peak to the current live byte count.
void reset_peak();
// While enabled, every allocation and release is appended to an event log.
void set_alloc_recording(bool enabled);
std::vector<AllocEvent> take_alloc_events();

class Storage {
 public:
  explicit Storage(std::int64_t elements);
  ~Storage();
  Storage(const Storage&) = delete;
  Storage& operator=(const Storage&) = delete;

  double* data() { return data_.get(); }
  const double* data() const { return data_.get(); }
  std::int64_t size() const { return size_; }
  std::int64_t id() const { return id_; }

 private:
  std::unique_ptr<double[]> data_;
  std::int64_t size_;
  std::int64_t id_;
};

// Dense float64 tensor. Freshly created tensors are contiguous and own their
// storage; slice() produces a strided view that shares storage and allocates
// nothing. Kernels accept views for both inputs and destinations.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor from_vector(Shape shape, std::vector<double> values);
  static Tensor identity(std::int64_t n);

  bool defined() const { return storage_ != nullptr; }
  const Shape& shape() const { return shape_; }
  const std::vector<std::int64_t>& strides() const { return strides_; }
  std::int64_t offset() const { return offset_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t dim(int axis) const;
  std::int64_t numel() const { return axial::numel(shape_); }
  std::int64_t bytes() const { return numel() * kExecElementSize; }
  std::int64_t storage_id() const;
  // Number of tensors sharing this storage, 0 when undefined.
  long storage_use_count() const { return storage_ ? storage_.use_count() : 0; }
  bool is_contiguous() const;

  const double* base() const { return storage_->data() + offset_; }
  double* mutable_base() { return storage_->data() + offset_; }

  // Contiguous tensors only.
  std::span<const double> values() const;
  std::span<double> mutable_values();

  double at(std::initializer_list<std::int64_t> index) const;
  double at(std::span<const std::int64_t> index) const;
  double& mutable_at(std::span<const std::int64_t> index);
  double& mutable_at(std::initializer_list<std::int64_t> index);

  // Values in row-major logical order regardless of layout.
  std::vector<double> to_vector() const;
  Tensor clone() const;
  Tensor slice(int axis, std::int64_t start, std::int64_t length) const;

 private:
  std::shared_ptr<Storage> storage_;
  std::int64_t offset_ = 0;
  Shape shape_;
  std::vector<std::int64_t> strides_;
};

bool bit_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

// ---------------------------------------------------------------------------
// Kernels. Every kernel allocates exactly its output tensor, or none when a
// destination view is passed through `out`. Reductions run in ascending index
// order.
// ---------------------------------------------------------------------------

// Right-aligned broadcast of two shapes.
Shape broadcast_shapes(const Shape& a, const Shape& b);

// [.., m, k] x [.., k, n] -> [.., m, n]; leading dims broadcast.
Tensor matmul(const Tensor& a, const Tensor& b, Tensor* out = nullptr);
// x[.., k] W[k, n] + bias[n].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias,
              Tensor* out = nullptr);
// Einsum-style contraction of two operands, e.g. "ikc,jkc->ijc". Labels
// absent from the output are summed; the sum is multiplied by `scale`.
Tensor contract(const std::string& spec, const Tensor& a, const Tensor& b,
                double scale = 1.0, Tensor* out = nullptr);
// out[a..., b...] = a[a...] * b[b...].
Tensor outer(const Tensor& a, const Tensor& b, Tensor* out = nullptr);

Tensor softmax(const Tensor& x, int axis, Tensor* out = nullptr);
// softmax((x + mask + bias) * scale) without materializing the sums. mask and
// bias broadcast right-aligned against x; either may be undefined.
Tensor fused_softmax_mask_bias(const Tensor& x, const Tensor& mask,
                               const Tensor& bias, int axis,
                               double scale = 1.0, Tensor* out = nullptr);
// Last-axis normalization with population variance; eps inside the sqrt.
Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5, Tensor* out = nullptr);

Tensor add(const Tensor& a, const Tensor& b, Tensor* out = nullptr);
Tensor mul(const Tensor& a, const Tensor& b, Tensor* out = nullptr);
Tensor sigmoid(const Tensor& x, Tensor* out = nullptr);
Tensor relu(const Tensor& x, Tensor* out = nullptr);
Tensor scale(const Tensor& x, double factor, Tensor* out = nullptr);

Tensor mean_over_axis(const Tensor& x, int axis, Tensor* out = nullptr);
Tensor sum_over_axis(const Tensor& x, int axis, Tensor* out = nullptr);
Tensor permute(const Tensor& x, const std::vector<int>& perm,
               Tensor* out = nullptr);
Tensor concat_last_axis(const std::vector<Tensor>& parts, Tensor* out = nullptr);
// Copy of x[..., start:start+length, ...] along axis.
Tensor slice_axis(const Tensor& x, int axis, std::int64_t start,
                  std::int64_t length, Tensor* out = nullptr);
// Row-major reinterpretation; element count must match.
Tensor reshape(const Tensor& x, const Shape& shape, Tensor* out = nullptr);

// Fused chain of elementwise steps evaluated per output element with no
// intermediate buffers. Operands reference graph inputs (broadcast to the
// output shape) or earlier step results.
enum class FusedOpKind { kAdd, kMul, kSigmoid, kRelu, kScale };

struct FusedOperand {
  bool from_input = true;
  int index = 0;
};

struct FusedStep {
  FusedOpKind kind = FusedOpKind::kAdd;
  FusedOperand lhs;
  FusedOperand rhs;  // unused for unary kinds
  double constant = 1.0;  // kScale factor
};

Tensor fused_elementwise(const std::vector<FusedStep>& program,
                         const std::vector<Tensor>& inputs,
                         const Shape& out_shape, Tensor* out = nullptr);

}  // namespace axial

#endif  // AXIAL_TENSOR_H_
