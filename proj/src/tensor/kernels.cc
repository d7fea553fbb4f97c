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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "axial/errors.h"
#include "axial/tensor.h"
#include "strided.h"

namespace axial {

using detail::broadcast_strides;
using detail::for_each_element;
using detail::lane_shape;
using detail::Strides;

namespace {

Tensor prepare_out(Tensor* out, const Shape& shape) {
  if (out == nullptr) return Tensor::zeros(shape);
  if (!out->defined() || out->shape() != shape) {
    throw DimensionError("destination shape " +
                         (out->defined() ? to_string(out->shape()) : "<none>") +
                         " does not match result shape " + to_string(shape));
  }
  return *out;
}

// Strides of `shape`/`strides` broadcast (right-aligned) against `target`.
Strides broadcast_partial(const Shape& shape, const Strides& strides,
                          const Shape& target, const Shape& full_a,
                          const Shape& full_b) {
  const int r = static_cast<int>(shape.size());
  const int R = static_cast<int>(target.size());
  Strides out(R, 0);
  for (int d = 0; d < r; ++d) {
    const int od = R - r + d;
    if (shape[d] == target[od]) {
      out[od] = strides[d];
    } else if (shape[d] != 1) {
      throw DimensionError("matmul batch dims do not broadcast: " +
                           to_string(full_a) + " x " + to_string(full_b));
    }
  }
  return out;
}

// Output-indexed contraction: out[o] = scale * sum_s a[o,s] * b[o,s] (+ bias[o]).
struct Contraction {
  Shape out_shape;
  Strides a_out, b_out, bias_out;
  Shape sum_extent;
  Strides a_sum, b_sum;
};

void run_contraction(const Contraction& c, const Tensor& a, const Tensor& b,
                     const Tensor* bias, double scale_factor, Tensor& out) {
  const double* pa = a.base();
  const double* pb = b.base();
  const double* pbias = bias ? bias->base() : nullptr;
  double* po = out.mutable_base();
  const Strides& out_strides = out.strides();
  const int nsum = static_cast<int>(c.sum_extent.size());
  const std::array<const Strides*, 4> strides{&c.a_out, &c.b_out, &out_strides,
                                              &c.bias_out};
  std::vector<std::int64_t> idx(nsum, 0);
  for_each_element<4>(
      c.out_shape, strides, {0, 0, 0, 0}, [&](const auto& o) {
        double acc = 0.0;
        if (nsum == 0) {
          acc = pa[o[0]] * pb[o[1]];
        } else if (nsum == 1) {
          std::int64_t ia = o[0], ib = o[1];
          const std::int64_t sa = c.a_sum[0], sb = c.b_sum[0];
          for (std::int64_t t = 0; t < c.sum_extent[0]; ++t) {
            acc += pa[ia] * pb[ib];
            ia += sa;
            ib += sb;
          }
        } else {
          std::fill(idx.begin(), idx.end(), 0);
          std::int64_t ia = o[0], ib = o[1];
          while (true) {
            acc += pa[ia] * pb[ib];
            int d = nsum - 1;
            for (; d >= 0; --d) {
              ++idx[d];
              ia += c.a_sum[d];
              ib += c.b_sum[d];
              if (idx[d] < c.sum_extent[d]) break;
              ia -= c.a_sum[d] * c.sum_extent[d];
              ib -= c.b_sum[d] * c.sum_extent[d];
              idx[d] = 0;
            }
            if (d < 0) break;
          }
        }
        acc *= scale_factor;
        if (pbias) acc += pbias[o[3]];
        po[o[2]] = acc;
      });
}

void check_finite(double v, const char* op) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(op) + ": non-finite input");
  }
}

template <class Fn>
Tensor unary(const Tensor& x, Tensor* out, Fn fn) {
  Tensor y = prepare_out(out, x.shape());
  const double* px = x.base();
  double* py = y.mutable_base();
  for_each_element<2>(x.shape(), {&x.strides(), &y.strides()}, {0, 0},
                      [&](const auto& o) { py[o[1]] = fn(px[o[0]]); });
  return y;
}

template <class Fn>
Tensor binary(const Tensor& a, const Tensor& b, Tensor* out, Fn fn) {
  const Shape shape = broadcast_shapes(a.shape(), b.shape());
  Tensor y = prepare_out(out, shape);
  const Strides sa = broadcast_strides(a, shape);
  const Strides sb = broadcast_strides(b, shape);
  const double* pa = a.base();
  const double* pb = b.base();
  double* py = y.mutable_base();
  for_each_element<3>(shape, {&sa, &sb, &y.strides()}, {0, 0, 0},
                      [&](const auto& o) { py[o[2]] = fn(pa[o[0]], pb[o[1]]); });
  return y;
}

Tensor reduce_axis(const Tensor& x, int axis, Tensor* out, bool mean) {
  const int a = normalize_axis(axis, x.rank());
  Shape out_shape;
  for (int d = 0; d < x.rank(); ++d) {
    if (d != a) out_shape.push_back(x.shape()[d]);
  }
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor y = prepare_out(out, out_shape);
  // Output strides laid over the lane shape (extent 1 at the reduced axis).
  Strides ys(x.rank(), 0);
  if (x.rank() > 1) {
    for (int d = 0, od = 0; d < x.rank(); ++d) {
      if (d != a) ys[d] = y.strides()[od++];
    }
  }
  const std::int64_t n = x.shape()[a];
  const std::int64_t step = x.strides()[a];
  const double* px = x.base();
  double* py = y.mutable_base();
  for_each_element<2>(lane_shape(x.shape(), a), {&x.strides(), &ys}, {0, 0},
                      [&](const auto& o) {
                        double acc = 0.0;
                        for (std::int64_t i = 0; i < n; ++i) {
                          acc += px[o[0] + i * step];
                        }
                        py[o[1]] = mean ? acc / static_cast<double>(n) : acc;
                      });
  return y;
}

}  // namespace

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    const std::int64_t ea = i < r - a.size() ? 1 : a[i - (r - a.size())];
    const std::int64_t eb = i < r - b.size() ? 1 : b[i - (r - b.size())];
    if (ea != eb && ea != 1 && eb != 1) {
      throw DimensionError("shapes " + to_string(a) + " and " + to_string(b) +
                           " do not broadcast");
    }
    out[i] = std::max(ea, eb);
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b, Tensor* out) {
  if (a.rank() < 2 || b.rank() < 2 || a.dim(-1) != b.dim(-2)) {
    throw DimensionError("matmul shape mismatch: " + to_string(a.shape()) +
                         " x " + to_string(b.shape()));
  }
  const Shape a_lead(a.shape().begin(), a.shape().end() - 2);
  const Shape b_lead(b.shape().begin(), b.shape().end() - 2);
  Shape batch;
  try {
    batch = broadcast_shapes(a_lead, b_lead);
  } catch (const DimensionError&) {
    throw DimensionError("matmul batch dims do not broadcast: " +
                         to_string(a.shape()) + " x " + to_string(b.shape()));
  }
  Contraction c;
  c.out_shape = batch;
  c.out_shape.push_back(a.dim(-2));
  c.out_shape.push_back(b.dim(-1));
  const Strides a_lead_str(a.strides().begin(), a.strides().end() - 2);
  const Strides b_lead_str(b.strides().begin(), b.strides().end() - 2);
  c.a_out = broadcast_partial(a_lead, a_lead_str, batch, a.shape(), b.shape());
  c.b_out = broadcast_partial(b_lead, b_lead_str, batch, a.shape(), b.shape());
  c.a_out.push_back(a.strides()[a.rank() - 2]);
  c.a_out.push_back(0);
  c.b_out.push_back(0);
  c.b_out.push_back(b.strides()[b.rank() - 1]);
  c.bias_out.assign(c.out_shape.size(), 0);
  c.sum_extent = {a.dim(-1)};
  c.a_sum = {a.strides()[a.rank() - 1]};
  c.b_sum = {b.strides()[b.rank() - 2]};
  Tensor y = prepare_out(out, c.out_shape);
  run_contraction(c, a, b, nullptr, 1.0, y);
  return y;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias,
              Tensor* out) {
  if (weight.rank() != 2 || x.dim(-1) != weight.dim(0)) {
    throw DimensionError("linear shape mismatch: " + to_string(x.shape()) +
                         " x " + to_string(weight.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(1))) {
    throw DimensionError("linear bias " + to_string(bias.shape()) +
                         " does not match weight " + to_string(weight.shape()));
  }
  Contraction c;
  c.out_shape = x.shape();
  c.out_shape.back() = weight.dim(1);
  const int r = x.rank();
  c.a_out = x.strides();
  c.a_out[r - 1] = 0;
  c.b_out.assign(r, 0);
  c.b_out[r - 1] = weight.strides()[1];
  c.bias_out.assign(r, 0);
  if (bias.defined()) c.bias_out[r - 1] = bias.strides()[0];
  c.sum_extent = {x.dim(-1)};
  c.a_sum = {x.strides()[r - 1]};
  c.b_sum = {weight.strides()[0]};
  Tensor y = prepare_out(out, c.out_shape);
  run_contraction(c, x, weight, bias.defined() ? &bias : nullptr, 1.0, y);
  return y;
}

Tensor contract(const std::string& spec, const Tensor& a, const Tensor& b,
                double scale_factor, Tensor* out) {
  const auto comma = spec.find(',');
  const auto arrow = spec.find("->");
  if (comma == std::string::npos || arrow == std::string::npos ||
      arrow < comma) {
    throw DimensionError("malformed contraction spec '" + spec + "'");
  }
  const std::string la = spec.substr(0, comma);
  const std::string lb = spec.substr(comma + 1, arrow - comma - 1);
  const std::string lo = spec.substr(arrow + 2);
  if (static_cast<int>(la.size()) != a.rank() ||
      static_cast<int>(lb.size()) != b.rank()) {
    throw DimensionError("contraction '" + spec + "' does not match operand shapes " +
                         to_string(a.shape()) + ", " + to_string(b.shape()));
  }
  auto extent_of = [&](char label) -> std::int64_t {
    const auto pa = la.find(label);
    const auto pb = lb.find(label);
    std::int64_t e = -1;
    if (pa != std::string::npos) e = a.shape()[pa];
    if (pb != std::string::npos) {
      if (e >= 0 && e != b.shape()[pb]) {
        throw DimensionError(std::string("contraction label '") + label +
                             "' has mismatched extents in " +
                             to_string(a.shape()) + " and " + to_string(b.shape()));
      }
      e = b.shape()[pb];
    }
    if (e < 0) {
      throw DimensionError(std::string("output label '") + label +
                           "' absent from operands in '" + spec + "'");
    }
    return e;
  };
  auto stride_of = [](const std::string& labels, const Tensor& t, char label) {
    const auto p = labels.find(label);
    return p == std::string::npos ? std::int64_t{0} : t.strides()[p];
  };
  Contraction c;
  for (char l : lo) {
    c.out_shape.push_back(extent_of(l));
    c.a_out.push_back(stride_of(la, a, l));
    c.b_out.push_back(stride_of(lb, b, l));
  }
  c.bias_out.assign(lo.size(), 0);
  std::string summed;
  for (char l : la + lb) {
    if (lo.find(l) == std::string::npos && summed.find(l) == std::string::npos) {
      summed.push_back(l);
    }
  }
  for (char l : summed) {
    c.sum_extent.push_back(extent_of(l));
    c.a_sum.push_back(stride_of(la, a, l));
    c.b_sum.push_back(stride_of(lb, b, l));
  }
  Tensor y = prepare_out(out, c.out_shape);
  run_contraction(c, a, b, nullptr, scale_factor, y);
  return y;
}

Tensor outer(const Tensor& a, const Tensor& b, Tensor* out) {
  Shape shape = a.shape();
  shape.insert(shape.end(), b.shape().begin(), b.shape().end());
  Tensor y = prepare_out(out, shape);
  Strides sa = a.strides();
  sa.resize(shape.size(), 0);
  Strides sb(a.rank(), 0);
  sb.insert(sb.end(), b.strides().begin(), b.strides().end());
  const double* pa = a.base();
  const double* pb = b.base();
  double* py = y.mutable_base();
  for_each_element<3>(shape, {&sa, &sb, &y.strides()}, {0, 0, 0},
                      [&](const auto& o) { py[o[2]] = pa[o[0]] * pb[o[1]]; });
  return y;
}

Tensor softmax(const Tensor& x, int axis, Tensor* out) {
  return fused_softmax_mask_bias(x, Tensor(), Tensor(), axis, 1.0, out);
}

Tensor fused_softmax_mask_bias(const Tensor& x, const Tensor& mask,
                               const Tensor& bias, int axis, double scale_factor,
                               Tensor* out) {
  const int a = normalize_axis(axis, x.rank());
  Tensor y = prepare_out(out, x.shape());
  const Strides zero(x.rank(), 0);
  const Strides sm = mask.defined() ? broadcast_strides(mask, x.shape()) : zero;
  const Strides sb = bias.defined() ? broadcast_strides(bias, x.shape()) : zero;
  const double* px = x.base();
  const double* pm = mask.defined() ? mask.base() : nullptr;
  const double* pb = bias.defined() ? bias.base() : nullptr;
  double* py = y.mutable_base();
  const std::int64_t n = x.shape()[a];
  const std::int64_t xs = x.strides()[a], ms = sm[a], bs = sb[a],
                     ys = y.strides()[a];
  const bool plain = pm == nullptr && pb == nullptr && scale_factor == 1.0;
  for_each_element<4>(
      lane_shape(x.shape(), a), {&x.strides(), &sm, &sb, &y.strides()},
      {0, 0, 0, 0}, [&](const auto& o) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::int64_t i = 0; i < n; ++i) {
          double v = px[o[0] + i * xs];
          check_finite(v, "softmax");
          if (!plain) {
            if (pm) v = v + pm[o[1] + i * ms];
            if (pb) v = v + pb[o[2] + i * bs];
            v = v * scale_factor;
          }
          py[o[3] + i * ys] = v;
          if (v > mx) mx = v;
        }
        double sum = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
          double& v = py[o[3] + i * ys];
          v = std::exp(v - mx);
          sum += v;
        }
        for (std::int64_t i = 0; i < n; ++i) py[o[3] + i * ys] /= sum;
      });
  return y;
}

Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps, Tensor* out) {
  const int a = x.rank() - 1;
  const std::int64_t n = x.shape()[a];
  if (gamma.rank() != 1 || beta.rank() != 1 || gamma.dim(0) != n ||
      beta.dim(0) != n) {
    throw DimensionError("layernorm parameters " + to_string(gamma.shape()) +
                         ", " + to_string(beta.shape()) +
                         " do not match input " + to_string(x.shape()));
  }
  Tensor y = prepare_out(out, x.shape());
  const double* px = x.base();
  const double* pg = gamma.base();
  const double* pb = beta.base();
  double* py = y.mutable_base();
  const std::int64_t xs = x.strides()[a], ys = y.strides()[a];
  const std::int64_t gs = gamma.strides()[0], bs = beta.strides()[0];
  for_each_element<2>(lane_shape(x.shape(), a), {&x.strides(), &y.strides()},
                      {0, 0}, [&](const auto& o) {
                        double sum = 0.0;
                        for (std::int64_t i = 0; i < n; ++i) sum += px[o[0] + i * xs];
                        const double mean = sum / static_cast<double>(n);
                        double var = 0.0;
                        for (std::int64_t i = 0; i < n; ++i) {
                          const double d = px[o[0] + i * xs] - mean;
                          var += d * d;
                        }
                        var /= static_cast<double>(n);
                        const double inv = 1.0 / std::sqrt(var + eps);
                        for (std::int64_t i = 0; i < n; ++i) {
                          py[o[1] + i * ys] =
                              (px[o[0] + i * xs] - mean) * inv * pg[i * gs] +
                              pb[i * bs];
                        }
                      });
  return y;
}

Tensor add(const Tensor& a, const Tensor& b, Tensor* out) {
  return binary(a, b, out, [](double u, double v) { return u + v; });
}

Tensor mul(const Tensor& a, const Tensor& b, Tensor* out) {
  return binary(a, b, out, [](double u, double v) { return u * v; });
}

Tensor sigmoid(const Tensor& x, Tensor* out) {
  return unary(x, out, [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Tensor relu(const Tensor& x, Tensor* out) {
  return unary(x, out, [](double v) { return v > 0.0 ? v : 0.0; });
}

Tensor scale(const Tensor& x, double factor, Tensor* out) {
  return unary(x, out, [factor](double v) { return v * factor; });
}

Tensor mean_over_axis(const Tensor& x, int axis, Tensor* out) {
  return reduce_axis(x, axis, out, true);
}

Tensor sum_over_axis(const Tensor& x, int axis, Tensor* out) {
  return reduce_axis(x, axis, out, false);
}

Tensor permute(const Tensor& x, const std::vector<int>& perm, Tensor* out) {
  if (static_cast<int>(perm.size()) != x.rank()) {
    throw DimensionError("permutation rank does not match " + to_string(x.shape()));
  }
  std::vector<bool> seen(perm.size(), false);
  Shape shape(perm.size());
  Strides xs(perm.size());
  for (std::size_t d = 0; d < perm.size(); ++d) {
    const int p = perm[d];
    if (p < 0 || p >= x.rank() || seen[p]) {
      throw DimensionError("invalid permutation for " + to_string(x.shape()));
    }
    seen[p] = true;
    shape[d] = x.shape()[p];
    xs[d] = x.strides()[p];
  }
  Tensor y = prepare_out(out, shape);
  const double* px = x.base();
  double* py = y.mutable_base();
  for_each_element<2>(shape, {&xs, &y.strides()}, {0, 0},
                      [&](const auto& o) { py[o[1]] = px[o[0]]; });
  return y;
}

Tensor concat_last_axis(const std::vector<Tensor>& parts, Tensor* out) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  Shape shape = parts.front().shape();
  const int last = static_cast<int>(shape.size()) - 1;
  shape[last] = 0;
  for (const auto& p : parts) {
    if (p.rank() != static_cast<int>(shape.size()) ||
        !std::equal(shape.begin(), shape.end() - 1, p.shape().begin())) {
      throw DimensionError("concat shape mismatch: " + to_string(p.shape()) +
                           " vs " + to_string(parts.front().shape()));
    }
    shape[last] += p.shape()[last];
  }
  Tensor y = prepare_out(out, shape);
  std::int64_t start = 0;
  for (const auto& p : parts) {
    Tensor dst = y.slice(last, start, p.shape()[last]);
    const double* pp = p.base();
    double* pd = dst.mutable_base();
    for_each_element<2>(p.shape(), {&p.strides(), &dst.strides()}, {0, 0},
                        [&](const auto& o) { pd[o[1]] = pp[o[0]]; });
    start += p.shape()[last];
  }
  return y;
}

Tensor slice_axis(const Tensor& x, int axis, std::int64_t start,
                  std::int64_t length, Tensor* out) {
  const Tensor view = x.slice(axis, start, length);
  Tensor y = prepare_out(out, view.shape());
  const double* pv = view.base();
  double* py = y.mutable_base();
  for_each_element<2>(view.shape(), {&view.strides(), &y.strides()}, {0, 0},
                      [&](const auto& o) { py[o[1]] = pv[o[0]]; });
  return y;
}

Tensor reshape(const Tensor& x, const Shape& shape, Tensor* out) {
  if (numel(shape) != x.numel()) {
    throw DimensionError("cannot reshape " + to_string(x.shape()) + " to " +
                         to_string(shape));
  }
  Tensor y = prepare_out(out, shape);
  const double* px = x.base();
  double* py = y.mutable_base();
  if (y.is_contiguous()) {
    std::int64_t i = 0;
    for_each_element<1>(x.shape(), {&x.strides()}, {0},
                        [&](const auto& o) { py[i++] = px[o[0]]; });
  } else if (x.is_contiguous()) {
    std::int64_t i = 0;
    for_each_element<1>(shape, {&y.strides()}, {0},
                        [&](const auto& o) { py[o[0]] = px[i++]; });
  } else {
    std::int64_t i = 0;
    const Shape& xs = x.shape();
    for_each_element<1>(shape, {&y.strides()}, {0}, [&](const auto& o) {
      std::int64_t rem = i++, off = 0;
      for (int d = x.rank() - 1; d >= 0; --d) {
        off += (rem % xs[d]) * x.strides()[d];
        rem /= xs[d];
      }
      py[o[0]] = px[off];
    });
  }
  return y;
}

Tensor fused_elementwise(const std::vector<FusedStep>& program,
                         const std::vector<Tensor>& inputs,
                         const Shape& out_shape, Tensor* out) {
  if (program.empty()) throw DimensionError("empty fused program");
  Tensor y = prepare_out(out, out_shape);
  std::vector<Strides> strides;
  std::vector<const double*> ptrs;
  for (const auto& t : inputs) {
    strides.push_back(broadcast_strides(t, out_shape));
    ptrs.push_back(t.base());
  }
  strides.push_back(y.strides());
  const std::size_t n_in = inputs.size();
  for (std::size_t s = 0; s < program.size(); ++s) {
    for (const FusedOperand* op : {&program[s].lhs, &program[s].rhs}) {
      const bool ok = op->from_input
                          ? op->index >= 0 && static_cast<std::size_t>(op->index) < n_in
                          : op->index >= 0 && static_cast<std::size_t>(op->index) < s;
      const bool unary = program[s].kind == FusedOpKind::kSigmoid ||
                         program[s].kind == FusedOpKind::kRelu ||
                         program[s].kind == FusedOpKind::kScale;
      if (!ok && !(unary && op == &program[s].rhs)) {
        throw DimensionError("fused program operand out of range at step " +
                             std::to_string(s));
      }
    }
  }
  double* py = y.mutable_base();
  std::vector<double> vals(program.size());
  detail::for_each_element_dyn(
      out_shape, strides, std::vector<std::int64_t>(n_in + 1, 0),
      [&](const std::int64_t* o) {
        auto fetch = [&](const FusedOperand& op) {
          return op.from_input ? ptrs[op.index][o[op.index]] : vals[op.index];
        };
        for (std::size_t s = 0; s < program.size(); ++s) {
          const FusedStep& st = program[s];
          const double l = fetch(st.lhs);
          switch (st.kind) {
            case FusedOpKind::kAdd:
              vals[s] = l + fetch(st.rhs);
              break;
            case FusedOpKind::kMul:
              vals[s] = l * fetch(st.rhs);
              break;
            case FusedOpKind::kSigmoid:
              vals[s] = 1.0 / (1.0 + std::exp(-l));
              break;
            case FusedOpKind::kRelu:
              vals[s] = l > 0.0 ? l : 0.0;
              break;
            case FusedOpKind::kScale:
              vals[s] = l * st.constant;
              break;
          }
        }
        py[o[n_in]] = vals.back();
      });
  return y;
}

}  // namespace axial
