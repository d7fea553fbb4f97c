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


#include "axial/dap.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <thread>

#include "axial/errors.h"
#include "axial/evoformer_program.h"

namespace axial {
namespace {

using nlohmann::json;

// Block sizes along an axis of extent `extent` split over n devices.
std::vector<std::int64_t> block_sizes(std::int64_t extent, int n) {
  std::vector<std::int64_t> out(n, extent / n);
  for (int d = 0; d < extent % n; ++d) ++out[d];
  return out;
}

void copy_into(Tensor& dst, const Tensor& src) { slice_axis(src, 0, 0, src.dim(0), &dst); }

// Concatenation along `axis` into a fresh tensor.
Tensor concat_along(const std::vector<Tensor>& parts, int axis) {
  Shape shape = parts.at(0).shape();
  shape[axis] = 0;
  for (const Tensor& p : parts) shape[axis] += p.dim(axis);
  Tensor out = Tensor::zeros(shape);
  std::int64_t off = 0;
  for (const Tensor& p : parts) {
    Tensor view = out.slice(axis, off, p.dim(axis));
    copy_into(view, p);
    off += p.dim(axis);
  }
  return out;
}

void check_mesh(const ShardedTensor& st, const DeviceMesh& mesh) {
  if (st.n_devices() != mesh.n_devices) {
    throw MeshError("tensor has " + std::to_string(st.n_devices()) + " shards but the mesh has " +
                    std::to_string(mesh.n_devices) + " devices");
  }
}

void require_divisible(const Shape& shape, int axis, int n, const char* what) {
  if (shape[axis] < n) {
    throw MeshError(std::string(what) + ": axis " + std::to_string(axis) + " has extent " +
                    std::to_string(shape[axis]) + ", fewer than " + std::to_string(n) + " devices");
  }
  if (shape[axis] % n != 0) {
    throw ShardError(std::string(what) + ": axis " + std::to_string(axis) + " extent " +
                     std::to_string(shape[axis]) + " does not divide over " + std::to_string(n) + " devices");
  }
}

}  // namespace

DeviceMesh::DeviceMesh(int n) : n_devices(n) {
  if (n < 1) throw MeshError("a mesh needs at least one device");
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
}

DeviceMesh DeviceMesh::permuted(std::uint64_t seed) const {
  DeviceMesh out = *this;
  std::mt19937_64 rng(seed);
  std::shuffle(out.order.begin(), out.order.end(), rng);
  return out;
}

void DeviceMesh::for_each_device(const std::function<void(int)>& fn) const {
  if (!concurrent || n_devices == 1) {
    for (int d : order) fn(d);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n_devices);
  for (int d : order) {
    workers.emplace_back([&, d] {
      try {
        fn(d);
      } catch (...) {
        errors[d] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::int64_t ShardedTensor::block_start(int d) const {
  std::int64_t off = 0;
  for (int k = 0; k < d; ++k) off += shards.at(k).dim(axis);
  return off;
}

std::int64_t ShardedTensor::block_extent(int d) const { return shards.at(d).dim(axis); }

ShardedTensor shard(const Tensor& t, int axis, const DeviceMesh& mesh) {
  ShardedTensor st;
  st.global_shape = t.shape();
  st.axis = normalize_axis(axis, t.rank());
  const int n = mesh.n_devices;
  if (t.dim(st.axis) < n) {
    throw MeshError("cannot shard extent " + std::to_string(t.dim(st.axis)) + " over " + std::to_string(n) +
                    " devices");
  }
  std::int64_t off = 0;
  for (std::int64_t len : block_sizes(t.dim(st.axis), n)) {
    st.shards.push_back(slice_axis(t, st.axis, off, len));
    off += len;
  }
  return st;
}

Tensor unshard(const ShardedTensor& st) {
  if (st.shards.empty()) throw ShardError("sharded tensor has no shards");
  Tensor out = concat_along(st.shards, st.axis);
  if (out.shape() != st.global_shape) {
    throw ShardError("shards assemble to " + to_string(out.shape()) + ", expected " + to_string(st.global_shape));
  }
  return out;
}

const char* collective_name(Collective c) {
  switch (c) {
    case Collective::kAllToAll: return "alltoall";
    case Collective::kAllGather: return "allgather";
    case Collective::kAllReduce: return "allreduce";
    case Collective::kBiasGather: return "bias_gather";
  }
  return "?";
}

CommLedger::CommLedger(int n_devices, int element_size)
    : element_size_(element_size), per_device_(n_devices) {
  if (element_size <= 0) throw DomainError("element size must be positive");
}

void CommLedger::record(int device, Collective kind, std::int64_t elements) {
  per_device_.at(device)[static_cast<int>(kind)].bytes += elements * element_size_;
}

void CommLedger::record_call(Collective kind) {
  ++calls_[static_cast<int>(kind)];
  for (auto& dev : per_device_) ++dev[static_cast<int>(kind)].count;
}

std::int64_t CommLedger::total_bytes(Collective kind) const {
  std::int64_t sum = 0;
  for (const auto& dev : per_device_) sum += dev[static_cast<int>(kind)].bytes;
  return sum;
}

void CommLedger::merge(const CommLedger& other) {
  if (other.n_devices() != n_devices() || other.element_size_ != element_size_) {
    throw MeshError("cannot merge ledgers of different meshes");
  }
  for (int d = 0; d < n_devices(); ++d) {
    for (int k = 0; k < kCollectiveKinds; ++k) {
      per_device_[d][k].count += other.per_device_[d][k].count;
      per_device_[d][k].bytes += other.per_device_[d][k].bytes;
    }
  }
  for (int k = 0; k < kCollectiveKinds; ++k) calls_[k] += other.calls_[k];
}

json CommLedger::to_json() const {
  json devices = json::array(), totals = json::object();
  for (const auto& dev : per_device_) {
    json entry = json::object();
    for (int k = 0; k < kCollectiveKinds; ++k) {
      entry[collective_name(static_cast<Collective>(k))] = {{"count", dev[k].count}, {"bytes", dev[k].bytes}};
    }
    devices.push_back(entry);
  }
  for (int k = 0; k < kCollectiveKinds; ++k) {
    const auto kind = static_cast<Collective>(k);
    totals[collective_name(kind)] = {{"calls", calls_[k]}, {"bytes", total_bytes(kind)}};
  }
  return {{"schema", "axialfold.commledger/1"},
          {"element_size", element_size_},
          {"per_device", devices},
          {"totals", totals}};
}

ShardedTensor all_to_all_switch_axis(const ShardedTensor& st, int new_axis, const DeviceMesh& mesh,
                                     CommLedger& ledger, Collective kind) {
  check_mesh(st, mesh);
  const int rank = static_cast<int>(st.global_shape.size());
  new_axis = normalize_axis(new_axis, rank);
  if (new_axis == st.axis) throw ShardError("all-to-all needs a different axis than the current one");
  const int n = mesh.n_devices;
  require_divisible(st.global_shape, st.axis, n, "all-to-all");
  require_divisible(st.global_shape, new_axis, n, "all-to-all");
  ShardedTensor out;
  out.global_shape = st.global_shape;
  out.axis = new_axis;
  out.shards.resize(n);
  if (n == 1) {
    out.shards[0] = st.shards[0];
    return out;
  }
  const std::int64_t old_len = st.global_shape[st.axis] / n;
  const std::int64_t new_len = st.global_shape[new_axis] / n;
  // Device j receives piece j of every device's block along the new axis.
  mesh.for_each_device([&](int j) {
    Shape shape = st.global_shape;
    shape[new_axis] = new_len;
    Tensor dst = Tensor::zeros(shape);
    for (int d = 0; d < n; ++d) {
      const Tensor piece = st.shards[d].slice(new_axis, j * new_len, new_len);
      Tensor view = dst.slice(st.axis, d * old_len, old_len);
      copy_into(view, piece);
    }
    out.shards[j] = std::move(dst);
  });
  for (int d = 0; d < n; ++d) {
    for (int j = 0; j < n; ++j) {
      if (j != d) ledger.record(d, kind, st.shards[d].numel() / n);
    }
  }
  ledger.record_call(kind);
  return out;
}

std::vector<Tensor> all_gather(const ShardedTensor& st, const DeviceMesh& mesh, CommLedger& ledger,
                               Collective kind) {
  check_mesh(st, mesh);
  const int n = mesh.n_devices;
  std::vector<Tensor> out(n);
  if (n == 1) {
    out[0] = st.shards[0];
    return out;
  }
  mesh.for_each_device([&](int d) { out[d] = concat_along(st.shards, st.axis); });
  // Ring: at step t device d forwards block (d - t) mod n to device d + 1.
  for (int t = 0; t < n - 1; ++t) {
    for (int d = 0; d < n; ++d) ledger.record(d, kind, st.shards[((d - t) % n + n) % n].numel());
  }
  ledger.record_call(kind);
  return out;
}

std::vector<Tensor> ring_all_reduce(const std::vector<Tensor>& parts, const DeviceMesh& mesh,
                                    CommLedger& ledger) {
  const int n = mesh.n_devices;
  if (static_cast<int>(parts.size()) != n) {
    throw MeshError("all-reduce got " + std::to_string(parts.size()) + " parts for " + std::to_string(n) +
                    " devices");
  }
  for (const Tensor& p : parts) {
    if (p.shape() != parts[0].shape()) throw DimensionError("all-reduce parts differ in shape");
  }
  std::vector<Tensor> buf(n);
  for (int d = 0; d < n; ++d) buf[d] = parts[d].clone();
  if (n == 1) return buf;
  const std::int64_t total = parts[0].numel();
  const auto sizes = block_sizes(total, n);
  std::vector<std::int64_t> starts(n, 0);
  for (int c = 1; c < n; ++c) starts[c] = starts[c - 1] + sizes[c - 1];
  auto mod = [n](int v) { return ((v % n) + n) % n; };
  // Reduce-scatter: after n-1 steps device d owns the sum of chunk d+1.
  for (int t = 0; t < n - 1; ++t) {
    std::vector<std::vector<double>> sent(n);
    for (int d = 0; d < n; ++d) {
      const int c = mod(d - t);
      const auto v = buf[d].values();
      sent[d].assign(v.begin() + starts[c], v.begin() + starts[c] + sizes[c]);
      ledger.record(d, Collective::kAllReduce, sizes[c]);
    }
    for (int d = 0; d < n; ++d) {
      const int to = mod(d + 1), c = mod(d - t);
      auto v = buf[to].mutable_values();
      for (std::int64_t k = 0; k < sizes[c]; ++k) v[starts[c] + k] += sent[d][k];
    }
  }
  // All-gather of the reduced chunks around the same ring.
  for (int t = 0; t < n - 1; ++t) {
    std::vector<std::vector<double>> sent(n);
    for (int d = 0; d < n; ++d) {
      const int c = mod(d + 1 - t);
      const auto v = buf[d].values();
      sent[d].assign(v.begin() + starts[c], v.begin() + starts[c] + sizes[c]);
      ledger.record(d, Collective::kAllReduce, sizes[c]);
    }
    for (int d = 0; d < n; ++d) {
      const int to = mod(d + 1), c = mod(d + 1 - t);
      auto v = buf[to].mutable_values();
      std::copy(sent[d].begin(), sent[d].end(), v.begin() + starts[c]);
    }
  }
  ledger.record_call(Collective::kAllReduce);
  return buf;
}

DapOutput dap_evoformer_block(const ShardedTensor& m, const ShardedTensor& z, const BlockParams& p,
                              const DeviceMesh& mesh, int element_size) {
  const EvoConfig& cfg = p.config();
  cfg.validate();
  const int n = mesh.n_devices;
  check_mesh(m, mesh);
  check_mesh(z, mesh);
  const Shape m_shape{cfg.n_seq, cfg.n_res, cfg.h_msa};
  const Shape z_shape{cfg.n_res, cfg.n_res, cfg.h_pair};
  if (m.global_shape != m_shape || z.global_shape != z_shape) {
    throw DimensionError("DAP block expects m " + to_string(m_shape) + " and z " + to_string(z_shape) + ", got " +
                         to_string(m.global_shape) + " and " + to_string(z.global_shape));
  }
  if (m.axis != 0 || z.axis != 0) throw ShardError("DAP block expects m sharded along s and z along i");
  require_divisible(m_shape, 0, n, "MSA sequences");
  require_divisible(m_shape, 1, n, "MSA residues");
  require_divisible(z_shape, 0, n, "pair rows");

  DapOutput res{m, z, CommLedger(n, element_size)};
  CommLedger& ledger = res.ledger;
  auto& ms = res.m.shards;
  auto& zs = res.z.shards;
  auto sharded = [](Shape shape, int axis, std::vector<Tensor> shards) {
    return ShardedTensor{std::move(shape), axis, std::move(shards)};
  };
  auto local = [&](const std::function<void(EvoformerProgram<EagerOps>&, int)>& fn) {
    mesh.for_each_device([&](int d) {
      EagerOps ops(p);
      EvoformerProgram<EagerOps> prog(ops, cfg);
      fn(prog, d);
    });
  };
  std::vector<Tensor> a(n), b(n), gate(n);

  // MSA row attention; the pair bias rows live with the z shards.
  std::vector<Tensor> bias(n);
  local([&](auto& prog, int d) { bias[d] = prog.msa_pair_bias(zs[d]); });
  const auto full_bias = all_gather(sharded({cfg.n_res, cfg.n_res, cfg.n_head_msa}, 0, bias), mesh, ledger,
                                    Collective::kBiasGather);
  local([&](auto& prog, int d) { ms[d] = add(ms[d], prog.msa_row_attention(ms[d], full_bias[d])); });

  // Column attention and transition with m split over residues.
  res.m = all_to_all_switch_axis(res.m, 1, mesh, ledger);
  local([&](auto& prog, int d) {
    ms[d] = add(ms[d], prog.msa_col_attention(ms[d]));
    ms[d] = add(ms[d], prog.transition(ms[d], Stack::kMsa));
  });

  // Outer product mean: local a gives rows i, b is gathered over j.
  local([&](auto& prog, int d) {
    auto pr = prog.opm_projections(ms[d]);
    a[d] = pr.a;
    b[d] = pr.b;
  });
  const auto full_b = all_gather(sharded({cfg.n_seq, cfg.n_res, cfg.hidden_proj}, 1, b), mesh, ledger);
  local([&](auto& prog, int d) { zs[d] = add(zs[d], prog.opm_combine(a[d], full_b[d])); });
  res.m = all_to_all_switch_axis(res.m, 0, mesh, ledger);

  // Outgoing triangle update with z split over rows i.
  const Shape proj{cfg.n_res, cfg.n_res, cfg.hidden_proj};
  local([&](auto& prog, int d) {
    auto t = prog.tri_projections(zs[d], "tri_out");
    gate[d] = t.gate;
    a[d] = t.a;
    b[d] = t.b;
  });
  const auto out_b = all_gather(sharded(proj, 0, b), mesh, ledger);
  local([&](auto& prog, int d) {
    zs[d] = add(zs[d], prog.tri_outgoing_combine({gate[d], a[d], out_b[d]}));
  });

  // Incoming triangle update with z split over columns j.
  res.z = all_to_all_switch_axis(res.z, 1, mesh, ledger);
  local([&](auto& prog, int d) {
    auto t = prog.tri_projections(zs[d], "tri_in");
    gate[d] = t.gate;
    a[d] = t.a;
    b[d] = t.b;
  });
  const auto in_a = all_gather(sharded(proj, 1, a), mesh, ledger);
  local([&](auto& prog, int d) {
    zs[d] = add(zs[d], prog.tri_incoming_combine({gate[d], in_a[d], b[d]}));
  });

  // Row attention needs whole rows, column attention whole columns.
  res.z = all_to_all_switch_axis(res.z, 0, mesh, ledger);
  local([&](auto& prog, int d) { zs[d] = add(zs[d], prog.pair_attention_row(zs[d])); });
  res.z = all_to_all_switch_axis(res.z, 1, mesh, ledger);
  local([&](auto& prog, int d) {
    zs[d] = add(zs[d], prog.pair_attention_col(zs[d]));
    zs[d] = add(zs[d], prog.transition(zs[d], Stack::kPair));
  });
  res.z = all_to_all_switch_axis(res.z, 0, mesh, ledger);
  return res;
}

}  // namespace axial
