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


#ifndef AXIAL_DAP_H_
#define AXIAL_DAP_H_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "axial/evoformer.h"
#include "axial/execution.h"
#include "axial/tensor.h"
#include "json.hpp"

namespace axial {

// Simulated devices inside one process. `order` is the sequence in which
// per-device work is run; results must not depend on it. With `concurrent`
// set, each device's local work runs on its own thread.
struct DeviceMesh {
  int n_devices = 1;
  std::vector<int> order;
  bool concurrent = false;

  explicit DeviceMesh(int n);
  // Same mesh with the device execution order shuffled by `seed`.
  DeviceMesh permuted(std::uint64_t seed) const;
  // Runs fn(device) for every device, following `order`.
  void for_each_device(const std::function<void(int)>& fn) const;
};

// Contiguous blocks of a global tensor along `axis`, one per device. Blocks
// differ by at most one element along the axis, larger blocks first.
struct ShardedTensor {
  Shape global_shape;
  int axis = 0;
  std::vector<Tensor> shards;

  int n_devices() const { return static_cast<int>(shards.size()); }
  // Offset and extent of device d's block along `axis`.
  std::int64_t block_start(int d) const;
  std::int64_t block_extent(int d) const;
};

ShardedTensor shard(const Tensor& t, int axis, const DeviceMesh& mesh);
Tensor unshard(const ShardedTensor& st);

enum class Collective { kAllToAll = 0, kAllGather = 1, kAllReduce = 2, kBiasGather = 3 };
inline constexpr int kCollectiveKinds = 4;
const char* collective_name(Collective c);

struct CommCounter {
  std::int64_t count = 0;
  std::int64_t bytes = 0;
};

// Per-device send volume for each collective kind. Bytes are counted at the
// ledger's element size.
class CommLedger {
 public:
  explicit CommLedger(int n_devices = 1, int element_size = kReportElementSize);

  // Adds elements sent by one device.
  void record(int device, Collective kind, std::int64_t elements);
  // One collective call; every device takes part once.
  void record_call(Collective kind);

  int n_devices() const { return static_cast<int>(per_device_.size()); }
  int element_size() const { return element_size_; }
  const CommCounter& at(int device, Collective kind) const {
    return per_device_.at(device)[static_cast<int>(kind)];
  }
  std::int64_t calls(Collective kind) const { return calls_[static_cast<int>(kind)]; }
  std::int64_t total_bytes(Collective kind) const;
  void merge(const CommLedger& other);
  nlohmann::json to_json() const;

 private:
  int element_size_;
  std::vector<std::array<CommCounter, kCollectiveKinds>> per_device_;
  std::array<std::int64_t, kCollectiveKinds> calls_{};
};

// Re-shards along `new_axis`. Each device keeps 1/N of its block and sends
// the other N-1 pieces, so it sends K(N-1)/N^2 for a global size K. Both
// axes must divide evenly by N.
ShardedTensor all_to_all_switch_axis(const ShardedTensor& st, int new_axis, const DeviceMesh& mesh,
                                     CommLedger& ledger, Collective kind = Collective::kAllToAll);

// Ring all-gather: every device ends with the full tensor (one copy per
// device) after forwarding N-1 blocks, K(N-1)/N when blocks are equal.
std::vector<Tensor> all_gather(const ShardedTensor& st, const DeviceMesh& mesh, CommLedger& ledger,
                               Collective kind = Collective::kAllGather);

// Ring reduce-scatter followed by ring all-gather over N equally shaped
// parts; 2K(N-1)/N per device when K splits evenly.
std::vector<Tensor> ring_all_reduce(const std::vector<Tensor>& parts, const DeviceMesh& mesh,
                                    CommLedger& ledger);

struct DapOutput {
  ShardedTensor m;  // sharded along sequences
  ShardedTensor z;  // sharded along rows i
  CommLedger ledger;
};

// One evoformer block with m sharded along s and z along i. Collectives:
//   m s->r before column attention and r->s at the end;
//   z i->j before the incoming triangle update, j->i before row attention,
//   i->j before column attention and j->i at the end;
//   all-gather of the OPM right projection b, of b in the outgoing
//   triangle update and of a in the incoming one;
//   a bias_gather of the MSA row-attention pair bias.
DapOutput dap_evoformer_block(const ShardedTensor& m, const ShardedTensor& z, const BlockParams& p,
                              const DeviceMesh& mesh, int element_size = kReportElementSize);

}  // namespace axial

#endif  // AXIAL_DAP_H_
