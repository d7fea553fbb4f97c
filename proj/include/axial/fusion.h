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

#ifndef AXIAL_FUSION_H_
#define AXIAL_FUSION_H_

#include "axial/graph.h"

namespace axial {

// Linears that read the same activation with the same input width become one
// linear over concatenated weight columns followed by a slice per original
// output. A group is merged only when the estimated peak does not grow.
Graph fuse_merge_gemm(const Graph& g);

// Collapses (add ->) (scale ->) softmax into fused_softmax, then chains of
// add/mul/sigmoid/relu/scale whose intermediates have a single consumer into
// fused_elementwise nodes. Each rewrite is kept only when the estimated peak
// does not grow.
Graph fuse_elementwise(const Graph& g);

}  // namespace axial

#endif  // AXIAL_FUSION_H_
