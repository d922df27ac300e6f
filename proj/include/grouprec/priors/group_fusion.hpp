/* Copyright 2026 The grouprec Authors. All Rights Reserved.

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
// Learnable hierarchy-aware embedding of group codes.
//
// Each code level has its own embedding table. Level 1 passes through as-is;
//each deeper level fuses its parent's fused vector with its own base vector
// through tanh(W [parent; base] + b), so a child group's representation is
// conditioned on the whole prefix path. The per-level fused vectors are
// concatenated, passed through a one-hidden-layer MLP (ReLU, width
// 2*levels*embed_dim), and L2-normalized row-wise. The whole computation is
// differentiable into every table and weight.
#ifndef GROUPREC_PRIORS_GROUP_FUSION_HPP_
#define GROUPREC_PRIORS_GROUP_FUSION_HPP_

#include <cstddef>
#include <vector>

#include "grouprec/autograd/tensor.hpp"
#include "grouprec/grouper/rq_kmeans.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::priors {

struct GroupIdFusionNet {
  std::size_t levels = 0;     // stages in the group code (M)
  std::size_t k = 0;          // rows per embedding table
  std::size_t embed_dim = 0;  // per-level embedding width
  std::size_t out_dim = 0;    // final embedding width

  std::vector<autograd::Tensor> tables;        // levels x [k, embed_dim]
  std::vector<autograd::Tensor> fuse_weights;  // levels-1 x [2*embed_dim, embed_dim]
  std::vector<autograd::Tensor> fuse_biases;   // levels-1 x [embed_dim]
  autograd::Tensor mlp_w1;  // [levels*embed_dim, hidden]
  autograd::Tensor mlp_b1;  // [hidden]
  autograd::Tensor mlp_w2;  // [hidden, out_dim]
  autograd::Tensor mlp_b2;  // [out_dim]

  // Deterministic initialization: tables first (level ascending), then the
  // fusion weights, then the aggregation MLP, all drawn from `rng`.
  static GroupIdFusionNet init(std::size_t levels, std::size_t k,
                               std::size_t embed_dim, std::size_t out_dim,
                               Rng& rng);

  std::size_t hidden_dim() const { return 2 * levels * embed_dim; }
  std::vector<autograd::Tensor> parameters() const;
};

// Embeds a batch of codes: returns [batch, out_dim] with unit-norm rows.
// Throws when a code's length or any index disagrees with the net shape.
autograd::Tensor fuse_group_ids(autograd::Graph& graph,
                                const GroupIdFusionNet& net,
                                const std::vector<grouper::GroupCode>& codes);

}  // namespace grouprec::priors

#endif  // GROUPREC_PRIORS_GROUP_FUSION_HPP_
