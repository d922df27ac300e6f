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
#include "grouprec/priors/group_fusion.hpp"

#include <cmath>

#include "grouprec/autograd/ops.hpp"
#include "grouprec/util/error.hpp"

namespace grouprec::priors {

namespace ops = autograd::ops;
using autograd::Graph;
using autograd::Tensor;

GroupIdFusionNet GroupIdFusionNet::init(std::size_t levels, std::size_t k,
                                        std::size_t embed_dim,
                                        std::size_t out_dim, Rng& rng) {
  require(levels >= 1, "group fusion: levels must be >= 1");
  require(k >= 1, "group fusion: k must be >= 1");
  require(embed_dim >= 1, "group fusion: embed_dim must be >= 1");
  require(out_dim >= 1, "group fusion: out_dim must be >= 1");

  GroupIdFusionNet net;
  net.levels = levels;
  net.k = k;
  net.embed_dim = embed_dim;
  net.out_dim = out_dim;

  for (std::size_t l = 0; l < levels; ++l) {
    net.tables.push_back(Tensor::randn({k, embed_dim}, rng, 0.1));
  }
  const double fuse_std = 1.0 / std::sqrt(2.0 * static_cast<double>(embed_dim));
  for (std::size_t l = 1; l < levels; ++l) {
    net.fuse_weights.push_back(
        Tensor::randn({2 * embed_dim, embed_dim}, rng, fuse_std));
    net.fuse_biases.push_back(Tensor::zeros({embed_dim}, true));
  }
  const std::size_t concat_dim = levels * embed_dim;
  const std::size_t hidden = net.hidden_dim();
  net.mlp_w1 = Tensor::randn({concat_dim, hidden}, rng,
                             1.0 / std::sqrt(static_cast<double>(concat_dim)));
  net.mlp_b1 = Tensor::zeros({hidden}, true);
  net.mlp_w2 = Tensor::randn({hidden, out_dim}, rng,
                             1.0 / std::sqrt(static_cast<double>(hidden)));
  net.mlp_b2 = Tensor::zeros({out_dim}, true);
  return net;
}

std::vector<Tensor> GroupIdFusionNet::parameters() const {
  std::vector<Tensor> params;
  for (const auto& t : tables) params.push_back(t);
  for (const auto& t : fuse_weights) params.push_back(t);
  for (const auto& t : fuse_biases) params.push_back(t);
  params.push_back(mlp_w1);
  params.push_back(mlp_b1);
  params.push_back(mlp_w2);
  params.push_back(mlp_b2);
  return params;
}

Tensor fuse_group_ids(Graph& graph, const GroupIdFusionNet& net,
                      const std::vector<grouper::GroupCode>& codes) {
  require(!codes.empty(), "group fusion: empty code batch");
  require(net.levels >= 1 && net.tables.size() == net.levels,
          "group fusion: net has ", net.tables.size(), " tables for ",
          net.levels, " levels");

  // Gather per-level ids, validating every code up front.
  std::vector<std::vector<std::size_t>> level_ids(
      net.levels, std::vector<std::size_t>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) {
    require(codes[i].indices.size() == net.levels, "group fusion: code ", i,
            " has ", codes[i].indices.size(), " levels, expected ",
            net.levels);
    for (std::size_t l = 0; l < net.levels; ++l) {
      const std::size_t index = codes[i].indices[l];
      require(index < net.k, "group fusion: code ", i, " level ", l + 1,
              " index ", index, " out of range [0, ", net.k, ")");
      level_ids[l][i] = index;
    }
  }

  std::vector<Tensor> fused;  // per-level fused embeddings, [batch, d_e]
  fused.reserve(net.levels);
  for (std::size_t l = 0; l < net.levels; ++l) {
    Tensor base = ops::embedding_lookup(graph, net.tables[l], level_ids[l]);
    if (l == 0) {
      fused.push_back(base);  // level 1 passes through by definition
      continue;
    }
    Tensor joint = ops::concat_cols(graph, {fused.back(), base});
    Tensor mixed = ops::matmul(graph, joint, net.fuse_weights[l - 1]);
    fused.push_back(
        ops::tanh(graph, ops::add(graph, mixed, net.fuse_biases[l - 1])));
  }

  Tensor concat =
      net.levels == 1 ? fused.front() : ops::concat_cols(graph, fused);
  Tensor hidden = ops::relu(
      graph,
      ops::add(graph, ops::matmul(graph, concat, net.mlp_w1), net.mlp_b1));
  Tensor out =
      ops::add(graph, ops::matmul(graph, hidden, net.mlp_w2), net.mlp_b2);
  return ops::l2_normalize_rows(graph, out);
}

}  // namespace grouprec::priors
