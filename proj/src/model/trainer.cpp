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
#include "grouprec/model/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "grouprec/autograd/adagrad.hpp"
#include "grouprec/util/error.hpp"

namespace grouprec::model {

void TrainConfig::validate() const {
  require(epochs >= 1, "train config: epochs must be >= 1");
  require(batch_size >= 1, "train config: batch_size must be >= 1");
  require(lr_start > 0.0 && lr_floor > 0.0,
          "train config: learning rates must be positive");
  require(lr_floor <= lr_start,
          "train config: lr_floor must not exceed lr_start");
}

TrainStats train_model(DualChannelModel& model, const FeatureBuilder& features,
                       const std::vector<synth::ImpressionExample>& impressions,
                       const TrainConfig& config, Rng& rng) {
  config.validate();
  require(!impressions.empty(), "train: no impressions");

  const std::size_t n = impressions.size();
  const std::size_t batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t planned_steps = config.epochs * batches_per_epoch;
  const std::size_t decay_steps =
      config.lr_decay_steps == 0 ? planned_steps : config.lr_decay_steps;

  autograd::Adagrad optimizer(model.parameters(), config.lr_start,
                              config.lr_floor, decay_steps);

  std::vector<synth::ImpressionExample> order(impressions);

  TrainStats stats;
  stats.epochs.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    EpochStats epoch_stats;
    double gate_open = 0.0;
    std::size_t gated_examples = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, n);
      ExampleBatch batch = features.make_batch(order, begin, end);
      Graph graph;
      ForwardResult result = forward_batch(graph, model, batch);
      graph.backward(result.total_loss);
      optimizer.step();

      epoch_stats.mean_total_loss += result.total_loss.item();
      epoch_stats.mean_bce += result.bce_loss.item();
      epoch_stats.mean_distill += result.distill_loss.item();
      gate_open += std::accumulate(result.gates.begin(), result.gates.end(), 0.0);
      gated_examples += result.gates.size();
      ++epoch_stats.batches;
    }
    epoch_stats.mean_total_loss /= double(epoch_stats.batches);
    epoch_stats.mean_bce /= double(epoch_stats.batches);
    epoch_stats.mean_distill /= double(epoch_stats.batches);
    epoch_stats.gate_rate =
        gated_examples == 0 ? 0.0 : gate_open / double(gated_examples);
    stats.epochs.push_back(epoch_stats);
  }
  return stats;
}

std::vector<double> score_examples(
    const DualChannelModel& model, const FeatureBuilder& features,
    const std::vector<synth::ImpressionExample>& impressions,
    std::size_t batch_size) {
  require(batch_size >= 1, "score: batch_size must be >= 1");
  std::vector<double> scores;
  scores.reserve(impressions.size());
  for (std::size_t begin = 0; begin < impressions.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, impressions.size());
    ExampleBatch batch = features.make_batch(impressions, begin, end);
    Graph graph;
    ForwardResult result = forward_batch(graph, model, batch);
    for (std::size_t i = 0; i < batch.size; ++i) {
      scores.push_back(autograd::ops::sigmoid_value(result.fused_logits.at(i, 0)));
    }
  }
  return scores;
}

}  // namespace grouprec::model
