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
// Minibatch training loop and batched inference for the dual-channel model.
#ifndef GROUPREC_MODEL_TRAINER_HPP_
#define GROUPREC_MODEL_TRAINER_HPP_

#include <cstddef>
#include <vector>

#include "grouprec/model/features.hpp"
#include "grouprec/model/model.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::model {

struct TrainConfig {
  std::size_t epochs = 3;
  std::size_t batch_size = 1024;
  double lr_start = 0.01;
  double lr_floor = 0.001;
  // 0 means "decay over exactly the planned number of steps".
  std::size_t lr_decay_steps = 0;

  void validate() const;
};

struct EpochStats {
  double mean_total_loss = 0.0;
  double mean_bce = 0.0;
  double mean_distill = 0.0;
  double gate_rate = 0.0;  // fraction of examples with an open distill gate
  std::size_t batches = 0;
};

struct TrainStats {
  std::vector<EpochStats> epochs;
};

// Shuffles a copy of `impressions` each epoch with `rng`, builds batches
// through `features`, and applies one Adagrad step per batch. Deterministic
// given (model init, impressions, config, rng state).
TrainStats train_model(DualChannelModel& model, const FeatureBuilder& features,
                       const std::vector<synth::ImpressionExample>& impressions,
                       const TrainConfig& config, Rng& rng);

// Fused-channel conversion probabilities, sigma(z_fused), in example order.
// Builds no gradients.
std::vector<double> score_examples(
    const DualChannelModel& model, const FeatureBuilder& features,
    const std::vector<synth::ImpressionExample>& impressions,
    std::size_t batch_size = 1024);

}  // namespace grouprec::model

#endif  // GROUPREC_MODEL_TRAINER_HPP_
