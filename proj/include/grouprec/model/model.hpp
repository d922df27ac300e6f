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
// Dual-channel conversion ranker: an individual channel over a user's own
// history and a group channel over shared group priors, coupled through
// one-way feature injection, gated distillation, and adaptive logit fusion.
#ifndef GROUPREC_MODEL_MODEL_HPP_
#define GROUPREC_MODEL_MODEL_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/autograd/ops.hpp"
#include "grouprec/autograd/tensor.hpp"
#include "grouprec/model/features.hpp"
#include "grouprec/priors/group_fusion.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::model {

using autograd::Graph;
using autograd::Tensor;

// Every mode disables exactly the mechanism its name describes; `full`
// enables everything. `hashed_grouping` marks runs whose grouping stage
// used id-hash vectors instead of profile embeddings -- the network wiring
// is identical to `full`, the difference lives in the upstream artifact.
enum class ModelMode {
  full,
  individual_only,
  group_only,
  hashed_grouping,
  no_group_id_embedding,
  no_group_attributes,
  no_group_sequence,
  single_channel,
  no_distillation,
  no_injection,
  kl_distillation,
  zero_margin,
};

std::string to_string(ModelMode mode);
ModelMode model_mode_from_string(const std::string& name);
const std::vector<ModelMode>& all_model_modes();

// Knobs of the gated teacher->student transfer from the individual channel
// (teacher) into the group channel (student).
struct DistillConfig {
  double temperature = 2.0;           // softens both logits before comparing
  double margin = 0.05;               // tolerated probability gap
  long long activity_threshold = 8;   // minimum purchases for a teacher
  double confidence_threshold = 0.3;  // required |sigma(z) - 0.5|, in (0, 0.5)
  double weight = 0.005;              // loss coefficient, >= 0

  void validate() const;
};

struct ModelConfig {
  FeatureSpaces spaces;

  std::size_t id_dim = 16;
  std::size_t attr_dim = 4;
  std::size_t context_dim = 4;
  std::size_t item_dim = 16;
  std::size_t category_dim = 8;
  std::size_t group_embed_dim = 16;  // per-level table width in the fusion net
  std::size_t group_dim = 32;        // fused group embedding width
  std::size_t tower_hidden1 = 64;
  std::size_t tower_hidden2 = 32;
  std::size_t inject_hidden = 32;
  std::size_t attention_hidden = 16;
  std::size_t reliability_hidden = 8;
  double attribute_value_scale = 0.1;  // completed attrs are multiplied by this

  DistillConfig distill;
  ModelMode mode = ModelMode::full;

  void validate() const;
  std::size_t sequence_dim() const { return item_dim + category_dim; }
  std::size_t individual_input_dim() const;
  std::size_t group_input_dim() const;
  std::size_t single_input_dim() const;
  // Whether this mode runs the distillation objective at all.
  bool distillation_active() const;
};

// Scoring MLP of the candidate-conditioned attention pooling.
struct AttentionParams {
  Tensor score_w1, score_b1, score_w2, score_b2;
};

// Two hidden layers plus a logit head; `w1`'s output is the tap injected
// across channels, `w2`'s output is where the injection lands.
struct TowerParams {
  Tensor w1, b1, w2, b2, head_w, head_b;
};

struct DualChannelModel {
  ModelConfig config;

  Tensor user_table;       // [num_users, id_dim]
  Tensor attribute_table;  // [fields*(cardinality+1), attr_dim]
  Tensor context_table;    // [context_buckets, context_dim]
  Tensor item_table;       // [num_items, item_dim], shared by both channels
  Tensor category_table;   // [num_categories, category_dim], shared

  priors::GroupIdFusionNet group_fusion;

  AttentionParams individual_attention, group_attention;
  TowerParams individual_tower, group_tower, single_tower;

  Tensor inject_w1, inject_b1, inject_w2, inject_b2;

  Tensor reliability_w1, reliability_b1;
  Tensor distill_head_w, distill_head_b;  // alpha_distill
  Tensor fusion_head_w, fusion_head_b;    // alpha_fusion

  // Draws every weight the architecture can use, in a fixed order that does
  // not depend on the mode, so runs differing only in mode share identical
  // initial weights for the parts they have in common.
  static DualChannelModel init(const ModelConfig& config, Rng& rng);

  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
};

// --- standalone building blocks (independently testable) -------------------

// Candidate-conditioned pooling over a padded sequence. `sequence` holds
// batch*len rows laid out example-major; `mask` adds 0 to real positions and
// a large negative value to pads; rows of examples whose `nonempty` entry is
// zero come out as exact zero vectors.
Tensor target_attention(Graph& g, const AttentionParams& params,
                        const Tensor& sequence, const Tensor& candidate,
                        const std::vector<double>& mask, std::size_t len,
                        const std::vector<double>& nonempty);

// h_fuse = W2 * relu(W1 [group_mid; individual_mid] + b1) + b2.
Tensor asymmetric_inject(Graph& g, const Tensor& group_mid,
                         const Tensor& individual_mid, const Tensor& w1,
                         const Tensor& b1, const Tensor& w2, const Tensor& b2);

// Per-example squared hinge on the tempered probability gap,
// max(0, |sigma(t/T) - sigma(s/T)| - m)^2. The teacher is a constant
// target: no gradient flows into `teacher_logits`.
Tensor margin_distill_loss(Graph& g, const Tensor& teacher_logits,
                           const Tensor& student_logits, double temperature,
                           double margin);

// Per-example binary KL(teacher || student) on tempered probabilities, the
// conventional distillation objective kept for comparison runs. Teacher is
// a constant target here as well.
Tensor kl_distill_loss(Graph& g, const Tensor& teacher_logits,
                       const Tensor& student_logits, double temperature);

// 1 iff the example is activity-qualified AND the teacher is confident
// (strict inequality on the confidence side).
bool qualification_gate(double activity_count, double teacher_logit,
                        const DistillConfig& distill);

// (1 - alpha) * individual + alpha * group, elementwise over [B, 1] logits.
Tensor fuse_logits(Graph& g, const Tensor& individual, const Tensor& group,
                   const Tensor& alpha);

// --- full forward pass ------------------------------------------------------

struct ForwardResult {
  Tensor individual_logits;  // [B, 1]
  Tensor group_logits;       // [B, 1] (zeros when the channel is off)
  Tensor fused_logits;       // [B, 1], what evaluation scores
  Tensor alpha_fusion;       // [B, 1]
  Tensor alpha_distill;      // [B, 1]
  std::vector<double> gates;  // per-example {0,1}; empty when distillation off
  Tensor bce_loss;      // scalar
  Tensor distill_loss;  // scalar (mean of gated per-example losses)
  Tensor total_loss;    // scalar: bce + weight * distill
};

ForwardResult forward_batch(Graph& g, const DualChannelModel& model,
                            const ExampleBatch& batch);

// Checkpointing via the autograd parameter file; loading requires the model
// to have been built with a config producing identical parameter shapes.
void save_model(const DualChannelModel& model, const std::string& path);
void load_model(DualChannelModel& model, const std::string& path);

}  // namespace grouprec::model

#endif  // GROUPREC_MODEL_MODEL_HPP_
