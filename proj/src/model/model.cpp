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
#include "grouprec/model/model.hpp"

#include <cmath>

#include "grouprec/autograd/checkpoint.hpp"
#include "grouprec/util/error.hpp"

namespace grouprec::model {

namespace O = autograd::ops;

namespace {

const std::vector<std::pair<ModelMode, const char*>>& mode_names() {
  static const std::vector<std::pair<ModelMode, const char*>> names = {
      {ModelMode::full, "full"},
      {ModelMode::individual_only, "individual_only"},
      {ModelMode::group_only, "group_only"},
      {ModelMode::hashed_grouping, "hashed_grouping"},
      {ModelMode::no_group_id_embedding, "no_group_id_embedding"},
      {ModelMode::no_group_attributes, "no_group_attributes"},
      {ModelMode::no_group_sequence, "no_group_sequence"},
      {ModelMode::single_channel, "single_channel"},
      {ModelMode::no_distillation, "no_distillation"},
      {ModelMode::no_injection, "no_injection"},
      {ModelMode::kl_distillation, "kl_distillation"},
      {ModelMode::zero_margin, "zero_margin"},
  };
  return names;
}

double softplus_value(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

Tensor linear(Graph& g, const Tensor& x, const Tensor& w, const Tensor& b) {
  return O::add(g, O::matmul(g, x, w), b);
}

}  // namespace

std::string to_string(ModelMode mode) {
  for (const auto& [value, name] : mode_names()) {
    if (value == mode) return name;
  }
  fail("unknown model mode value ", static_cast<int>(mode));
}

ModelMode model_mode_from_string(const std::string& name) {
  for (const auto& [value, mode_name] : mode_names()) {
    if (name == mode_name) return value;
  }
  fail("unknown model mode \"", name, "\"");
}

const std::vector<ModelMode>& all_model_modes() {
  static const std::vector<ModelMode> modes = [] {
    std::vector<ModelMode> out;
    for (const auto& [value, name] : mode_names()) out.push_back(value);
    return out;
  }();
  return modes;
}

void DistillConfig::validate() const {
  require(temperature > 0.0, "distill config: temperature must be positive");
  require(margin >= 0.0, "distill config: margin must be non-negative");
  require(activity_threshold >= 0,
          "distill config: activity_threshold must be non-negative");
  require(confidence_threshold > 0.0 && confidence_threshold < 0.5,
          "distill config: confidence_threshold must be in (0, 0.5), got ",
          confidence_threshold);
  require(weight >= 0.0, "distill config: weight must be non-negative");
}

void ModelConfig::validate() const {
  require(spaces.num_users >= 1 && spaces.num_items >= 1 &&
              spaces.num_categories >= 1,
          "model config: empty vocabulary in feature spaces");
  require(spaces.attribute_fields >= 1 && spaces.attribute_cardinality >= 1,
          "model config: attribute space is empty");
  require(spaces.context_buckets >= 1, "model config: no context buckets");
  require(spaces.group_levels >= 1 && spaces.group_k >= 1,
          "model config: group code space is empty");
  require(id_dim >= 1 && attr_dim >= 1 && context_dim >= 1 && item_dim >= 1 &&
              category_dim >= 1 && group_embed_dim >= 1 && group_dim >= 1,
          "model config: embedding dims must be >= 1");
  require(tower_hidden1 >= 1 && tower_hidden2 >= 1 && inject_hidden >= 1 &&
              attention_hidden >= 1 && reliability_hidden >= 1,
          "model config: hidden dims must be >= 1");
  require(attribute_value_scale > 0.0,
          "model config: attribute_value_scale must be positive");
  distill.validate();
}

std::size_t ModelConfig::individual_input_dim() const {
  return id_dim + spaces.attribute_fields * attr_dim + context_dim +
         2 * sequence_dim();
}

std::size_t ModelConfig::group_input_dim() const {
  return group_dim + 4 * spaces.attribute_fields + 2 * sequence_dim();
}

std::size_t ModelConfig::single_input_dim() const {
  return individual_input_dim() + group_input_dim() - sequence_dim();
}

bool ModelConfig::distillation_active() const {
  switch (mode) {
    case ModelMode::individual_only:
    case ModelMode::group_only:
    case ModelMode::single_channel:
    case ModelMode::no_distillation:
      return false;
    default:
      return true;
  }
}

namespace {

AttentionParams init_attention(std::size_t input_dim, std::size_t hidden,
                               Rng& rng) {
  AttentionParams params;
  params.score_w1 = Tensor::randn({input_dim, hidden}, rng,
                                  1.0 / std::sqrt(double(input_dim)));
  params.score_b1 = Tensor::zeros({hidden}, true);
  params.score_w2 =
      Tensor::randn({hidden, 1}, rng, 1.0 / std::sqrt(double(hidden)));
  params.score_b2 = Tensor::zeros({1}, true);
  return params;
}

TowerParams init_tower(std::size_t input_dim, std::size_t hidden1,
                       std::size_t hidden2, Rng& rng) {
  TowerParams tower;
  tower.w1 = Tensor::randn({input_dim, hidden1}, rng,
                           1.0 / std::sqrt(double(input_dim)));
  tower.b1 = Tensor::zeros({hidden1}, true);
  tower.w2 =
      Tensor::randn({hidden1, hidden2}, rng, 1.0 / std::sqrt(double(hidden1)));
  tower.b2 = Tensor::zeros({hidden2}, true);
  tower.head_w =
      Tensor::randn({hidden2, 1}, rng, 1.0 / std::sqrt(double(hidden2)));
  tower.head_b = Tensor::zeros({1}, true);
  return tower;
}

}  // namespace

DualChannelModel DualChannelModel::init(const ModelConfig& config, Rng& rng) {
  config.validate();
  DualChannelModel model;
  model.config = config;
  const auto& spaces = config.spaces;

  model.user_table = Tensor::randn({spaces.num_users, config.id_dim}, rng, 0.1);
  model.attribute_table = Tensor::randn(
      {spaces.attribute_fields * (spaces.attribute_cardinality + 1),
       config.attr_dim},
      rng, 0.1);
  model.context_table =
      Tensor::randn({spaces.context_buckets, config.context_dim}, rng, 0.1);
  model.item_table =
      Tensor::randn({spaces.num_items, config.item_dim}, rng, 0.1);
  model.category_table =
      Tensor::randn({spaces.num_categories, config.category_dim}, rng, 0.1);

  model.group_fusion = priors::GroupIdFusionNet::init(
      spaces.group_levels, spaces.group_k, config.group_embed_dim,
      config.group_dim, rng);

  const std::size_t score_in = 3 * config.sequence_dim();
  model.individual_attention =
      init_attention(score_in, config.attention_hidden, rng);
  model.group_attention =
      init_attention(score_in, config.attention_hidden, rng);

  model.individual_tower = init_tower(config.individual_input_dim(),
                                      config.tower_hidden1,
                                      config.tower_hidden2, rng);
  model.group_tower = init_tower(config.group_input_dim(),
                                 config.tower_hidden1, config.tower_hidden2,
                                 rng);
  model.single_tower = init_tower(config.single_input_dim(),
                                  config.tower_hidden1, config.tower_hidden2,
                                  rng);

  model.inject_w1 =
      Tensor::randn({2 * config.tower_hidden1, config.inject_hidden}, rng,
                    1.0 / std::sqrt(double(2 * config.tower_hidden1)));
  model.inject_b1 = Tensor::zeros({config.inject_hidden}, true);
  model.inject_w2 =
      Tensor::randn({config.inject_hidden, config.tower_hidden2}, rng,
                    1.0 / std::sqrt(double(config.inject_hidden)));
  model.inject_b2 = Tensor::zeros({config.tower_hidden2}, true);

  model.reliability_w1 = Tensor::randn({3, config.reliability_hidden}, rng,
                                       1.0 / std::sqrt(3.0));
  model.reliability_b1 = Tensor::zeros({config.reliability_hidden}, true);
  model.distill_head_w =
      Tensor::randn({config.reliability_hidden, 1}, rng,
                    1.0 / std::sqrt(double(config.reliability_hidden)));
  model.distill_head_b = Tensor::zeros({1}, true);
  model.fusion_head_w =
      Tensor::randn({config.reliability_hidden, 1}, rng,
                    1.0 / std::sqrt(double(config.reliability_hidden)));
  model.fusion_head_b = Tensor::zeros({1}, true);
  return model;
}

std::vector<std::pair<std::string, Tensor>> DualChannelModel::named_parameters()
    const {
  std::vector<std::pair<std::string, Tensor>> params;
  const auto add = [&](const std::string& name, const Tensor& t) {
    params.emplace_back(name, t);
  };
  add("user_table", user_table);
  add("attribute_table", attribute_table);
  add("context_table", context_table);
  add("item_table", item_table);
  add("category_table", category_table);
  for (std::size_t l = 0; l < group_fusion.tables.size(); ++l) {
    add("group_fusion.table" + std::to_string(l + 1), group_fusion.tables[l]);
  }
  for (std::size_t l = 0; l < group_fusion.fuse_weights.size(); ++l) {
    add("group_fusion.fuse_w" + std::to_string(l + 2),
        group_fusion.fuse_weights[l]);
    add("group_fusion.fuse_b" + std::to_string(l + 2),
        group_fusion.fuse_biases[l]);
  }
  add("group_fusion.mlp_w1", group_fusion.mlp_w1);
  add("group_fusion.mlp_b1", group_fusion.mlp_b1);
  add("group_fusion.mlp_w2", group_fusion.mlp_w2);
  add("group_fusion.mlp_b2", group_fusion.mlp_b2);
  const auto add_attention = [&](const std::string& prefix,
                                 const AttentionParams& a) {
    add(prefix + ".w1", a.score_w1);
    add(prefix + ".b1", a.score_b1);
    add(prefix + ".w2", a.score_w2);
    add(prefix + ".b2", a.score_b2);
  };
  add_attention("individual_attention", individual_attention);
  add_attention("group_attention", group_attention);
  const auto add_tower = [&](const std::string& prefix, const TowerParams& t) {
    add(prefix + ".w1", t.w1);
    add(prefix + ".b1", t.b1);
    add(prefix + ".w2", t.w2);
    add(prefix + ".b2", t.b2);
    add(prefix + ".head_w", t.head_w);
    add(prefix + ".head_b", t.head_b);
  };
  add_tower("individual_tower", individual_tower);
  add_tower("group_tower", group_tower);
  add_tower("single_tower", single_tower);
  add("inject.w1", inject_w1);
  add("inject.b1", inject_b1);
  add("inject.w2", inject_w2);
  add("inject.b2", inject_b2);
  add("reliability.w1", reliability_w1);
  add("reliability.b1", reliability_b1);
  add("distill_head.w", distill_head_w);
  add("distill_head.b", distill_head_b);
  add("fusion_head.w", fusion_head_w);
  add("fusion_head.b", fusion_head_b);
  return params;
}

std::vector<Tensor> DualChannelModel::parameters() const {
  std::vector<Tensor> out;
  for (const auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

Tensor target_attention(Graph& g, const AttentionParams& params,
                        const Tensor& sequence, const Tensor& candidate,
                        const std::vector<double>& mask, std::size_t len,
                        const std::vector<double>& nonempty) {
  const std::size_t batch = candidate.rows();
  require(len >= 1, "target attention: zero sequence length");
  require(sequence.rows() == batch * len, "target attention: sequence has ",
          sequence.rows(), " rows, expected ", batch, " x ", len);
  require(sequence.cols() == candidate.cols(),
          "target attention: sequence dim ", sequence.cols(),
          " vs candidate dim ", candidate.cols());
  require(mask.size() == batch * len, "target attention: mask size ",
          mask.size(), ", expected ", batch * len);
  require(nonempty.size() == batch, "target attention: nonempty size ",
          nonempty.size(), ", expected ", batch);

  Tensor cand_rep = O::repeat_rows(g, candidate, len);
  Tensor feats = O::concat_cols(
      g, {sequence, cand_rep, O::elementwise_mul(g, sequence, cand_rep)});
  Tensor hidden = O::relu(g, linear(g, feats, params.score_w1, params.score_b1));
  Tensor score = linear(g, hidden, params.score_w2, params.score_b2);
  Tensor masked = O::add(g, O::reshape(g, score, {batch, len}),
                         Tensor::from_values({batch, len}, mask));
  Tensor weights = O::softmax_rows(g, masked);
  Tensor scaled =
      O::row_scale(g, sequence, O::reshape(g, weights, {batch * len}));
  Tensor pooled = O::group_sum_rows(g, scaled, len);
  return O::row_scale(g, pooled, Tensor::from_values({batch}, nonempty));
}

Tensor asymmetric_inject(Graph& g, const Tensor& group_mid,
                         const Tensor& individual_mid, const Tensor& w1,
                         const Tensor& b1, const Tensor& w2, const Tensor& b2) {
  require(group_mid.rows() == individual_mid.rows(),
          "asymmetric inject: batch mismatch ", group_mid.rows(), " vs ",
          individual_mid.rows());
  require(group_mid.cols() + individual_mid.cols() == w1.rows(),
          "asymmetric inject: taps of width ", group_mid.cols(), " + ",
          individual_mid.cols(), " do not match weight rows ", w1.rows());
  Tensor joint = O::concat_cols(g, {group_mid, individual_mid});
  Tensor hidden = O::relu(g, linear(g, joint, w1, b1));
  return linear(g, hidden, w2, b2);
}

Tensor margin_distill_loss(Graph& g, const Tensor& teacher_logits,
                           const Tensor& student_logits, double temperature,
                           double margin) {
  require(temperature > 0.0, "margin distill: temperature must be positive");
  require(margin >= 0.0, "margin distill: margin must be non-negative");
  require(teacher_logits.numel() == student_logits.numel(),
          "margin distill: teacher has ", teacher_logits.numel(),
          " logits, student ", student_logits.numel());
  Tensor teacher = O::sigmoid(
      g, O::scale(g, O::detach(teacher_logits), 1.0 / temperature));
  Tensor student =
      O::sigmoid(g, O::scale(g, student_logits, 1.0 / temperature));
  Tensor gap = O::relu(
      g, O::add_scalar(g, O::abs(g, O::sub(g, teacher, student)), -margin));
  return O::elementwise_mul(g, gap, gap);
}

Tensor kl_distill_loss(Graph& g, const Tensor& teacher_logits,
                       const Tensor& student_logits, double temperature) {
  require(temperature > 0.0, "kl distill: temperature must be positive");
  require(teacher_logits.numel() == student_logits.numel(),
          "kl distill: teacher has ", teacher_logits.numel(),
          " logits, student ", student_logits.numel());
  const std::size_t n = teacher_logits.numel();
  std::vector<double> p(n), one_minus_p(n), entropy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double zt = teacher_logits.at(i) / temperature;
    p[i] = O::sigmoid_value(zt);
    one_minus_p[i] = 1.0 - p[i];
    // H(p) in logit form: -p ln p - (1-p) ln(1-p).
    entropy[i] = p[i] * softplus_value(-zt) + one_minus_p[i] * softplus_value(zt);
  }
  const auto& shape = student_logits.shape();
  Tensor zs = O::scale(g, student_logits, 1.0 / temperature);
  Tensor cross = O::add(
      g,
      O::elementwise_mul(g, Tensor::from_values(shape, p),
                         O::softplus(g, O::scale(g, zs, -1.0))),
      O::elementwise_mul(g, Tensor::from_values(shape, one_minus_p),
                         O::softplus(g, zs)));
  return O::sub(g, cross, Tensor::from_values(shape, entropy));
}

bool qualification_gate(double activity_count, double teacher_logit,
                        const DistillConfig& distill) {
  if (activity_count < static_cast<double>(distill.activity_threshold)) {
    return false;
  }
  return std::fabs(O::sigmoid_value(teacher_logit) - 0.5) >
         distill.confidence_threshold;
}

Tensor fuse_logits(Graph& g, const Tensor& individual, const Tensor& group,
                   const Tensor& alpha) {
  require(individual.numel() == group.numel() &&
              individual.numel() == alpha.numel(),
          "fuse logits: mismatched sizes ", individual.numel(), ", ",
          group.numel(), ", ", alpha.numel());
  // (1 - a) * ind + a * grp, in a form that is exact at a = 0 and a = 1.
  Tensor complement = O::add_scalar(g, O::scale(g, alpha, -1.0), 1.0);
  return O::add(g, O::elementwise_mul(g, complement, individual),
                O::elementwise_mul(g, alpha, group));
}

ForwardResult forward_batch(Graph& g, const DualChannelModel& model,
                            const ExampleBatch& batch) {
  const ModelConfig& config = model.config;
  const std::size_t B = batch.size;
  require(B >= 1, "forward: empty batch");
  require(batch.user_rows.size() == B && batch.labels.size() == B &&
              batch.candidate_items.size() == B &&
              batch.candidate_categories.size() == B &&
              batch.context_ids.size() == B && batch.group_codes.size() == B,
          "forward: ragged batch arrays");
  const ModelMode mode = config.mode;
  const std::size_t fields = config.spaces.attribute_fields;

  ForwardResult result;

  // Candidate representation shared by every pathway.
  Tensor candidate = O::concat_cols(
      g, {O::embedding_lookup(g, model.item_table, batch.candidate_items),
          O::embedding_lookup(g, model.category_table,
                              batch.candidate_categories)});

  const bool run_individual = mode != ModelMode::group_only;
  const bool run_group = mode != ModelMode::individual_only;

  // Individual-channel features.
  Tensor uid, attrs, context, individual_interest;
  if (run_individual) {
    uid = O::embedding_lookup(g, model.user_table, batch.user_rows);
    attrs = O::reshape(
        g, O::embedding_lookup(g, model.attribute_table, batch.attribute_tokens),
        {B, fields * config.attr_dim});
    context = O::embedding_lookup(g, model.context_table, batch.context_ids);
    Tensor history = O::concat_cols(
        g, {O::embedding_lookup(g, model.item_table, batch.history_items),
            O::embedding_lookup(g, model.category_table,
                                batch.history_categories)});
    individual_interest = target_attention(
        g, model.individual_attention, history, candidate, batch.history_mask,
        batch.history_len, batch.history_nonempty);
  }

  // Group-channel features; ablations replace a block with zeros of the
  // same width so tower shapes stay fixed.
  Tensor group_embedding, group_attrs, provenance, group_interest;
  if (run_group) {
    if (mode == ModelMode::no_group_id_embedding) {
      group_embedding = Tensor::zeros({B, config.group_dim});
    } else {
      group_embedding =
          priors::fuse_group_ids(g, model.group_fusion, batch.group_codes);
    }
    if (mode == ModelMode::no_group_attributes) {
      group_attrs = Tensor::zeros({B, fields});
      provenance = Tensor::zeros({B, 3 * fields});
    } else {
      require(batch.completed_attributes.size() == B * fields &&
                  batch.provenance_flags.size() == B * fields * 3,
              "forward: ragged attribute arrays");
      std::vector<double> scaled(batch.completed_attributes);
      for (double& v : scaled) v *= config.attribute_value_scale;
      group_attrs = Tensor::from_values({B, fields}, std::move(scaled));
      provenance =
          Tensor::from_values({B, 3 * fields}, batch.provenance_flags);
    }
    if (mode == ModelMode::no_group_sequence) {
      group_interest = Tensor::zeros({B, config.sequence_dim()});
    } else {
      Tensor group_seq = O::concat_cols(
          g, {O::embedding_lookup(g, model.item_table, batch.group_seq_items),
              O::embedding_lookup(g, model.category_table,
                                  batch.group_seq_categories)});
      group_interest = target_attention(
          g, model.group_attention, group_seq, candidate, batch.group_seq_mask,
          batch.group_seq_len, batch.group_seq_nonempty);
    }
  }

  Tensor labels = Tensor::from_values({B, 1}, batch.labels);
  const Tensor zeros_b1 = Tensor::zeros({B, 1});

  if (mode == ModelMode::single_channel) {
    // Everything feeds one tower; there is no second logit to blend with.
    Tensor input = O::concat_cols(g, {uid, attrs, context, individual_interest,
                                      candidate, group_embedding, group_attrs,
                                      provenance, group_interest});
    const TowerParams& tower = model.single_tower;
    Tensor h1 = O::relu(g, linear(g, input, tower.w1, tower.b1));
    Tensor h2 = O::relu(g, linear(g, h1, tower.w2, tower.b2));
    result.fused_logits = linear(g, h2, tower.head_w, tower.head_b);
    result.individual_logits = zeros_b1;
    result.group_logits = zeros_b1;
    result.alpha_fusion = zeros_b1;
    result.alpha_distill = zeros_b1;
    result.bce_loss = O::bce_with_logits_mean(g, result.fused_logits, labels);
    result.distill_loss = Tensor::scalar(0.0);
    result.total_loss = result.bce_loss;
    return result;
  }

  // Group tower completes first: its logit never sees the injection, which
  // keeps the information flow one-way.
  Tensor group_mid;
  if (run_group) {
    Tensor input = O::concat_cols(
        g, {group_embedding, group_attrs, provenance, group_interest,
            candidate});
    const TowerParams& tower = model.group_tower;
    group_mid = O::relu(g, linear(g, input, tower.w1, tower.b1));
    Tensor h2 = O::relu(g, linear(g, group_mid, tower.w2, tower.b2));
    result.group_logits = linear(g, h2, tower.head_w, tower.head_b);
  } else {
    result.group_logits = zeros_b1;
  }

  if (run_individual) {
    Tensor input = O::concat_cols(
        g, {uid, attrs, context, individual_interest, candidate});
    const TowerParams& tower = model.individual_tower;
    Tensor individual_mid = O::relu(g, linear(g, input, tower.w1, tower.b1));
    Tensor h2 = O::relu(g, linear(g, individual_mid, tower.w2, tower.b2));
    if (run_group && mode != ModelMode::no_injection) {
      Tensor fuse = asymmetric_inject(g, group_mid, individual_mid,
                                      model.inject_w1, model.inject_b1,
                                      model.inject_w2, model.inject_b2);
      h2 = O::add(g, h2, fuse);
    }
    result.individual_logits = linear(g, h2, tower.head_w, tower.head_b);
  } else {
    result.individual_logits = zeros_b1;
  }

  if (mode == ModelMode::individual_only) {
    result.fused_logits = result.individual_logits;
    result.alpha_fusion = zeros_b1;
    result.alpha_distill = zeros_b1;
  } else if (mode == ModelMode::group_only) {
    result.fused_logits = result.group_logits;
    result.alpha_fusion = zeros_b1;
    result.alpha_distill = zeros_b1;
  } else {
    require(batch.activity_counts.size() == B &&
                batch.history_fill.size() == B &&
                batch.completeness.size() == B,
            "forward: ragged reliability arrays");
    std::vector<double> reliability(B * 3);
    for (std::size_t b = 0; b < B; ++b) {
      reliability[b * 3] =
          std::log1p(batch.activity_counts[b]) / std::log1p(1000.0);
      reliability[b * 3 + 1] = batch.history_fill[b];
      reliability[b * 3 + 2] = batch.completeness[b];
    }
    Tensor rel_hidden = O::relu(
        g, linear(g, Tensor::from_values({B, 3}, std::move(reliability)),
                  model.reliability_w1, model.reliability_b1));
    result.alpha_distill = O::sigmoid(
        g, linear(g, rel_hidden, model.distill_head_w, model.distill_head_b));
    result.alpha_fusion = O::sigmoid(
        g, linear(g, rel_hidden, model.fusion_head_w, model.fusion_head_b));
    result.fused_logits = fuse_logits(g, result.individual_logits,
                                      result.group_logits,
                                      result.alpha_fusion);
  }

  result.bce_loss = O::bce_with_logits_mean(g, result.fused_logits, labels);

  if (config.distillation_active()) {
    result.gates.reserve(B);
    std::vector<double> gate_values(B);
    for (std::size_t b = 0; b < B; ++b) {
      const bool open = qualification_gate(
          batch.activity_counts[b], result.individual_logits.at(b, 0),
          config.distill);
      gate_values[b] = open ? 1.0 : 0.0;
      result.gates.push_back(gate_values[b]);
    }
    const double margin =
        mode == ModelMode::zero_margin ? 0.0 : config.distill.margin;
    Tensor per_example =
        mode == ModelMode::kl_distillation
            ? kl_distill_loss(g, result.individual_logits,
                              result.group_logits,
                              config.distill.temperature)
            : margin_distill_loss(g, result.individual_logits,
                                  result.group_logits,
                                  config.distill.temperature, margin);
    Tensor gated = O::elementwise_mul(
        g, O::elementwise_mul(
               g, Tensor::from_values({B, 1}, std::move(gate_values)),
               result.alpha_distill),
        per_example);
    result.distill_loss = O::mean_all(g, gated);
    result.total_loss =
        O::add(g, result.bce_loss,
               O::scale(g, result.distill_loss, config.distill.weight));
  } else {
    result.distill_loss = Tensor::scalar(0.0);
    result.total_loss = result.bce_loss;
  }
  return result;
}

void save_model(const DualChannelModel& model, const std::string& path) {
  autograd::Checkpoint checkpoint;
  for (const auto& [name, tensor] : model.named_parameters()) {
    checkpoint.add(name, tensor);
  }
  checkpoint.save(path);
}

void load_model(DualChannelModel& model, const std::string& path) {
  const auto checkpoint = autograd::Checkpoint::load(path);
  for (auto& [name, tensor] : model.named_parameters()) {
    require(checkpoint.has(name), "checkpoint ", path,
            " is missing parameter \"", name, "\"");
    const Tensor& stored = checkpoint.get(name);
    require(stored.shape() == tensor.shape(), "checkpoint parameter \"", name,
            "\" has mismatched shape");
    Tensor writable = tensor;
    writable.values() = stored.values();
  }
}

}  // namespace grouprec::model
