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
#include "grouprec/evalkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "nlohmann/json.hpp"

#include "grouprec/autograd/ops.hpp"
#include "grouprec/util/error.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::evalkit {

using ordered_json = nlohmann::ordered_json;
namespace O = autograd::ops;

namespace {

std::optional<double> relative_delta(const std::optional<double>& variant,
                                     const std::optional<double>& full) {
  if (!variant || !full) return std::nullopt;
  require(*full != 0.0, "ablation: full-model gauc is zero");
  return (*variant - *full) / *full;
}

ordered_json optional_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

std::string cell(const std::optional<double>& value, bool percent) {
  if (!value) return "-";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(percent ? 2 : 4);
  out << (percent ? 100.0 * *value : *value);
  if (percent) out << "%";
  return out.str();
}

std::optional<double> lowest_level_gauc(const MetricReport& report) {
  if (report.level_gauc.empty()) return std::nullopt;
  return report.level_gauc.front();
}

AblationRow make_row(model::ModelMode mode, MetricReport report,
                     const MetricReport& full) {
  AblationRow row;
  row.mode = mode;
  row.overall_delta = relative_delta(report.gauc, full.gauc);
  row.low_activity_delta =
      relative_delta(lowest_level_gauc(report), lowest_level_gauc(full));
  row.report = std::move(report);
  return row;
}

}  // namespace

EvalBundle make_eval_bundle(const synth::World& world,
                            const grouper::GroupAssignments& assignments,
                            const priors::GroupPriorSet& priors,
                            const model::FeatureConfig& feature_config,
                            std::size_t n_levels) {
  EvalBundle bundle;
  bundle.features = model::FeatureBuilder::build(
      world.users, world.items, assignments, priors, feature_config);
  const double horizon = world.config.time_units;
  require(horizon > 0.0, "eval bundle: world has a zero time horizon");
  bundle.split = synth::split_train_test(
      world.impressions, world.config.train_time_units / horizon, horizon);
  bundle.user_levels = stratify_by_activity(world.users, n_levels);
  bundle.n_levels = n_levels;
  return bundle;
}

std::vector<std::vector<double>> hashed_user_embeddings(std::size_t num_users,
                                                        std::size_t dim) {
  require(dim >= 1, "hashed embeddings: dim must be >= 1");
  std::vector<std::vector<double>> points;
  points.reserve(num_users);
  Rng root(0x1d5a8f);
  for (std::size_t user = 0; user < num_users; ++user) {
    Rng rng = root.fork("user-" + std::to_string(user));
    std::vector<double> vector(dim);
    double norm_sq = 0.0;
    for (double& v : vector) {
      v = rng.normal();
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    for (double& v : vector) v /= norm;
    points.push_back(std::move(vector));
  }
  return points;
}

ScoredSet score_test_set(
    const model::DualChannelModel& m, const model::FeatureBuilder& features,
    const std::vector<synth::ImpressionExample>& impressions,
    std::size_t batch_size) {
  require(batch_size >= 1, "score: batch_size must be >= 1");
  ScoredSet scored;
  scored.examples.reserve(impressions.size());
  scored.alpha_fusion.reserve(impressions.size());
  for (std::size_t begin = 0; begin < impressions.size();
       begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, impressions.size());
    const auto batch = features.make_batch(impressions, begin, end);
    autograd::Graph g;
    const auto result = model::forward_batch(g, m, batch);
    for (std::size_t i = 0; i < batch.size; ++i) {
      ScoredExample example;
      example.user_id = impressions[begin + i].user_id;
      example.score = O::sigmoid_value(result.fused_logits.at(i, 0));
      example.label = impressions[begin + i].label;
      scored.examples.push_back(example);
      scored.alpha_fusion.push_back(result.alpha_fusion.at(i, 0));
    }
  }
  return scored;
}

MetricReport train_and_evaluate(const EvalBundle& bundle,
                                model::ModelConfig model_config,
                                const model::TrainConfig& train_config,
                                std::uint64_t model_seed,
                                std::uint64_t train_seed) {
  model_config.spaces = bundle.features.spaces();
  Rng model_rng(model_seed);
  auto m = model::DualChannelModel::init(model_config, model_rng);
  Rng train_rng(train_seed);
  model::train_model(m, bundle.features, bundle.split.train, train_config,
                     train_rng);
  const auto scored =
      score_test_set(m, bundle.features, bundle.split.test,
                     train_config.batch_size);
  return build_report(scored.examples, scored.alpha_fusion,
                      bundle.user_levels, bundle.n_levels);
}

std::vector<model::ModelMode> default_ablation_modes() {
  return {
      model::ModelMode::hashed_grouping,
      model::ModelMode::no_group_id_embedding,
      model::ModelMode::no_group_attributes,
      model::ModelMode::no_group_sequence,
      model::ModelMode::single_channel,
      model::ModelMode::no_distillation,
      model::ModelMode::no_injection,
      model::ModelMode::kl_distillation,
      model::ModelMode::zero_margin,
  };
}

AblationReport run_ablation_suite(const EvalBundle& semantic,
                                  const EvalBundle* hashed,
                                  const AblationConfig& config) {
  const auto evaluate_mode = [&](model::ModelMode mode) {
    const bool swapped_upstream = mode == model::ModelMode::hashed_grouping;
    if (swapped_upstream) {
      require(hashed != nullptr,
              "ablation: mode hashed_grouping needs the hashed-grouping "
              "bundle, which was not provided");
    }
    const EvalBundle& bundle = swapped_upstream ? *hashed : semantic;
    model::ModelConfig mc = config.model_config;
    // The swapped upstream changes only the data; the model itself runs in
    // its full configuration.
    mc.mode = swapped_upstream ? model::ModelMode::full : mode;
    return train_and_evaluate(bundle, mc, config.train_config,
                              config.model_seed, config.train_seed);
  };

  AblationReport report;
  MetricReport full = evaluate_mode(model::ModelMode::full);
  report.full = make_row(model::ModelMode::full, full, full);
  for (const model::ModelMode mode : config.modes) {
    report.variants.push_back(make_row(mode, evaluate_mode(mode), full));
  }
  return report;
}

std::string format_ablation(const AblationReport& report) {
  std::ostringstream out;
  out << "variant                  gauc    change  low_gauc  low_change\n";
  const auto line = [&](const AblationRow& row) {
    std::string name = to_string(row.mode);
    name.resize(25, ' ');
    std::string gauc = cell(row.report.gauc, false);
    gauc.resize(8, ' ');
    std::string delta = cell(row.overall_delta, true);
    delta.resize(8, ' ');
    std::string low = cell(lowest_level_gauc(row.report), false);
    low.resize(10, ' ');
    out << name << gauc << delta << low
        << cell(row.low_activity_delta, true) << "\n";
  };
  line(report.full);
  for (const auto& row : report.variants) line(row);
  return out.str();
}

std::string ablation_records(const AblationReport& report) {
  std::ostringstream out;
  const auto line = [&](const AblationRow& row) {
    ordered_json record;
    record["mode"] = to_string(row.mode);
    record["gauc"] = optional_json(row.report.gauc);
    record["overall_delta"] = optional_json(row.overall_delta);
    record["low_gauc"] = optional_json(lowest_level_gauc(row.report));
    record["low_activity_delta"] = optional_json(row.low_activity_delta);
    record["examples"] = row.report.examples;
    out << record.dump() << "\n";
  };
  line(report.full);
  for (const auto& row : report.variants) line(row);
  return out.str();
}

SweepResult sweep_distill_weight(const EvalBundle& bundle,
                                 const model::ModelConfig& model_config,
                                 const model::TrainConfig& train_config,
                                 std::uint64_t model_seed,
                                 std::uint64_t train_seed,
                                 const std::vector<double>& weights) {
  require(!weights.empty(), "sweep: no distillation weights requested");
  SweepResult sweep;
  sweep.parameter = "distill_weight";
  for (const double weight : weights) {
    model::ModelConfig mc = model_config;
    mc.mode = model::ModelMode::full;
    mc.distill.weight = weight;
    SweepPoint point;
    point.value = weight;
    point.report = train_and_evaluate(bundle, mc, train_config, model_seed,
                                      train_seed);
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

SweepResult sweep_group_count(const GroupingSweepInputs& inputs,
                              const model::ModelConfig& model_config,
                              const model::TrainConfig& train_config,
                              std::uint64_t model_seed,
                              std::uint64_t train_seed,
                              const std::vector<std::size_t>& ks) {
  require(inputs.world != nullptr, "sweep: no world provided");
  require(inputs.points.size() == inputs.world->users.size(),
          "sweep: ", inputs.points.size(), " embeddings for ",
          inputs.world->users.size(), " users");
  require(!ks.empty(), "sweep: no group counts requested");

  SweepResult sweep;
  sweep.parameter = "group_count";
  for (const std::size_t k : ks) {
    const auto rq = grouper::rq_kmeans_fit(inputs.points, inputs.code_levels,
                                           k, inputs.grouping_seed);
    grouper::GroupAssignments assignments;
    for (const auto& user : inputs.world->users) {
      assignments.user_ids.push_back(user.user_id);
    }
    assignments.codes = rq.codes;
    const auto priors = priors::build_group_priors(
        inputs.world->users, assignments,
        priors::AttributeSchema::all_discrete(
            inputs.world->config.num_attribute_fields),
        inputs.prior_config);
    const auto bundle = make_eval_bundle(*inputs.world, assignments, priors,
                                         inputs.feature_config,
                                         inputs.n_levels);
    SweepPoint point;
    point.value = static_cast<double>(k);
    point.report = train_and_evaluate(bundle, model_config, train_config,
                                      model_seed, train_seed);
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

std::string format_sweep(const SweepResult& sweep) {
  std::ostringstream out;
  out << sweep.parameter << "  gauc    low_gauc\n";
  for (const auto& point : sweep.points) {
    std::ostringstream value;
    value << point.value;
    std::string head = value.str();
    head.resize(std::max<std::size_t>(sweep.parameter.size() + 2, 8), ' ');
    std::string gauc = cell(point.report.gauc, false);
    gauc.resize(8, ' ');
    out << head << gauc << cell(lowest_level_gauc(point.report), false)
        << "\n";
  }
  return out.str();
}

std::string sweep_records(const SweepResult& sweep) {
  std::ostringstream out;
  for (const auto& point : sweep.points) {
    ordered_json record;
    record["parameter"] = sweep.parameter;
    record["value"] = point.value;
    record["gauc"] = optional_json(point.report.gauc);
    record["low_gauc"] = optional_json(lowest_level_gauc(point.report));
    record["examples"] = point.report.examples;
    out << record.dump() << "\n";
  }
  return out.str();
}

PlotSeries sweep_series(const SweepResult& sweep, bool low_activity,
                        std::string name) {
  PlotSeries series;
  series.name = std::move(name);
  for (const auto& point : sweep.points) {
    const auto gauc =
        low_activity ? lowest_level_gauc(point.report) : point.report.gauc;
    if (gauc) series.points.emplace_back(point.value, *gauc);
  }
  return series;
}

}  // namespace grouprec::evalkit
