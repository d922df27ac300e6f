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
// Train-and-evaluate harness: bundles a fixed world into model-ready data,
// scores trained models per activity level, and runs the ablation and
// hyperparameter sweeps on shared data and seeds.
#ifndef GROUPREC_EVALKIT_HARNESS_HPP_
#define GROUPREC_EVALKIT_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grouprec/evalkit/metrics.hpp"
#include "grouprec/grouper/rq_kmeans.hpp"
#include "grouprec/model/features.hpp"
#include "grouprec/model/model.hpp"
#include "grouprec/model/trainer.hpp"
#include "grouprec/priors/priors.hpp"
#include "grouprec/synth/world.hpp"

namespace grouprec::evalkit {

// Everything a training run consumes: model-ready features, the time-based
// train/test split (the final evaluation day held out), and each user's
// activity level. Built once per world and shared across variants so every
// comparison sees identical data.
struct EvalBundle {
  model::FeatureBuilder features;
  synth::TrainTestSplit split;
  std::vector<std::size_t> user_levels;  // by user_id, 0 = lowest activity
  std::size_t n_levels = 5;
};

EvalBundle make_eval_bundle(const synth::World& world,
                            const grouper::GroupAssignments& assignments,
                            const priors::GroupPriorSet& priors,
                            const model::FeatureConfig& feature_config,
                            std::size_t n_levels = 5);

// Grouping-ablation baseline embeddings: deterministic pseudo-random unit
// vectors derived from the user id alone, so the grouping stage sees no
// behavioral or semantic signal.
std::vector<std::vector<double>> hashed_user_embeddings(std::size_t num_users,
                                                        std::size_t dim);

// Scores plus the per-example fusion gate value (for gate-behavior probes).
struct ScoredSet {
  std::vector<ScoredExample> examples;
  std::vector<double> alpha_fusion;
};

// Forward-only scoring of `impressions`; scores are fused-channel
// conversion probabilities. Bitwise independent of `batch_size`.
ScoredSet score_test_set(const model::DualChannelModel& m,
                         const model::FeatureBuilder& features,
                         const std::vector<synth::ImpressionExample>& impressions,
                         std::size_t batch_size = 1024);

// Initializes a model from `model_seed`, trains it on the bundle's train
// split with `train_seed` shuffling, and reports test-split metrics.
// `model_config.spaces` is overwritten from the bundle's features so the
// same template config works across bundles.
MetricReport train_and_evaluate(const EvalBundle& bundle,
                                model::ModelConfig model_config,
                                const model::TrainConfig& train_config,
                                std::uint64_t model_seed,
                                std::uint64_t train_seed);

// --- ablation suite ---------------------------------------------------------

struct AblationConfig {
  std::vector<model::ModelMode> modes;  // variants; the full model always runs
  model::ModelConfig model_config;      // template; mode overridden per row
  model::TrainConfig train_config;
  std::uint64_t model_seed = 1;
  std::uint64_t train_seed = 1;
};

struct AblationRow {
  model::ModelMode mode = model::ModelMode::full;
  MetricReport report;
  // Relative GAUC change vs the full model, (variant - full) / full, as a
  // fraction (multiply by 100 for percent). Absent when either GAUC is.
  std::optional<double> overall_delta;
  std::optional<double> low_activity_delta;  // on the lowest-activity level

  bool operator==(const AblationRow&) const = default;
};

struct AblationReport {
  AblationRow full;
  std::vector<AblationRow> variants;  // in the order requested

  bool operator==(const AblationReport&) const = default;
};

// The standard variant list: grouping from hashed ids, the three group-side
// feature removals, the single shared tower, no gated distillation, no
// asymmetric injection, the conventional KL objective, and a zero margin.
std::vector<model::ModelMode> default_ablation_modes();

// Trains the full model and every requested variant on identical data and
// identical seeds. `hashed` supplies the swapped upstream (grouping built
// from hashed_user_embeddings) and is only required when `modes` contains
// hashed_grouping; it may be null otherwise.
AblationReport run_ablation_suite(const EvalBundle& semantic,
                                  const EvalBundle* hashed,
                                  const AblationConfig& config);

std::string format_ablation(const AblationReport& report);
std::string ablation_records(const AblationReport& report);  // one line/row

// --- hyperparameter sweeps --------------------------------------------------

struct SweepPoint {
  double value = 0.0;
  MetricReport report;

  bool operator==(const SweepPoint&) const = default;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;  // in the order requested

  bool operator==(const SweepResult&) const = default;
};

// Re-trains the full model for each distillation weight on fixed data.
SweepResult sweep_distill_weight(const EvalBundle& bundle,
                                 const model::ModelConfig& model_config,
                                 const model::TrainConfig& train_config,
                                 std::uint64_t model_seed,
                                 std::uint64_t train_seed,
                                 const std::vector<double>& weights);

// Inputs for the group-count sweep, which rebuilds grouping, priors, and
// features for every k before training.
struct GroupingSweepInputs {
  const synth::World* world = nullptr;
  std::vector<std::vector<double>> points;  // per-user embedding vectors
  std::size_t code_levels = 3;              // residual-quantization stages
  std::uint64_t grouping_seed = 0;
  priors::GroupingConfig prior_config;
  model::FeatureConfig feature_config;
  std::size_t n_levels = 5;
};

SweepResult sweep_group_count(const GroupingSweepInputs& inputs,
                              const model::ModelConfig& model_config,
                              const model::TrainConfig& train_config,
                              std::uint64_t model_seed,
                              std::uint64_t train_seed,
                              const std::vector<std::size_t>& ks);

std::string format_sweep(const SweepResult& sweep);
std::string sweep_records(const SweepResult& sweep);  // one line per point

// Overall (or lowest-level) GAUC against the swept value; absent points
// are skipped.
PlotSeries sweep_series(const SweepResult& sweep, bool low_activity,
                        std::string name);

}  // namespace grouprec::evalkit

#endif  // GROUPREC_EVALKIT_HARNESS_HPP_
