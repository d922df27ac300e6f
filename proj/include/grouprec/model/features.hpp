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
// Turns raw interaction records plus group priors into padded, index-based
// batches the ranking model can consume directly.
#ifndef GROUPREC_MODEL_FEATURES_HPP_
#define GROUPREC_MODEL_FEATURES_HPP_

#include <cstddef>
#include <vector>

#include "grouprec/grouper/rq_kmeans.hpp"
#include "grouprec/priors/priors.hpp"
#include "grouprec/synth/world.hpp"

namespace grouprec::model {

struct FeatureConfig {
  std::size_t max_history = 10;        // individual events attended per example
  std::size_t max_group_history = 50;  // group-sequence items attended
  std::size_t context_buckets = 14;    // impression time discretization (days)

  void validate() const;
};

// Sizes of every categorical vocabulary the model embeds; derived from the
// world and grouping artifacts so embedding tables line up with the data.
struct FeatureSpaces {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t num_categories = 0;
  std::size_t attribute_fields = 0;
  std::size_t attribute_cardinality = 0;  // raw values are [0, cardinality)
  std::size_t context_buckets = 0;
  std::size_t group_levels = 0;
  std::size_t group_k = 0;
};

// One model-ready minibatch. Sequences are padded to a per-batch length and
// laid out example-major (example i occupies rows [i*len, (i+1)*len)); pad
// positions carry id 0 and an additive mask of -1e30 so attention softmax
// sends their weight to zero.
struct ExampleBatch {
  std::size_t size = 0;

  std::vector<std::size_t> user_rows;
  std::vector<std::size_t> attribute_tokens;  // size*fields, field-major per example
  std::vector<std::size_t> context_ids;
  std::vector<std::size_t> candidate_items;
  std::vector<std::size_t> candidate_categories;
  std::vector<double> labels;

  std::size_t history_len = 0;  // padded individual-sequence length
  std::vector<std::size_t> history_items;
  std::vector<std::size_t> history_categories;
  std::vector<double> history_mask;      // size*history_len, 0 or -1e30
  std::vector<double> history_nonempty;  // per example, 1 if any real event

  std::vector<grouper::GroupCode> group_codes;  // full hierarchical code
  std::vector<double> completed_attributes;     // size*fields, raw values
  std::vector<double> provenance_flags;         // size*fields*3 one-hot

  std::size_t group_seq_len = 0;  // padded group-sequence length
  std::vector<std::size_t> group_seq_items;
  std::vector<std::size_t> group_seq_categories;
  std::vector<double> group_seq_mask;
  std::vector<double> group_seq_nonempty;

  // Reliability-network inputs (constants).
  std::vector<double> activity_counts;  // full purchase count per example
  std::vector<double> history_fill;     // pre-impression length / max_history
  std::vector<double> completeness;     // fraction of fields observed directly
};

// Precomputed per-user features plus the item->category map; batches are
// sliced out of an impression list on demand.
class FeatureBuilder {
 public:
  // `assignments` carries every user's full hierarchical group code;
  // `priors` must cover the same users (built from the same assignments).
  // Throws when a user has no prior, naming the user and its group code.
  static FeatureBuilder build(const std::vector<synth::UserRecord>& users,
                              const std::vector<synth::Item>& items,
                              const grouper::GroupAssignments& assignments,
                              const priors::GroupPriorSet& priors,
                              const FeatureConfig& config);

  const FeatureSpaces& spaces() const { return spaces_; }
  const FeatureConfig& config() const { return config_; }

  // Assembles the batch for impressions[begin, end). History is causal:
  // only purchases strictly before the impression timestamp are attended,
  // keeping the most recent `max_history` in chronological order.
  ExampleBatch make_batch(
      const std::vector<synth::ImpressionExample>& impressions,
      std::size_t begin, std::size_t end) const;

  // Token id for one attribute field/value pair (missing gets the final
  // slot of each field's block). Exposed for tests.
  std::size_t attribute_token(std::size_t field, int value) const;

 private:
  struct UserEntry {
    std::size_t user_row = 0;
    std::vector<std::size_t> attribute_tokens;
    std::vector<double> completed_attributes;
    std::vector<double> provenance_flags;
    double completeness = 0.0;
    grouper::GroupCode code;
    std::vector<std::size_t> group_items;
    std::vector<std::size_t> group_categories;
    double activity_count = 0.0;
    std::vector<synth::PurchaseEvent> purchase_log;  // owned copy, time-sorted
  };

  FeatureConfig config_;
  FeatureSpaces spaces_;
  std::vector<UserEntry> entries_;          // indexed by user_id
  std::vector<std::size_t> item_category_;  // indexed by item_id
};

// Activity threshold at the given percentile of users' purchase counts
// (e.g. 0.7 -> the 70th-percentile count). Used as the distillation
// qualification cutoff.
long long activity_percentile(const std::vector<synth::UserRecord>& users,
                              double percentile);

}  // namespace grouprec::model

#endif  // GROUPREC_MODEL_FEATURES_HPP_
