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
#include "grouprec/model/features.hpp"

#include <algorithm>
#include <cmath>

#include "grouprec/util/error.hpp"

namespace grouprec::model {

namespace {
constexpr double kPadMask = -1e30;
}  // namespace

void FeatureConfig::validate() const {
  require(max_history >= 1, "feature config: max_history must be >= 1");
  require(max_group_history >= 1,
          "feature config: max_group_history must be >= 1");
  require(context_buckets >= 1,
          "feature config: context_buckets must be >= 1");
}

std::size_t FeatureBuilder::attribute_token(std::size_t field,
                                            int value) const {
  const std::size_t block = spaces_.attribute_cardinality + 1;
  require(field < spaces_.attribute_fields,
          "attribute token: field ", field, " out of range [0, ",
          spaces_.attribute_fields, ")");
  if (value == synth::kMissingAttribute) {
    return field * block + spaces_.attribute_cardinality;
  }
  require(value >= 0 &&
              static_cast<std::size_t>(value) < spaces_.attribute_cardinality,
          "attribute token: field ", field, " value ", value,
          " outside cardinality ", spaces_.attribute_cardinality);
  return field * block + static_cast<std::size_t>(value);
}

FeatureBuilder FeatureBuilder::build(
    const std::vector<synth::UserRecord>& users,
    const std::vector<synth::Item>& items,
    const grouper::GroupAssignments& assignments,
    const priors::GroupPriorSet& priors, const FeatureConfig& config) {
  config.validate();
  require(!users.empty(), "feature builder: empty user set");
  require(!items.empty(), "feature builder: empty item set");
  require(users.size() == assignments.user_ids.size(),
          "feature builder: ", users.size(), " users but ",
          assignments.user_ids.size(), " group assignments");
  require(users.size() == priors.user_ids.size(), "feature builder: ",
          users.size(), " users but priors cover ", priors.user_ids.size());

  FeatureBuilder builder;
  builder.config_ = config;

  FeatureSpaces& spaces = builder.spaces_;
  spaces.num_users = users.size();
  spaces.num_items = items.size();
  spaces.attribute_fields = users.front().static_attributes.size();
  spaces.context_buckets = config.context_buckets;
  spaces.group_levels = assignments.codes.front().indices.size();

  builder.item_category_.resize(items.size());
  for (const auto& item : items) {
    require(item.item_id < items.size(), "feature builder: item id ",
            item.item_id, " out of range");
    builder.item_category_[item.item_id] = item.category_id;
    spaces.num_categories =
        std::max(spaces.num_categories, item.category_id + 1);
  }

  int max_value = -1;
  for (const auto& user : users) {
    require(user.static_attributes.size() == spaces.attribute_fields,
            "feature builder: user ", user.user_id,
            " has inconsistent attribute arity");
    for (const int value : user.static_attributes) {
      require(value >= 0 || value == synth::kMissingAttribute,
              "feature builder: user ", user.user_id,
              " has negative attribute value ", value);
      max_value = std::max(max_value, value);
    }
  }
  spaces.attribute_cardinality = static_cast<std::size_t>(max_value + 1);
  require(spaces.attribute_cardinality >= 1,
          "feature builder: no observed attribute values anywhere");
  for (const auto& code : assignments.codes) {
    require(code.indices.size() == spaces.group_levels,
            "feature builder: inconsistent group code length");
    for (const std::size_t index : code.indices) {
      spaces.group_k = std::max(spaces.group_k, index + 1);
    }
  }

  builder.entries_.resize(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& user = users[i];
    require(user.user_id < users.size(), "feature builder: user id ",
            user.user_id, " out of range for dense rows");
    require(assignments.user_ids[i] == user.user_id,
            "feature builder: assignment row ", i, " is user ",
            assignments.user_ids[i], ", expected ", user.user_id);
    require(priors.user_ids[i] == user.user_id,
            "feature builder: no group prior for user ", user.user_id,
            " (group code ", grouper::group_key(assignments.codes[i]), ")");

    UserEntry& entry = builder.entries_[user.user_id];
    entry.purchase_log = user.purchase_log;
    entry.user_row = user.user_id;
    entry.code = assignments.codes[i];
    entry.activity_count = static_cast<double>(user.activity_count);

    entry.attribute_tokens.reserve(spaces.attribute_fields);
    for (std::size_t field = 0; field < spaces.attribute_fields; ++field) {
      entry.attribute_tokens.push_back(
          builder.attribute_token(field, user.static_attributes[field]));
    }

    const std::size_t group = priors.user_group[i];
    const auto completed = priors::apply_attribute_completion(
        user, priors.attributes[group]);
    entry.completed_attributes = completed.values;
    entry.provenance_flags.assign(spaces.attribute_fields * 3, 0.0);
    std::size_t own_fields = 0;
    for (std::size_t field = 0; field < spaces.attribute_fields; ++field) {
      const auto provenance = completed.provenance[field];
      entry.provenance_flags[field * 3 +
                             static_cast<std::size_t>(provenance)] = 1.0;
      own_fields += provenance == priors::AttributeProvenance::own ? 1 : 0;
    }
    entry.completeness = spaces.attribute_fields == 0
                             ? 0.0
                             : static_cast<double>(own_fields) /
                                   static_cast<double>(spaces.attribute_fields);

    const auto& sequence = priors.sequences[group].items;
    const std::size_t keep =
        std::min<std::size_t>(sequence.size(), config.max_group_history);
    for (std::size_t s = 0; s < keep; ++s) {
      entry.group_items.push_back(sequence[s].item_id);
      entry.group_categories.push_back(sequence[s].category_id);
    }
  }
  return builder;
}

ExampleBatch FeatureBuilder::make_batch(
    const std::vector<synth::ImpressionExample>& impressions,
    std::size_t begin, std::size_t end) const {
  require(begin < end && end <= impressions.size(),
          "make_batch: bad range [", begin, ", ", end, ") over ",
          impressions.size(), " impressions");
  ExampleBatch batch;
  batch.size = end - begin;

  // First pass: per-example history windows, to size the padding.
  std::vector<std::vector<const synth::PurchaseEvent*>> windows(batch.size);
  std::size_t max_hist = 0;
  std::size_t max_group = 0;
  for (std::size_t b = 0; b < batch.size; ++b) {
    const auto& impression = impressions[begin + b];
    require(impression.user_id < entries_.size(),
            "make_batch: impression user ", impression.user_id,
            " unknown to the feature builder");
    const UserEntry& entry = entries_[impression.user_id];
    const auto& log = entry.purchase_log;
    // Purchases strictly before the impression; the log is time-sorted.
    auto it = std::lower_bound(
        log.begin(), log.end(), impression.timestamp,
        [](const synth::PurchaseEvent& e, double t) { return e.timestamp < t; });
    const std::size_t available = static_cast<std::size_t>(it - log.begin());
    const std::size_t keep = std::min(available, config_.max_history);
    windows[b].reserve(keep);
    for (std::size_t s = available - keep; s < available; ++s) {
      windows[b].push_back(&log[s]);
    }
    max_hist = std::max(max_hist, keep);
    max_group = std::max(max_group, entry.group_items.size());
  }
  batch.history_len = std::max<std::size_t>(max_hist, 1);
  batch.group_seq_len = std::max<std::size_t>(max_group, 1);

  batch.user_rows.reserve(batch.size);
  batch.labels.reserve(batch.size);
  batch.history_items.assign(batch.size * batch.history_len, 0);
  batch.history_categories.assign(batch.size * batch.history_len, 0);
  batch.history_mask.assign(batch.size * batch.history_len, kPadMask);
  batch.group_seq_items.assign(batch.size * batch.group_seq_len, 0);
  batch.group_seq_categories.assign(batch.size * batch.group_seq_len, 0);
  batch.group_seq_mask.assign(batch.size * batch.group_seq_len, kPadMask);

  for (std::size_t b = 0; b < batch.size; ++b) {
    const auto& impression = impressions[begin + b];
    const UserEntry& entry = entries_[impression.user_id];

    batch.user_rows.push_back(entry.user_row);
    batch.attribute_tokens.insert(batch.attribute_tokens.end(),
                                  entry.attribute_tokens.begin(),
                                  entry.attribute_tokens.end());
    const double day = std::floor(impression.timestamp);
    const std::size_t bucket = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(day, 0.0)),
        config_.context_buckets - 1);
    batch.context_ids.push_back(bucket);
    require(impression.item_id < item_category_.size(),
            "make_batch: impression item ", impression.item_id,
            " unknown to the feature builder");
    batch.candidate_items.push_back(impression.item_id);
    batch.candidate_categories.push_back(item_category_[impression.item_id]);
    batch.labels.push_back(static_cast<double>(impression.label));

    const auto& window = windows[b];
    for (std::size_t s = 0; s < window.size(); ++s) {
      const std::size_t at = b * batch.history_len + s;
      batch.history_items[at] = window[s]->item_id;
      batch.history_categories[at] = window[s]->category_id;
      batch.history_mask[at] = 0.0;
    }
    batch.history_nonempty.push_back(window.empty() ? 0.0 : 1.0);
    batch.history_fill.push_back(static_cast<double>(window.size()) /
                                 static_cast<double>(config_.max_history));

    batch.group_codes.push_back(entry.code);
    batch.completed_attributes.insert(batch.completed_attributes.end(),
                                      entry.completed_attributes.begin(),
                                      entry.completed_attributes.end());
    batch.provenance_flags.insert(batch.provenance_flags.end(),
                                  entry.provenance_flags.begin(),
                                  entry.provenance_flags.end());
    for (std::size_t s = 0; s < entry.group_items.size(); ++s) {
      const std::size_t at = b * batch.group_seq_len + s;
      batch.group_seq_items[at] = entry.group_items[s];
      batch.group_seq_categories[at] = entry.group_categories[s];
      batch.group_seq_mask[at] = 0.0;
    }
    batch.group_seq_nonempty.push_back(entry.group_items.empty() ? 0.0 : 1.0);

    batch.activity_counts.push_back(entry.activity_count);
    batch.completeness.push_back(entry.completeness);
  }
  return batch;
}

long long activity_percentile(const std::vector<synth::UserRecord>& users,
                              double percentile) {
  require(!users.empty(), "activity percentile: empty user set");
  require(percentile >= 0.0 && percentile <= 1.0,
          "activity percentile: percentile must be in [0, 1], got ",
          percentile);
  std::vector<std::size_t> counts;
  counts.reserve(users.size());
  for (const auto& user : users) counts.push_back(user.activity_count);
  std::sort(counts.begin(), counts.end());
  const std::size_t rank = static_cast<std::size_t>(
      percentile * static_cast<double>(counts.size() - 1));
  return static_cast<long long>(counts[rank]);
}

}  // namespace grouprec::model
