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
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace grouprec::synth {

// Synthetic e-commerce world. Users are instances of hidden archetypes; the
// browse log has a heavy-tailed per-user volume (a small head of users holds
// most events) while purchase histories follow a milder long tail, so the
// head/tail concentration of browsing and the purchase-count gap between
// low- and high-activity users can be tuned independently, the way the two
// phenomena are measured on real platforms.
struct WorldConfig {
  std::size_t num_archetypes = 200;
  std::size_t num_users = 5000;
  std::size_t num_items = 2000;
  std::size_t num_categories = 50;

  // Time axis: impressions span [0, time_units); the final
  // (time_units - train_time_units) slice is the evaluation day.
  double time_units = 14.0;
  double train_time_units = 13.0;
  // Purchase histories reach this far back before t = 0.
  double history_time_units = 28.0;

  // Browse-volume law: expected impressions for the user of activity rank r
  // (0 = most active) are proportional to (r + 1 + zipf_shift)^-zipf_exponent.
  double zipf_exponent = 1.6;
  double zipf_shift = 30.0;
  double impressions_per_user_mean = 12.0;
  // Every user also receives an evaluation-day browse budget so held-out
  // metrics cover the tail of the activity distribution.
  double test_browse_mean = 2.5;

  // Purchase-count law, same parameterization, independent knobs.
  double purchase_zipf_exponent = 0.95;
  double purchase_zipf_shift = 0.0;
  double purchases_per_user_mean = 8.0;

  // Probability that a purchase/query ignores the archetype affinity and
  // draws its category uniformly.
  double category_noise = 0.1;
  // Fraction of impressions targeted at the user's affinity categories (the
  // rest are popularity-driven exposure).
  double exposure_affinity_rate = 0.6;
  std::size_t affinity_support_size = 6;

  // Conversion model: sigma(bias + w_aff * affinity[cat] + w_pop * zpop).
  double conversion_bias_mean = -1.2;
  double conversion_bias_stddev = 0.3;
  double conversion_affinity_weight = 4.0;
  double conversion_popularity_weight = 0.3;

  // Static profile attributes.
  std::size_t num_attribute_fields = 6;
  std::size_t attribute_cardinality = 10;
  // Probability a user's field value deviates from the archetype canon.
  double attribute_noise = 0.15;
  double missing_rate_low_activity = 0.35;
  double missing_rate_high_activity = 0.10;
  double low_activity_quantile = 0.55;

  double queries_per_user_mean = 3.0;

  // Throws Error describing the first invalid field.
  void validate() const;
};

struct Archetype {
  std::size_t id = 0;
  std::vector<double> category_affinity;  // sums to 1 +- 1e-9
  std::vector<std::size_t> attribute_profile;
  double conversion_bias = 0.0;
};

struct Item {
  std::size_t item_id = 0;
  std::size_t category_id = 0;
  double popularity = 1.0;
};

struct PurchaseEvent {
  std::size_t item_id = 0;
  std::size_t category_id = 0;
  double timestamp = 0.0;
};

struct SearchQuery {
  std::vector<std::string> tokens;
  double timestamp = 0.0;
};

constexpr int kMissingAttribute = -1;

struct UserRecord {
  std::size_t user_id = 0;
  std::size_t archetype_id = 0;  // generative ground truth, hidden from models
  std::vector<int> static_attributes;  // per field; kMissingAttribute if absent
  std::vector<PurchaseEvent> purchase_log;  // timestamps nondecreasing
  std::vector<SearchQuery> search_queries;
  std::size_t activity_count = 0;  // == purchase_log.size()
};

struct ImpressionExample {
  std::size_t user_id = 0;
  std::size_t item_id = 0;
  double timestamp = 0.0;
  int label = 0;  // 1 = converted
};

struct World {
  WorldConfig config;
  std::uint64_t seed = 0;
  std::vector<Archetype> archetypes;
  std::vector<Item> items;
  std::vector<UserRecord> users;
  std::vector<ImpressionExample> impressions;  // sorted by time
};

// Canonical token for a category, used by search queries and profile text.
std::string category_name(std::size_t category_id);
// Field name for attribute column `field`.
std::string attribute_field_name(std::size_t field);

// Pure function of (config, seed).
World generate_world(const WorldConfig& config, std::uint64_t seed);

// Temporal split: impressions strictly before the split time go to train,
// the rest to test. With `time_span_hint` > 0 the time axis is taken to be
// [0, hint) and the split lands at exactly hint * fraction (a world on
// [0, 14) splits at 13.0); otherwise the split interpolates between the
// observed min and max timestamps. Throws if either side ends up empty.
struct TrainTestSplit {
  std::vector<ImpressionExample> train;
  std::vector<ImpressionExample> test;
  double split_time = 0.0;
};
TrainTestSplit split_train_test(const std::vector<ImpressionExample>& all,
                                double train_fraction = 13.0 / 14.0,
                                double time_span_hint = 0.0);

// Flags the lowest-activity `quantile` fraction of users (by purchase count,
// ties broken by user_id). Exactly floor(quantile * N) users are flagged.
std::vector<std::uint8_t> label_low_activity(
    const std::vector<UserRecord>& users, double quantile);

// Share of training-window impressions held by the most active
// `user_fraction` of users, ranking users by that same impression count.
// The evaluation-day browse budget is uniform by design and excluded.
double top_activity_share(const World& world, double user_fraction);

// Mean purchase count of flagged users divided by the overall mean.
double low_activity_mean_ratio(const std::vector<UserRecord>& users,
                               const std::vector<std::uint8_t>& flags);

// Line-delimited serialization (one JSON object per line, stable field
// order). Directory layout: meta.json, archetypes.jsonl, items.jsonl,
// users.jsonl, impressions.jsonl.
void save_world(const World& world, const std::string& dir);
World load_world(const std::string& dir);

}  // namespace grouprec::synth
