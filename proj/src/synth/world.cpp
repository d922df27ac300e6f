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
#include "grouprec/synth/world.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "grouprec/util/error.hpp"
#include "grouprec/util/io.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::synth {

namespace {

using ordered_json = nlohmann::ordered_json;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void WorldConfig::validate() const {
  require(num_archetypes > 0, "world config: num_archetypes must be > 0");
  require(num_users > 0, "world config: num_users must be > 0");
  require(num_items > 0, "world config: num_items must be > 0");
  require(num_categories > 0, "world config: num_categories must be > 0");
  require(time_units > 0.0, "world config: time_units must be > 0");
  require(train_time_units > 0.0 && train_time_units < time_units,
          "world config: train_time_units must lie in (0, time_units)");
  require(history_time_units >= 0.0,
          "world config: history_time_units must be >= 0");
  require(zipf_exponent > 0.0, "world config: zipf_exponent must be > 0");
  require(zipf_shift >= 0.0, "world config: zipf_shift must be >= 0");
  require(purchase_zipf_exponent > 0.0,
          "world config: purchase_zipf_exponent must be > 0");
  require(purchase_zipf_shift >= 0.0,
          "world config: purchase_zipf_shift must be >= 0");
  require(impressions_per_user_mean > 0.0,
          "world config: impressions_per_user_mean must be > 0");
  require(purchases_per_user_mean >= 0.0,
          "world config: purchases_per_user_mean must be >= 0");
  require(test_browse_mean >= 0.0,
          "world config: test_browse_mean must be >= 0");
  require(category_noise >= 0.0 && category_noise <= 1.0,
          "world config: category_noise must be in [0, 1]");
  require(exposure_affinity_rate >= 0.0 && exposure_affinity_rate <= 1.0,
          "world config: exposure_affinity_rate must be in [0, 1]");
  require(affinity_support_size > 0 &&
              affinity_support_size <= num_categories,
          "world config: affinity_support_size must be in [1, num_categories]");
  require(conversion_bias_stddev >= 0.0,
          "world config: conversion_bias_stddev must be >= 0");
  require(num_attribute_fields > 0,
          "world config: num_attribute_fields must be > 0");
  require(attribute_cardinality > 0,
          "world config: attribute_cardinality must be > 0");
  require(attribute_noise >= 0.0 && attribute_noise <= 1.0,
          "world config: attribute_noise must be in [0, 1]");
  require(missing_rate_low_activity >= 0.0 && missing_rate_low_activity <= 1.0,
          "world config: missing_rate_low_activity must be in [0, 1]");
  require(
      missing_rate_high_activity >= 0.0 && missing_rate_high_activity <= 1.0,
      "world config: missing_rate_high_activity must be in [0, 1]");
  require(low_activity_quantile > 0.0 && low_activity_quantile < 1.0,
          "world config: low_activity_quantile must be in (0, 1)");
  require(queries_per_user_mean >= 0.0,
          "world config: queries_per_user_mean must be >= 0");
}

std::string category_name(std::size_t category_id) {
  return "cat_" + std::to_string(category_id);
}

std::string attribute_field_name(std::size_t field) {
  return "attr_" + std::to_string(field);
}

namespace {

// Expected-count weights for the shifted power law.
std::vector<double> power_law_weights(std::size_t n, double exponent,
                                      double shift) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) {
    w[r] = std::pow(static_cast<double>(r) + 1.0 + shift, -exponent);
  }
  return w;
}

std::vector<std::size_t> sample_counts(const std::vector<double>& weights,
                                       double mean_per_user,
                                       std::size_t min_count) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double scale =
      mean_per_user * static_cast<double>(weights.size()) / total;
  std::vector<std::size_t> counts(weights.size());
  for (std::size_t r = 0; r < weights.size(); ++r) {
    const auto c = static_cast<std::size_t>(std::llround(scale * weights[r]));
    counts[r] = std::max(min_count, c);
  }
  return counts;
}

struct Catalog {
  std::vector<std::vector<std::size_t>> items_per_category;
  std::vector<std::vector<double>> popularity_per_category;
  std::vector<double> global_popularity;
  std::vector<double> zpop;  // standardized log popularity
};

Catalog index_catalog(const std::vector<Item>& items,
                      std::size_t num_categories) {
  Catalog cat;
  cat.items_per_category.resize(num_categories);
  cat.popularity_per_category.resize(num_categories);
  cat.global_popularity.reserve(items.size());
  double mean_log = 0.0;
  for (const Item& it : items) {
    cat.items_per_category[it.category_id].push_back(it.item_id);
    cat.popularity_per_category[it.category_id].push_back(it.popularity);
    cat.global_popularity.push_back(it.popularity);
    mean_log += std::log(it.popularity);
  }
  mean_log /= static_cast<double>(items.size());
  double var = 0.0;
  for (const Item& it : items) {
    const double d = std::log(it.popularity) - mean_log;
    var += d * d;
  }
  var /= static_cast<double>(items.size());
  const double sd = std::max(std::sqrt(var), 1e-12);
  cat.zpop.reserve(items.size());
  for (const Item& it : items) {
    cat.zpop.push_back((std::log(it.popularity) - mean_log) / sd);
  }
  return cat;
}

std::size_t sample_category(Rng& rng, const Archetype& arch,
                            double category_noise, std::size_t num_categories) {
  if (category_noise > 0.0 && rng.bernoulli(category_noise)) {
    return rng.uniform_index(num_categories);
  }
  return rng.categorical(arch.category_affinity);
}

std::size_t sample_item_in_category(Rng& rng, const Catalog& cat,
                                    std::size_t category_id) {
  const auto& pool = cat.items_per_category[category_id];
  if (pool.empty()) {
    // Degenerate catalogs (fewer items than categories) fall back to a
    // popularity-weighted global draw.
    return rng.categorical(cat.global_popularity);
  }
  return pool[rng.categorical(cat.popularity_per_category[category_id])];
}

}  // namespace

World generate_world(const WorldConfig& config, std::uint64_t seed) {
  config.validate();
  World world;
  world.config = config;
  world.seed = seed;
  const Rng root(seed);

  // --- archetypes ---
  Rng arng = root.fork("archetypes");
  world.archetypes.reserve(config.num_archetypes);
  for (std::size_t a = 0; a < config.num_archetypes; ++a) {
    Archetype arch;
    arch.id = a;
    arch.category_affinity.assign(config.num_categories, 0.0);
    // Support: distinct categories via a partial Fisher-Yates draw.
    std::vector<std::size_t> cats(config.num_categories);
    std::iota(cats.begin(), cats.end(), std::size_t{0});
    for (std::size_t i = 0; i < config.affinity_support_size; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(
                  arng.uniform_index(config.num_categories - i));
      std::swap(cats[i], cats[j]);
    }
    // Dirichlet(1,...,1) over the support via normalized exponentials.
    double total = 0.0;
    std::vector<double> raw(config.affinity_support_size);
    for (double& v : raw) {
      v = -std::log(1.0 - arng.uniform());
      total += v;
    }
    for (std::size_t i = 0; i < config.affinity_support_size; ++i) {
      arch.category_affinity[cats[i]] = raw[i] / total;
    }
    arch.attribute_profile.resize(config.num_attribute_fields);
    for (auto& v : arch.attribute_profile) {
      v = arng.uniform_index(config.attribute_cardinality);
    }
    arch.conversion_bias =
        arng.normal(config.conversion_bias_mean, config.conversion_bias_stddev);
    world.archetypes.push_back(std::move(arch));
  }

  // --- items ---
  Rng irng = root.fork("items");
  world.items.reserve(config.num_items);
  for (std::size_t i = 0; i < config.num_items; ++i) {
    Item item;
    item.item_id = i;
    item.category_id = irng.uniform_index(config.num_categories);
    item.popularity = irng.lognormal(0.0, 1.0);
    world.items.push_back(item);
  }
  const Catalog catalog = index_catalog(world.items, config.num_categories);

  // --- users: archetype and activity-rank assignment ---
  Rng urng = root.fork("users");
  const std::size_t n = config.num_users;
  world.users.resize(n);
  std::vector<std::size_t> rank_of_user(n);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    urng.shuffle(order);
    for (std::size_t r = 0; r < n; ++r) rank_of_user[order[r]] = r;
  }
  const std::vector<std::size_t> purchase_counts_by_rank = sample_counts(
      power_law_weights(n, config.purchase_zipf_exponent,
                        config.purchase_zipf_shift),
      config.purchases_per_user_mean, 0);
  const std::vector<std::size_t> impression_counts_by_rank = sample_counts(
      power_law_weights(n, config.zipf_exponent, config.zipf_shift),
      config.impressions_per_user_mean, 1);

  for (std::size_t u = 0; u < n; ++u) {
    world.users[u].user_id = u;
    world.users[u].archetype_id = urng.uniform_index(config.num_archetypes);
  }

  // --- purchase histories ---
  Rng prng = root.fork("purchases");
  for (std::size_t u = 0; u < n; ++u) {
    UserRecord& user = world.users[u];
    const Archetype& arch = world.archetypes[user.archetype_id];
    const std::size_t count = purchase_counts_by_rank[rank_of_user[u]];
    user.purchase_log.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      PurchaseEvent ev;
      ev.category_id = sample_category(prng, arch, config.category_noise,
                                       config.num_categories);
      ev.item_id = sample_item_in_category(prng, catalog, ev.category_id);
      ev.category_id = world.items[ev.item_id].category_id;
      ev.timestamp = prng.uniform(-config.history_time_units,
                                  config.train_time_units);
      user.purchase_log.push_back(ev);
    }
    std::sort(user.purchase_log.begin(), user.purchase_log.end(),
              [](const PurchaseEvent& a, const PurchaseEvent& b) {
                if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                return a.item_id < b.item_id;
              });
    user.activity_count = user.purchase_log.size();
  }

  // --- static attributes (missingness depends on the activity flag) ---
  const std::vector<std::uint8_t> low_flags =
      label_low_activity(world.users, config.low_activity_quantile);
  Rng attr_rng = root.fork("attributes");
  for (std::size_t u = 0; u < n; ++u) {
    UserRecord& user = world.users[u];
    const Archetype& arch = world.archetypes[user.archetype_id];
    const double missing_rate = low_flags[u] != 0
                                    ? config.missing_rate_low_activity
                                    : config.missing_rate_high_activity;
    user.static_attributes.assign(config.num_attribute_fields,
                                  kMissingAttribute);
    for (std::size_t f = 0; f < config.num_attribute_fields; ++f) {
      if (attr_rng.bernoulli(missing_rate)) continue;
      if (attr_rng.bernoulli(config.attribute_noise)) {
        user.static_attributes[f] = static_cast<int>(
            attr_rng.uniform_index(config.attribute_cardinality));
      } else {
        user.static_attributes[f] = static_cast<int>(arch.attribute_profile[f]);
      }
    }
  }

  // --- search queries ---
  Rng qrng = root.fork("queries");
  for (std::size_t u = 0; u < n; ++u) {
    UserRecord& user = world.users[u];
    const Archetype& arch = world.archetypes[user.archetype_id];
    const std::size_t nq =
        static_cast<std::size_t>(qrng.poisson(config.queries_per_user_mean));
    user.search_queries.reserve(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      SearchQuery query;
      const std::size_t ntok = 1 + static_cast<std::size_t>(qrng.poisson(0.3));
      for (std::size_t t = 0; t < ntok; ++t) {
        query.tokens.push_back(category_name(sample_category(
            qrng, arch, config.category_noise, config.num_categories)));
      }
      query.timestamp = qrng.uniform(0.0, config.train_time_units);
      user.search_queries.push_back(std::move(query));
    }
    std::sort(user.search_queries.begin(), user.search_queries.end(),
              [](const SearchQuery& a, const SearchQuery& b) {
                return a.timestamp < b.timestamp;
              });
  }

  // --- impressions with conversion labels ---
  Rng imp_rng = root.fork("impressions");
  for (std::size_t u = 0; u < n; ++u) {
    const UserRecord& user = world.users[u];
    const Archetype& arch = world.archetypes[user.archetype_id];
    const std::size_t train_count = impression_counts_by_rank[rank_of_user[u]];
    const std::size_t test_count =
        static_cast<std::size_t>(imp_rng.poisson(config.test_browse_mean));
    for (std::size_t j = 0; j < train_count + test_count; ++j) {
      ImpressionExample ex;
      ex.user_id = u;
      ex.timestamp = j < train_count
                         ? imp_rng.uniform(0.0, config.train_time_units)
                         : imp_rng.uniform(config.train_time_units,
                                           config.time_units);
      if (imp_rng.bernoulli(config.exposure_affinity_rate)) {
        const std::size_t cat = sample_category(
            imp_rng, arch, config.category_noise, config.num_categories);
        ex.item_id = sample_item_in_category(imp_rng, catalog, cat);
      } else {
        ex.item_id = imp_rng.categorical(catalog.global_popularity);
      }
      const std::size_t item_cat = world.items[ex.item_id].category_id;
      const double z = arch.conversion_bias +
                       config.conversion_affinity_weight *
                           arch.category_affinity[item_cat] +
                       config.conversion_popularity_weight *
                           catalog.zpop[ex.item_id];
      ex.label = imp_rng.bernoulli(sigmoid(z)) ? 1 : 0;
      world.impressions.push_back(ex);
    }
  }
  std::sort(world.impressions.begin(), world.impressions.end(),
            [](const ImpressionExample& a, const ImpressionExample& b) {
              if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
              if (a.user_id != b.user_id) return a.user_id < b.user_id;
              return a.item_id < b.item_id;
            });
  return world;
}

TrainTestSplit split_train_test(const std::vector<ImpressionExample>& all,
                                double train_fraction, double time_span_hint) {
  require(!all.empty(), "split: no impressions to split");
  require(train_fraction > 0.0 && train_fraction < 1.0,
          "split: train_fraction must be in (0, 1)");
  double t_min = all.front().timestamp, t_max = all.front().timestamp;
  for (const ImpressionExample& ex : all) {
    t_min = std::min(t_min, ex.timestamp);
    t_max = std::max(t_max, ex.timestamp);
  }
  TrainTestSplit split;
  split.split_time = time_span_hint > 0.0
                         ? time_span_hint * train_fraction
                         : t_min + (t_max - t_min) * train_fraction;
  for (const ImpressionExample& ex : all) {
    (ex.timestamp < split.split_time ? split.train : split.test).push_back(ex);
  }
  require(!split.train.empty(),
          "split: no impressions fall before the split time ",
          split.split_time);
  require(!split.test.empty(),
          "split: no impressions fall after the split time ",
          split.split_time);
  return split;
}

std::vector<std::uint8_t> label_low_activity(
    const std::vector<UserRecord>& users, double quantile) {
  require(quantile > 0.0 && quantile < 1.0,
          "label_low_activity: quantile must be in (0, 1)");
  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (users[a].activity_count != users[b].activity_count) {
      return users[a].activity_count < users[b].activity_count;
    }
    return users[a].user_id < users[b].user_id;
  });
  const auto cutoff = static_cast<std::size_t>(
      std::floor(quantile * static_cast<double>(users.size())));
  std::vector<std::uint8_t> flags(users.size(), 0);
  for (std::size_t i = 0; i < cutoff; ++i) flags[order[i]] = 1;
  return flags;
}

double top_activity_share(const World& world, double user_fraction) {
  require(user_fraction > 0.0 && user_fraction <= 1.0,
          "top_activity_share: user_fraction must be in (0, 1]");
  std::vector<std::size_t> counts(world.users.size(), 0);
  std::size_t total = 0;
  for (const ImpressionExample& ex : world.impressions) {
    if (ex.timestamp < world.config.train_time_units) {
      ++counts[ex.user_id];
      ++total;
    }
  }
  require(total > 0, "top_activity_share: no training-window impressions");
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  const auto k = static_cast<std::size_t>(
      std::llround(user_fraction * static_cast<double>(counts.size())));
  std::size_t head = 0;
  for (std::size_t i = 0; i < k && i < order.size(); ++i) {
    head += counts[order[i]];
  }
  return static_cast<double>(head) / static_cast<double>(total);
}

double low_activity_mean_ratio(const std::vector<UserRecord>& users,
                               const std::vector<std::uint8_t>& flags) {
  require(users.size() == flags.size(),
          "low_activity_mean_ratio: flag count mismatch");
  double flagged_sum = 0.0, total_sum = 0.0;
  std::size_t flagged_n = 0;
  for (std::size_t u = 0; u < users.size(); ++u) {
    total_sum += static_cast<double>(users[u].activity_count);
    if (flags[u] != 0) {
      flagged_sum += static_cast<double>(users[u].activity_count);
      ++flagged_n;
    }
  }
  require(flagged_n > 0, "low_activity_mean_ratio: no users flagged");
  require(total_sum > 0.0, "low_activity_mean_ratio: world has no purchases");
  const double flagged_mean = flagged_sum / static_cast<double>(flagged_n);
  const double overall_mean = total_sum / static_cast<double>(users.size());
  return flagged_mean / overall_mean;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json config_to_json(const WorldConfig& c) {
  ordered_json j;
  j["num_archetypes"] = c.num_archetypes;
  j["num_users"] = c.num_users;
  j["num_items"] = c.num_items;
  j["num_categories"] = c.num_categories;
  j["time_units"] = c.time_units;
  j["train_time_units"] = c.train_time_units;
  j["history_time_units"] = c.history_time_units;
  j["zipf_exponent"] = c.zipf_exponent;
  j["zipf_shift"] = c.zipf_shift;
  j["impressions_per_user_mean"] = c.impressions_per_user_mean;
  j["test_browse_mean"] = c.test_browse_mean;
  j["purchase_zipf_exponent"] = c.purchase_zipf_exponent;
  j["purchase_zipf_shift"] = c.purchase_zipf_shift;
  j["purchases_per_user_mean"] = c.purchases_per_user_mean;
  j["category_noise"] = c.category_noise;
  j["exposure_affinity_rate"] = c.exposure_affinity_rate;
  j["affinity_support_size"] = c.affinity_support_size;
  j["conversion_bias_mean"] = c.conversion_bias_mean;
  j["conversion_bias_stddev"] = c.conversion_bias_stddev;
  j["conversion_affinity_weight"] = c.conversion_affinity_weight;
  j["conversion_popularity_weight"] = c.conversion_popularity_weight;
  j["num_attribute_fields"] = c.num_attribute_fields;
  j["attribute_cardinality"] = c.attribute_cardinality;
  j["attribute_noise"] = c.attribute_noise;
  j["missing_rate_low_activity"] = c.missing_rate_low_activity;
  j["missing_rate_high_activity"] = c.missing_rate_high_activity;
  j["low_activity_quantile"] = c.low_activity_quantile;
  j["queries_per_user_mean"] = c.queries_per_user_mean;
  return j;
}

WorldConfig config_from_json(const ordered_json& j) {
  WorldConfig c;
  c.num_archetypes = j.at("num_archetypes").get<std::size_t>();
  c.num_users = j.at("num_users").get<std::size_t>();
  c.num_items = j.at("num_items").get<std::size_t>();
  c.num_categories = j.at("num_categories").get<std::size_t>();
  c.time_units = j.at("time_units").get<double>();
  c.train_time_units = j.at("train_time_units").get<double>();
  c.history_time_units = j.at("history_time_units").get<double>();
  c.zipf_exponent = j.at("zipf_exponent").get<double>();
  c.zipf_shift = j.at("zipf_shift").get<double>();
  c.impressions_per_user_mean = j.at("impressions_per_user_mean").get<double>();
  c.test_browse_mean = j.at("test_browse_mean").get<double>();
  c.purchase_zipf_exponent = j.at("purchase_zipf_exponent").get<double>();
  c.purchase_zipf_shift = j.at("purchase_zipf_shift").get<double>();
  c.purchases_per_user_mean = j.at("purchases_per_user_mean").get<double>();
  c.category_noise = j.at("category_noise").get<double>();
  c.exposure_affinity_rate = j.at("exposure_affinity_rate").get<double>();
  c.affinity_support_size = j.at("affinity_support_size").get<std::size_t>();
  c.conversion_bias_mean = j.at("conversion_bias_mean").get<double>();
  c.conversion_bias_stddev = j.at("conversion_bias_stddev").get<double>();
  c.conversion_affinity_weight =
      j.at("conversion_affinity_weight").get<double>();
  c.conversion_popularity_weight =
      j.at("conversion_popularity_weight").get<double>();
  c.num_attribute_fields = j.at("num_attribute_fields").get<std::size_t>();
  c.attribute_cardinality = j.at("attribute_cardinality").get<std::size_t>();
  c.attribute_noise = j.at("attribute_noise").get<double>();
  c.missing_rate_low_activity = j.at("missing_rate_low_activity").get<double>();
  c.missing_rate_high_activity =
      j.at("missing_rate_high_activity").get<double>();
  c.low_activity_quantile = j.at("low_activity_quantile").get<double>();
  c.queries_per_user_mean = j.at("queries_per_user_mean").get<double>();
  return c;
}

template <typename PerLine>
void for_each_jsonl_line(const std::string& path, PerLine fn) {
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      fn(ordered_json::parse(lines[i]));
    } catch (const ordered_json::exception& e) {
      fail(path, " line ", i + 1, ": ", e.what());
    }
  }
}

}  // namespace

void save_world(const World& world, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  ordered_json meta;
  meta["seed"] = world.seed;
  meta["config"] = config_to_json(world.config);
  write_file(fs::path(dir) / "meta.json", meta.dump(2) + "\n");

  std::ostringstream arch_out;
  for (const Archetype& a : world.archetypes) {
    ordered_json j;
    j["id"] = a.id;
    j["category_affinity"] = a.category_affinity;
    j["attribute_profile"] = a.attribute_profile;
    j["conversion_bias"] = a.conversion_bias;
    arch_out << j.dump() << "\n";
  }
  write_file(fs::path(dir) / "archetypes.jsonl", arch_out.str());

  std::ostringstream item_out;
  for (const Item& it : world.items) {
    ordered_json j;
    j["item_id"] = it.item_id;
    j["category_id"] = it.category_id;
    j["popularity"] = it.popularity;
    item_out << j.dump() << "\n";
  }
  write_file(fs::path(dir) / "items.jsonl", item_out.str());

  std::ostringstream user_out;
  for (const UserRecord& u : world.users) {
    ordered_json j;
    j["user_id"] = u.user_id;
    j["archetype_id"] = u.archetype_id;
    j["static_attributes"] = u.static_attributes;
    ordered_json purchases = ordered_json::array();
    for (const PurchaseEvent& p : u.purchase_log) {
      purchases.push_back({p.item_id, p.category_id, p.timestamp});
    }
    j["purchase_log"] = std::move(purchases);
    ordered_json queries = ordered_json::array();
    for (const SearchQuery& q : u.search_queries) {
      ordered_json qj;
      qj["tokens"] = q.tokens;
      qj["timestamp"] = q.timestamp;
      queries.push_back(std::move(qj));
    }
    j["search_queries"] = std::move(queries);
    j["activity_count"] = u.activity_count;
    user_out << j.dump() << "\n";
  }
  write_file(fs::path(dir) / "users.jsonl", user_out.str());

  std::ostringstream imp_out;
  for (const ImpressionExample& ex : world.impressions) {
    ordered_json j;
    j["user_id"] = ex.user_id;
    j["item_id"] = ex.item_id;
    j["timestamp"] = ex.timestamp;
    j["label"] = ex.label;
    imp_out << j.dump() << "\n";
  }
  write_file(fs::path(dir) / "impressions.jsonl", imp_out.str());
}

World load_world(const std::string& dir) {
  namespace fs = std::filesystem;
  World world;
  ordered_json meta;
  try {
    meta = ordered_json::parse(read_file(fs::path(dir) / "meta.json"));
  } catch (const ordered_json::exception& e) {
    fail(dir, "/meta.json: ", e.what());
  }
  try {
    world.seed = meta.at("seed").get<std::uint64_t>();
    world.config = config_from_json(meta.at("config"));
  } catch (const ordered_json::exception& e) {
    fail(dir, "/meta.json: ", e.what());
  }

  for_each_jsonl_line((fs::path(dir) / "archetypes.jsonl").string(),
                      [&](const ordered_json& j) {
                        Archetype a;
                        a.id = j.at("id").get<std::size_t>();
                        a.category_affinity =
                            j.at("category_affinity").get<std::vector<double>>();
                        a.attribute_profile =
                            j.at("attribute_profile")
                                .get<std::vector<std::size_t>>();
                        a.conversion_bias = j.at("conversion_bias").get<double>();
                        world.archetypes.push_back(std::move(a));
                      });
  for_each_jsonl_line((fs::path(dir) / "items.jsonl").string(),
                      [&](const ordered_json& j) {
                        Item it;
                        it.item_id = j.at("item_id").get<std::size_t>();
                        it.category_id = j.at("category_id").get<std::size_t>();
                        it.popularity = j.at("popularity").get<double>();
                        world.items.push_back(it);
                      });
  for_each_jsonl_line(
      (fs::path(dir) / "users.jsonl").string(), [&](const ordered_json& j) {
        UserRecord u;
        u.user_id = j.at("user_id").get<std::size_t>();
        u.archetype_id = j.at("archetype_id").get<std::size_t>();
        u.static_attributes = j.at("static_attributes").get<std::vector<int>>();
        for (const ordered_json& p : j.at("purchase_log")) {
          PurchaseEvent ev;
          ev.item_id = p.at(0).get<std::size_t>();
          ev.category_id = p.at(1).get<std::size_t>();
          ev.timestamp = p.at(2).get<double>();
          u.purchase_log.push_back(ev);
        }
        for (const ordered_json& q : j.at("search_queries")) {
          SearchQuery query;
          query.tokens = q.at("tokens").get<std::vector<std::string>>();
          query.timestamp = q.at("timestamp").get<double>();
          u.search_queries.push_back(std::move(query));
        }
        u.activity_count = j.at("activity_count").get<std::size_t>();
        world.users.push_back(std::move(u));
      });
  for_each_jsonl_line((fs::path(dir) / "impressions.jsonl").string(),
                      [&](const ordered_json& j) {
                        ImpressionExample ex;
                        ex.user_id = j.at("user_id").get<std::size_t>();
                        ex.item_id = j.at("item_id").get<std::size_t>();
                        ex.timestamp = j.at("timestamp").get<double>();
                        ex.label = j.at("label").get<int>();
                        world.impressions.push_back(ex);
                      });
  return world;
}

}  // namespace grouprec::synth
