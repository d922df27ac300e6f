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
#include "grouprec/priors/priors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

#include "grouprec/util/error.hpp"
#include "grouprec/util/io.hpp"
#include "nlohmann/json.hpp"

namespace grouprec::priors {

using ordered_json = nlohmann::ordered_json;

AttributeSchema AttributeSchema::all_discrete(std::size_t fields) {
  AttributeSchema schema;
  schema.kinds.assign(fields, AttributeKind::discrete);
  return schema;
}

void GroupingConfig::validate() const {
  require(min_group_size >= 1, "grouping config: min_group_size must be >= 1");
  require(top_categories >= 1, "grouping config: top_categories must be >= 1");
  require(max_sequence_items >= 1,
          "grouping config: max_sequence_items must be >= 1");
}

std::size_t GroupPriorSet::index_of(const std::string& group_id) const {
  const auto it = std::find(group_ids.begin(), group_ids.end(), group_id);
  require(it != group_ids.end(), "unknown group id: \"", group_id, "\"");
  return static_cast<std::size_t>(it - group_ids.begin());
}

GroupAttributePrior complete_attributes(
    const std::vector<const synth::UserRecord*>& members,
    const AttributeSchema& schema) {
  const std::size_t fields = schema.size();
  GroupAttributePrior prior;
  prior.values.assign(fields, 0.0);
  prior.present.assign(fields, false);
  prior.member_count = members.size();

  for (std::size_t field = 0; field < fields; ++field) {
    if (schema.kinds[field] == AttributeKind::discrete) {
      // Majority vote over observed values; the ordered map makes ties
      // resolve to the smallest value.
      std::map<int, std::size_t> counts;
      for (const auto* member : members) {
        require(member->static_attributes.size() == fields,
                "attribute completion: user ", member->user_id, " has ",
                member->static_attributes.size(), " fields, expected ",
                fields);
        const int value = member->static_attributes[field];
        if (value == synth::kMissingAttribute) continue;
        ++counts[value];
      }
      if (counts.empty()) continue;
      int best_value = 0;
      std::size_t best_count = 0;
      for (const auto& [value, count] : counts) {
        if (count > best_count) {
          best_value = value;
          best_count = count;
        }
      }
      prior.values[field] = static_cast<double>(best_value);
      prior.present[field] = true;
    } else {
      double sum = 0.0;
      std::size_t observed = 0;
      for (const auto* member : members) {
        require(member->static_attributes.size() == fields,
                "attribute completion: user ", member->user_id, " has ",
                member->static_attributes.size(), " fields, expected ",
                fields);
        const int value = member->static_attributes[field];
        if (value == synth::kMissingAttribute) continue;
        sum += static_cast<double>(value);
        ++observed;
      }
      if (observed == 0) continue;
      prior.values[field] = sum / static_cast<double>(observed);
      prior.present[field] = true;
    }
  }
  return prior;
}

CompletedAttributes apply_attribute_completion(
    const synth::UserRecord& user, const GroupAttributePrior& prior) {
  require(user.static_attributes.size() == prior.values.size(),
          "attribute completion: user ", user.user_id, " has ",
          user.static_attributes.size(), " fields, prior has ",
          prior.values.size());
  CompletedAttributes completed;
  const std::size_t fields = user.static_attributes.size();
  completed.values.assign(fields, 0.0);
  completed.provenance.assign(fields, AttributeProvenance::absent);
  for (std::size_t field = 0; field < fields; ++field) {
    const int own = user.static_attributes[field];
    if (own != synth::kMissingAttribute) {
      completed.values[field] = static_cast<double>(own);
      completed.provenance[field] = AttributeProvenance::own;
    } else if (prior.present[field]) {
      completed.values[field] = prior.values[field];
      completed.provenance[field] = AttributeProvenance::group;
    }
  }
  return completed;
}

GroupSequence build_group_sequence(
    const std::vector<const synth::UserRecord*>& members,
    std::size_t top_categories, std::size_t max_sequence_items) {
  require(top_categories >= 1, "group sequence: top_categories must be >= 1");
  require(max_sequence_items >= 1,
          "group sequence: max_sequence_items must be >= 1");

  // Pool purchase counts per category and per item across all members.
  struct ItemStats {
    std::size_t category_id = 0;
    std::size_t count = 0;
    double timestamp_sum = 0.0;
  };
  std::map<std::size_t, std::size_t> category_counts;
  std::map<std::size_t, ItemStats> item_stats;
  for (const auto* member : members) {
    for (const auto& event : member->purchase_log) {
      ++category_counts[event.category_id];
      auto& stats = item_stats[event.item_id];
      stats.category_id = event.category_id;
      ++stats.count;
      stats.timestamp_sum += event.timestamp;
    }
  }
  GroupSequence sequence;
  if (category_counts.empty()) return sequence;

  // Keep the most-purchased categories; ties resolve to the smaller id.
  std::vector<std::pair<std::size_t, std::size_t>> ranked_categories(
      category_counts.begin(), category_counts.end());
  std::sort(ranked_categories.begin(), ranked_categories.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  if (ranked_categories.size() > top_categories) {
    ranked_categories.resize(top_categories);
  }
  std::vector<bool> kept;
  std::size_t max_category = 0;
  for (const auto& [category, count] : ranked_categories) {
    max_category = std::max(max_category, category);
  }
  kept.assign(max_category + 1, false);
  for (const auto& [category, count] : ranked_categories) {
    kept[category] = true;
  }

  // Rank items within the kept categories by purchase count, then cap the
  // sequence length before ordering chronologically.
  struct RankedItem {
    std::size_t item_id;
    ItemStats stats;
  };
  std::vector<RankedItem> ranked_items;
  for (const auto& [item_id, stats] : item_stats) {
    if (stats.category_id < kept.size() && kept[stats.category_id]) {
      ranked_items.push_back({item_id, stats});
    }
  }
  std::sort(ranked_items.begin(), ranked_items.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.stats.count != b.stats.count)
                return a.stats.count > b.stats.count;
              return a.item_id < b.item_id;
            });
  if (ranked_items.size() > max_sequence_items) {
    ranked_items.resize(max_sequence_items);
  }

  for (const auto& ranked : ranked_items) {
    GroupSequenceItem item;
    item.item_id = ranked.item_id;
    item.category_id = ranked.stats.category_id;
    item.avg_timestamp =
        ranked.stats.timestamp_sum / static_cast<double>(ranked.stats.count);
    sequence.items.push_back(item);
  }
  std::sort(sequence.items.begin(), sequence.items.end(),
            [](const GroupSequenceItem& a, const GroupSequenceItem& b) {
              if (a.avg_timestamp != b.avg_timestamp)
                return a.avg_timestamp < b.avg_timestamp;
              return a.item_id < b.item_id;
            });
  return sequence;
}

namespace {

std::size_t group_id_level(const std::string& group_id) {
  if (group_id.empty()) return 0;
  return static_cast<std::size_t>(
             std::count(group_id.begin(), group_id.end(), ':')) +
         1;
}

}  // namespace

GroupPriorSet build_group_priors(const std::vector<synth::UserRecord>& users,
                                 const grouper::GroupAssignments& assignments,
                                 const AttributeSchema& schema,
                                 const GroupingConfig& config) {
  config.validate();
  require(users.size() == assignments.user_ids.size(),
          "group priors: ", users.size(), " users but ",
          assignments.user_ids.size(), " assignments");
  require(!users.empty(), "group priors: empty user set");
  const std::size_t levels = assignments.codes.front().indices.size();
  require(levels >= 1, "group priors: assignments carry empty codes");
  for (std::size_t i = 0; i < users.size(); ++i) {
    require(users[i].user_id == assignments.user_ids[i],
            "group priors: user id mismatch at row ", i, ": record ",
            users[i].user_id, " vs assignment ", assignments.user_ids[i]);
    require(assignments.codes[i].indices.size() == levels,
            "group priors: inconsistent code length at row ", i);
  }

  // Membership at every code prefix.  A prefix string encodes its own
  // level (the number of components), so one map covers all levels; the
  // empty prefix is the global group holding everyone.
  std::map<std::string, std::vector<std::size_t>> members_at_prefix;
  for (std::size_t i = 0; i < users.size(); ++i) {
    members_at_prefix[""].push_back(i);
    for (std::size_t level = 1; level <= levels; ++level) {
      members_at_prefix[grouper::group_key(assignments.codes[i], level)]
          .push_back(i);
    }
  }

  // Resolve each user to the finest prefix that clears the member floor,
  // falling back one level at a time; the global group is the terminal
  // fallback regardless of its size.
  std::vector<std::string> resolved(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    std::string choice;  // global
    for (std::size_t level = levels; level >= 1; --level) {
      const std::string key =
          grouper::group_key(assignments.codes[i], level);
      if (members_at_prefix.at(key).size() >= config.min_group_size) {
        choice = key;
        break;
      }
    }
    resolved[i] = std::move(choice);
  }

  // Compute priors once per resolved group, in sorted id order.
  std::map<std::string, std::size_t> group_index;
  for (const auto& id : resolved) group_index.emplace(id, 0);
  GroupPriorSet priors;
  for (auto& [id, index] : group_index) {
    index = priors.group_ids.size();
    const auto& member_rows = members_at_prefix.at(id);
    std::vector<const synth::UserRecord*> members;
    members.reserve(member_rows.size());
    for (const std::size_t row : member_rows) members.push_back(&users[row]);
    priors.group_ids.push_back(id);
    priors.group_levels.push_back(group_id_level(id));
    priors.member_counts.push_back(members.size());
    priors.attributes.push_back(complete_attributes(members, schema));
    priors.sequences.push_back(build_group_sequence(
        members, config.top_categories, config.max_sequence_items));
  }
  priors.user_ids = assignments.user_ids;
  priors.user_group.reserve(users.size());
  for (const auto& id : resolved) {
    priors.user_group.push_back(group_index.at(id));
  }
  return priors;
}

void save_group_priors(const GroupPriorSet& priors, const std::string& path) {
  std::ostringstream out;
  ordered_json header;
  header["type"] = "header";
  header["groups"] = priors.group_ids.size();
  header["users"] = priors.user_ids.size();
  header["fields"] = priors.attributes.empty()
                         ? std::size_t{0}
                         : priors.attributes.front().values.size();
  out << header.dump() << '\n';
  for (std::size_t g = 0; g < priors.group_ids.size(); ++g) {
    ordered_json record;
    record["type"] = "group";
    record["group_id"] = priors.group_ids[g];
    record["level"] = priors.group_levels[g];
    record["member_count"] = priors.member_counts[g];
    record["attribute_values"] = priors.attributes[g].values;
    record["attribute_present"] = priors.attributes[g].present;
    auto sequence = ordered_json::array();
    for (const auto& item : priors.sequences[g].items) {
      sequence.push_back({item.item_id, item.category_id, item.avg_timestamp});
    }
    record["sequence"] = std::move(sequence);
    out << record.dump() << '\n';
  }
  for (std::size_t i = 0; i < priors.user_ids.size(); ++i) {
    ordered_json record;
    record["type"] = "user";
    record["user_id"] = priors.user_ids[i];
    record["group"] = priors.user_group[i];
    out << record.dump() << '\n';
  }
  write_file(path, out.str());
}

GroupPriorSet load_group_priors(const std::string& path) {
  const auto lines = read_lines(path);
  GroupPriorSet priors;
  bool saw_header = false;
  std::size_t expected_groups = 0;
  std::size_t expected_users = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const auto record = ordered_json::parse(lines[i]);
      const auto type = record.at("type").get<std::string>();
      if (type == "header") {
        require(!saw_header, "duplicate header");
        saw_header = true;
        expected_groups = record.at("groups").get<std::size_t>();
        expected_users = record.at("users").get<std::size_t>();
      } else if (type == "group") {
        require(saw_header, "group record before header");
        priors.group_ids.push_back(record.at("group_id").get<std::string>());
        priors.group_levels.push_back(record.at("level").get<std::size_t>());
        priors.member_counts.push_back(
            record.at("member_count").get<std::size_t>());
        GroupAttributePrior prior;
        prior.values = record.at("attribute_values").get<std::vector<double>>();
        prior.present = record.at("attribute_present").get<std::vector<bool>>();
        prior.member_count = priors.member_counts.back();
        priors.attributes.push_back(std::move(prior));
        GroupSequence sequence;
        for (const auto& entry : record.at("sequence")) {
          require(entry.is_array() && entry.size() == 3,
                  "sequence entries must be [item, category, timestamp]");
          GroupSequenceItem item;
          item.item_id = entry[0].get<std::size_t>();
          item.category_id = entry[1].get<std::size_t>();
          item.avg_timestamp = entry[2].get<double>();
          sequence.items.push_back(item);
        }
        priors.sequences.push_back(std::move(sequence));
      } else if (type == "user") {
        require(saw_header, "user record before header");
        priors.user_ids.push_back(record.at("user_id").get<std::size_t>());
        const auto group = record.at("group").get<std::size_t>();
        require(group < expected_groups, "user group index ", group,
                " out of range");
        priors.user_group.push_back(group);
      } else {
        fail("unknown record type \"", type, "\"");
      }
    } catch (const ordered_json::exception& e) {
      fail("failed to parse group priors record at ", path, ":", i + 1, ": ",
           e.what());
    } catch (const Error& e) {
      fail("invalid group priors record at ", path, ":", i + 1, ": ",
           e.what());
    }
  }
  require(saw_header, "group priors file ", path, " has no header record");
  require(priors.group_ids.size() == expected_groups &&
              priors.user_ids.size() == expected_users,
          "group priors file ", path, " truncated: expected ",
          expected_groups, " groups and ", expected_users, " users, found ",
          priors.group_ids.size(), " and ", priors.user_ids.size());
  return priors;
}

}  // namespace grouprec::priors
