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
// Group-level statistical priors: attribute completion and aggregated
// purchase sequences shared by all members of a semantic group.
//
// Each user belongs to the group named by its full residual code
// (e.g. "3:7:1").  Sparse groups fall back to coarser prefixes of the
// same code ("3:7", then "3", then the global group "") until the
// member count reaches a configurable floor, so every user resolves to
// a group with enough observations to estimate stable statistics.
#ifndef GROUPREC_PRIORS_PRIORS_HPP_
#define GROUPREC_PRIORS_PRIORS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "grouprec/grouper/rq_kmeans.hpp"
#include "grouprec/synth/world.hpp"

namespace grouprec::priors {

// How a static attribute field is aggregated across group members.
enum class AttributeKind {
  discrete,    // majority vote (mode); ties resolve to the smallest value
  continuous,  // arithmetic mean of observed values
};

struct AttributeSchema {
  std::vector<AttributeKind> kinds;  // one entry per attribute field

  static AttributeSchema all_discrete(std::size_t fields);

  std::size_t size() const { return kinds.size(); }
};

// Aggregated attribute statistics for one group.
struct GroupAttributePrior {
  std::vector<double> values;  // per field: mode (discrete) or mean
  std::vector<bool> present;   // false when no member observed the field
  std::size_t member_count = 0;
};

// Where a completed attribute value came from.
enum class AttributeProvenance {
  own,    // the user observed the field directly
  group,  // filled from the group prior
  absent, // missing for the user and every group member
};

// A user's attribute vector after group completion.
struct CompletedAttributes {
  std::vector<double> values;
  std::vector<AttributeProvenance> provenance;
};

// One entry of a group's aggregated purchase sequence.
struct GroupSequenceItem {
  std::size_t item_id = 0;
  std::size_t category_id = 0;
  double avg_timestamp = 0.0;

  bool operator==(const GroupSequenceItem&) const = default;
};

struct GroupSequence {
  std::vector<GroupSequenceItem> items;
};

struct GroupingConfig {
  std::size_t min_group_size = 5;     // fallback floor for member counts
  std::size_t top_categories = 10;    // categories kept per group
  std::size_t max_sequence_items = 50;  // cap on aggregated sequence length

  void validate() const;
};

// Priors for every group that at least one user resolved to, plus the
// user -> group assignment after fallback.
struct GroupPriorSet {
  // Parallel arrays over resolved groups, sorted by group id.
  std::vector<std::string> group_ids;     // prefix key, "" for global
  std::vector<std::size_t> group_levels;  // number of code levels in the key
  std::vector<std::size_t> member_counts;
  std::vector<GroupAttributePrior> attributes;
  std::vector<GroupSequence> sequences;

  // Parallel arrays over users, in input order.
  std::vector<std::size_t> user_ids;
  std::vector<std::size_t> user_group;  // index into the group arrays

  // Index of a group id in group_ids; throws if unknown.
  std::size_t index_of(const std::string& group_id) const;
};

// Aggregates attribute statistics over a set of member records.
GroupAttributePrior complete_attributes(
    const std::vector<const synth::UserRecord*>& members,
    const AttributeSchema& schema);

// Fills a user's missing attribute fields from a group prior.
CompletedAttributes apply_attribute_completion(const synth::UserRecord& user,
                                               const GroupAttributePrior& prior);

// Builds the aggregated purchase sequence for a set of member records:
// keep the top `top_categories` categories by purchase count, rank items
// within them by purchase count, cap at `max_sequence_items`, then order
// by average purchase timestamp.
GroupSequence build_group_sequence(
    const std::vector<const synth::UserRecord*>& members,
    std::size_t top_categories, std::size_t max_sequence_items);

// Resolves every user to a group (finest code prefix whose member count
// reaches the floor) and computes attribute and sequence priors for each
// resolved group.
GroupPriorSet build_group_priors(const std::vector<synth::UserRecord>& users,
                                 const grouper::GroupAssignments& assignments,
                                 const AttributeSchema& schema,
                                 const GroupingConfig& config);

// JSONL persistence: one header record, one record per group, one per user.
void save_group_priors(const GroupPriorSet& priors, const std::string& path);
GroupPriorSet load_group_priors(const std::string& path);

}  // namespace grouprec::priors

#endif  // GROUPREC_PRIORS_PRIORS_HPP_
