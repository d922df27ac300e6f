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
// Structured user profile documents.
//
// A user's profile is a small text document with three components: static
// attributes, purchase behaviors aggregated per category over nested time
// windows (recent / medium / long), and recent search queries aggregated by
// token. Sections that have no data say so explicitly rather than being
// omitted, so every profile has the same shape.
//
// The rendered text is what a remote embedding service would consume; the
// structured companions (category counts, attribute values) let the offline
// encoder reuse the aggregation without re-parsing text.
#ifndef GROUPREC_PROFILER_PROFILE_TEXT_HPP_
#define GROUPREC_PROFILER_PROFILE_TEXT_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/synth/world.hpp"

namespace grouprec::profiler {

// Time windows for behavior aggregation, all anchored at `reference_time`
// (events strictly after the reference are ignored; the profile describes
// the user "as of" that instant).
//   recent window: (reference - recent_span, reference]
//   medium window: (reference - medium_span, reference]
//   long window:   (-inf, reference]
// Spans must satisfy 0 < recent_span < medium_span.
struct ProfileWindows {
  double reference_time = 13.0;
  double recent_span = 1.0;
  double medium_span = 4.0;

  void validate() const;
};

struct ProfileText {
  std::size_t user_id = 0;

  // Rendered sections (never empty strings; empties are spelled out).
  std::string static_attributes;
  std::string behaviors_recent;
  std::string behaviors_medium;
  std::string behaviors_long;
  std::string recent_queries;

  // Structured companions for the offline encoder.
  // Long-window purchase counts per category, ascending category id.
  std::vector<std::pair<std::size_t, long long>> category_counts;
  // Raw attribute values (synth::kMissingAttribute where unobserved).
  std::vector<int> attribute_values;

  // Full document: one section per line, deterministic ordering.
  std::string render() const;
};

// Aggregates one user's history into a profile. Deterministic: categories
// are emitted in ascending id order and query tokens in lexicographic order.
ProfileText build_profile_text(const synth::UserRecord& user,
                               const ProfileWindows& windows);

}  // namespace grouprec::profiler

#endif  // GROUPREC_PROFILER_PROFILE_TEXT_HPP_
