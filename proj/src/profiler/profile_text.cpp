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
#include "grouprec/profiler/profile_text.hpp"

#include <map>
#include <sstream>
#include <string>

#include "grouprec/util/error.hpp"

namespace grouprec::profiler {
namespace {

std::string render_category_counts(
    const std::map<std::size_t, long long>& counts) {
  if (counts.empty()) return "no purchases";
  std::ostringstream out;
  bool first = true;
  for (const auto& [category, count] : counts) {
    if (!first) out << ' ';
    first = false;
    out << synth::category_name(category) << ':' << count;
  }
  return out.str();
}

std::map<std::size_t, long long> count_purchases_in_window(const synth::UserRecord& user,
                                                   double window_start,
                                                   double reference_time) {
  std::map<std::size_t, long long> counts;
  for (const auto& event : user.purchase_log) {
    if (event.timestamp > reference_time) continue;
    if (event.timestamp <= window_start) continue;
    ++counts[event.category_id];
  }
  return counts;
}

}  // namespace

void ProfileWindows::validate() const {
  require(recent_span > 0.0, "profile windows: recent_span must be positive, got ",
          recent_span);
  require(recent_span < medium_span,
          "profile windows: spans must be strictly ordered, got recent ",
          recent_span, " >= medium ", medium_span);
}

ProfileText build_profile_text(const synth::UserRecord& user,
                               const ProfileWindows& windows) {
  windows.validate();
  ProfileText profile;
  profile.user_id = user.user_id;
  profile.attribute_values = user.static_attributes;

  // Static attributes, every field spelled out (missing marked).
  if (user.static_attributes.empty()) {
    profile.static_attributes = "none recorded";
  } else {
    std::ostringstream out;
    for (std::size_t field = 0; field < user.static_attributes.size();
         ++field) {
      if (field > 0) out << ' ';
      out << synth::attribute_field_name(field) << '=';
      const int value = user.static_attributes[field];
      if (value == synth::kMissingAttribute) {
        out << "missing";
      } else {
        out << value;
      }
    }
    profile.static_attributes = out.str();
  }

  // Purchase behaviors per window. std::map keeps category ids ascending.
  const double ref = windows.reference_time;
  const auto recent =
      count_purchases_in_window(user, ref - windows.recent_span, ref);
  const auto medium =
      count_purchases_in_window(user, ref - windows.medium_span, ref);
  std::map<std::size_t, long long> full;
  for (const auto& event : user.purchase_log) {
    if (event.timestamp > ref) continue;
    ++full[event.category_id];
  }
  profile.behaviors_recent = render_category_counts(recent);
  profile.behaviors_medium = render_category_counts(medium);
  profile.behaviors_long = render_category_counts(full);
  profile.category_counts.assign(full.begin(), full.end());

  // Search queries within the medium window, token counts in lexicographic
  // order ("recent queries" in the profile sense).
  std::map<std::string, long long> query_counts;
  for (const auto& query : user.search_queries) {
    if (query.timestamp > ref) continue;
    if (query.timestamp <= ref - windows.medium_span) continue;
    for (const auto& token : query.tokens) ++query_counts[token];
  }
  if (query_counts.empty()) {
    profile.recent_queries = "no queries";
  } else {
    std::ostringstream out;
    bool first = true;
    for (const auto& [token, count] : query_counts) {
      if (!first) out << ' ';
      first = false;
      out << token << ':' << count;
    }
    profile.recent_queries = out.str();
  }
  return profile;
}

std::string ProfileText::render() const {
  std::ostringstream out;
  out << "user profile " << user_id << '\n';
  out << "static attributes: " << static_attributes << '\n';
  out << "recent purchases: " << behaviors_recent << '\n';
  out << "medium-term purchases: " << behaviors_medium << '\n';
  out << "long-term purchases: " << behaviors_long << '\n';
  out << "recent queries: " << recent_queries << '\n';
  return out.str();
}

}  // namespace grouprec::profiler
