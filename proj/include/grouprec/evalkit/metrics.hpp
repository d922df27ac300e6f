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
// Ranking metrics over scored impressions: AUC (Mann-Whitney, ties count
// one half), user-weighted GAUC, activity-level stratification, and the
// per-level metric report. Metrics that are undefined on their input
// (single-class data) are reported as absent rather than as a sentinel
// value. All functions here are pure.
#ifndef GROUPREC_EVALKIT_METRICS_HPP_
#define GROUPREC_EVALKIT_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/synth/world.hpp"

namespace grouprec::evalkit {

struct ScoredExample {
  std::size_t user_id = 0;
  double score = 0.0;  // must be finite
  int label = 0;       // 1 = converted

  bool operator==(const ScoredExample&) const = default;
};

// Probability that a uniformly random positive outranks a uniformly random
// negative, with ties counted one half (Mann-Whitney / average-rank form).
// Absent when the input lacks a positive or lacks a negative.
std::optional<double> auc(const std::vector<ScoredExample>& examples);

// Impression-count-weighted average of per-user AUCs over users whose
// examples contain both classes; users without both classes contribute to
// neither numerator nor denominator. Absent when no user is eligible.
std::optional<double> gauc(const std::vector<ScoredExample>& examples);

// Equal-size activity buckets: users are ordered by (purchase count,
// user_id) and split into n_levels contiguous buckets whose sizes differ by
// at most one (lower buckets take the extra user when sizes do not divide
// evenly). Returns one level per input position, 0 = lowest activity.
std::vector<std::size_t> stratify_by_activity(
    const std::vector<synth::UserRecord>& users, std::size_t n_levels = 5);

// Metrics of one scored test set, overall and per activity level. Level 0
// holds the lowest-activity users; displayed levels are 1-based.
struct MetricReport {
  std::size_t examples = 0;
  std::optional<double> auc;
  std::optional<double> gauc;
  std::vector<std::size_t> level_examples;          // [n_levels]
  std::vector<std::optional<double>> level_gauc;    // absent: no eligible user
  std::vector<std::optional<double>> level_alpha;   // mean fusion gate value

  bool operator==(const MetricReport&) const = default;
};

// Assembles the report. `alpha_fusion` is parallel to `examples` (or empty,
// leaving the alpha column absent); `user_levels` maps user_id -> level.
MetricReport build_report(const std::vector<ScoredExample>& examples,
                          const std::vector<double>& alpha_fusion,
                          const std::vector<std::size_t>& user_levels,
                          std::size_t n_levels = 5);

// Human-readable fixed-width table; absent metrics render as "-".
std::string format_report(const MetricReport& report);

// One line-delimited JSON record; absent metrics serialize as null.
// Byte-stable for equal reports.
std::string report_record(const MetricReport& report);

// An (x, y) series for plotting (metric vs level, vs group count, vs
// distillation weight, ...).
struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;

  bool operator==(const PlotSeries&) const = default;
};

// GAUC (or mean gate value) against the 1-based activity level; absent
// levels are skipped.
PlotSeries level_gauc_series(const MetricReport& report, std::string name);
PlotSeries level_alpha_series(const MetricReport& report, std::string name);

// Line-delimited records {"series", "x", "y"}, one per point, written
// atomically.
void save_plot_data(const std::vector<PlotSeries>& series,
                    const std::string& path);

}  // namespace grouprec::evalkit

#endif  // GROUPREC_EVALKIT_METRICS_HPP_
