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
#include "grouprec/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nlohmann/json.hpp"

#include "grouprec/util/error.hpp"
#include "grouprec/util/io.hpp"

namespace grouprec::evalkit {

using ordered_json = nlohmann::ordered_json;

namespace {

void validate_examples(const std::vector<ScoredExample>& examples) {
  for (const auto& e : examples) {
    require(std::isfinite(e.score), "auc: non-finite score ", e.score,
            " for user ", e.user_id);
    require(e.label == 0 || e.label == 1, "auc: label must be 0 or 1, got ",
            e.label, " for user ", e.user_id);
  }
}

// Average-rank Mann-Whitney AUC over pre-validated examples.
std::optional<double> auc_validated(const std::vector<ScoredExample>& examples) {
  std::size_t positives = 0;
  for (const auto& e : examples) positives += e.label;
  const std::size_t negatives = examples.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].score < examples[b].score;
  });

  // Walk tie groups; every member gets the group's average rank, which makes
  // each tied positive/negative pair contribute exactly one half.
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() &&
           examples[order[j]].score == examples[order[i]].score) {
      ++j;
    }
    const double average_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (examples[order[k]].label == 1) positive_rank_sum += average_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

std::string cell(const std::optional<double>& value) {
  if (!value) return "-";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << *value;
  return out.str();
}

ordered_json optional_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

std::optional<double> auc(const std::vector<ScoredExample>& examples) {
  validate_examples(examples);
  return auc_validated(examples);
}

std::optional<double> gauc(const std::vector<ScoredExample>& examples) {
  validate_examples(examples);

  // Group by user id; ascending user order keeps the summation (and thus
  // the floating-point result) deterministic.
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return examples[a].user_id < examples[b].user_id;
                   });

  double weighted_sum = 0.0;
  double total_weight = 0.0;
  std::vector<ScoredExample> block;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    block.clear();
    while (j < order.size() &&
           examples[order[j]].user_id == examples[order[i]].user_id) {
      block.push_back(examples[order[j]]);
      ++j;
    }
    if (const auto user_auc = auc_validated(block)) {
      const double weight = static_cast<double>(block.size());
      weighted_sum += weight * *user_auc;
      total_weight += weight;
    }
    i = j;
  }
  if (total_weight == 0.0) return std::nullopt;
  return weighted_sum / total_weight;
}

std::vector<std::size_t> stratify_by_activity(
    const std::vector<synth::UserRecord>& users, std::size_t n_levels) {
  require(n_levels >= 2, "stratify: need at least 2 levels, got ", n_levels);
  require(users.size() >= n_levels, "stratify: fewer users (", users.size(),
          ") than levels (", n_levels, ")");

  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (users[a].activity_count != users[b].activity_count) {
      return users[a].activity_count < users[b].activity_count;
    }
    return users[a].user_id < users[b].user_id;
  });

  std::vector<std::size_t> levels(users.size());
  const std::size_t base = users.size() / n_levels;
  const std::size_t remainder = users.size() % n_levels;
  std::size_t position = 0;
  for (std::size_t level = 0; level < n_levels; ++level) {
    const std::size_t count = base + (level < remainder ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      levels[order[position++]] = level;
    }
  }
  return levels;
}

MetricReport build_report(const std::vector<ScoredExample>& examples,
                          const std::vector<double>& alpha_fusion,
                          const std::vector<std::size_t>& user_levels,
                          std::size_t n_levels) {
  require(n_levels >= 1, "report: need at least one level");
  require(alpha_fusion.empty() || alpha_fusion.size() == examples.size(),
          "report: ", alpha_fusion.size(), " gate values for ",
          examples.size(), " examples");

  MetricReport report;
  report.examples = examples.size();
  report.auc = auc(examples);
  report.gauc = gauc(examples);
  report.level_examples.assign(n_levels, 0);
  report.level_gauc.assign(n_levels, std::nullopt);
  report.level_alpha.assign(n_levels, std::nullopt);

  std::vector<std::vector<ScoredExample>> per_level(n_levels);
  std::vector<double> alpha_sum(n_levels, 0.0);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const std::size_t user = examples[i].user_id;
    require(user < user_levels.size(), "report: user ", user,
            " has no activity level");
    const std::size_t level = user_levels[user];
    require(level < n_levels, "report: user ", user, " has level ", level,
            " outside [0, ", n_levels, ")");
    per_level[level].push_back(examples[i]);
    ++report.level_examples[level];
    if (!alpha_fusion.empty()) alpha_sum[level] += alpha_fusion[i];
  }
  for (std::size_t level = 0; level < n_levels; ++level) {
    if (!per_level[level].empty()) {
      report.level_gauc[level] = gauc(per_level[level]);
    }
    if (!alpha_fusion.empty() && report.level_examples[level] > 0) {
      report.level_alpha[level] =
          alpha_sum[level] / static_cast<double>(report.level_examples[level]);
    }
  }
  return report;
}

std::string format_report(const MetricReport& report) {
  std::ostringstream out;
  out << "overall: auc " << cell(report.auc) << "  gauc " << cell(report.gauc)
      << "  (" << report.examples << " examples)\n";
  out << "level  examples  gauc    mean_gate\n";
  for (std::size_t level = 0; level < report.level_gauc.size(); ++level) {
    out << level + 1 << "      ";
    std::string count = std::to_string(report.level_examples[level]);
    count.resize(10, ' ');
    out << count << cell(report.level_gauc[level]) << "  "
        << cell(report.level_alpha[level]) << "\n";
  }
  return out.str();
}

std::string report_record(const MetricReport& report) {
  ordered_json record;
  record["examples"] = report.examples;
  record["auc"] = optional_json(report.auc);
  record["gauc"] = optional_json(report.gauc);
  record["level_examples"] = report.level_examples;
  auto level_gauc = ordered_json::array();
  for (const auto& value : report.level_gauc) {
    level_gauc.push_back(optional_json(value));
  }
  record["level_gauc"] = std::move(level_gauc);
  auto level_alpha = ordered_json::array();
  for (const auto& value : report.level_alpha) {
    level_alpha.push_back(optional_json(value));
  }
  record["level_alpha"] = std::move(level_alpha);
  return record.dump();
}

PlotSeries level_gauc_series(const MetricReport& report, std::string name) {
  PlotSeries series;
  series.name = std::move(name);
  for (std::size_t level = 0; level < report.level_gauc.size(); ++level) {
    if (report.level_gauc[level]) {
      series.points.emplace_back(static_cast<double>(level + 1),
                                 *report.level_gauc[level]);
    }
  }
  return series;
}

PlotSeries level_alpha_series(const MetricReport& report, std::string name) {
  PlotSeries series;
  series.name = std::move(name);
  for (std::size_t level = 0; level < report.level_alpha.size(); ++level) {
    if (report.level_alpha[level]) {
      series.points.emplace_back(static_cast<double>(level + 1),
                                 *report.level_alpha[level]);
    }
  }
  return series;
}

void save_plot_data(const std::vector<PlotSeries>& series,
                    const std::string& path) {
  std::ostringstream out;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      ordered_json record;
      record["series"] = s.name;
      record["x"] = x;
      record["y"] = y;
      out << record.dump() << "\n";
    }
  }
  write_file(path, out.str());
}

}  // namespace grouprec::evalkit
