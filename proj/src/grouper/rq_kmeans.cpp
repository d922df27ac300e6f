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
#include "grouprec/grouper/rq_kmeans.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "grouprec/kernels/kernels.hpp"
#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"
#include "grouprec/util/io.hpp"
#include "grouprec/util/rng.hpp"
#include "grouprec/util/strings.hpp"

namespace grouprec::grouper {
namespace {

// Flattens to row-major and validates shape and finiteness.
std::vector<double> flatten_points(
    const std::vector<std::vector<double>>& points, std::size_t& dim) {
  require(!points.empty(), "k-means: need at least one point");
  dim = points.front().size();
  require(dim >= 1, "k-means: points must have dimension >= 1");
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].size() == dim, "k-means: point ", i, " has dimension ",
            points[i].size(), ", expected ", dim);
    for (const double v : points[i]) {
      require(std::isfinite(v), "k-means: point ", i,
              " has a non-finite coordinate");
      flat.push_back(v);
    }
  }
  return flat;
}

double point_norm(const double* values, std::size_t dim) {
  return std::sqrt(kernels::active().dot(dim, values, values));
}

}  // namespace

const double* Codebook::centroid(std::size_t index) const {
  require(index < k, "codebook stage ", stage, ": centroid index ", index,
          " out of range [0, ", k, ")");
  return centroids.data() + index * dim;
}

void Codebook::validate() const {
  require(k >= 1 && dim >= 1, "codebook stage ", stage,
          ": k and dim must be >= 1");
  require(centroids.size() == k * dim, "codebook stage ", stage,
          ": expected ", k * dim, " values, got ", centroids.size());
  for (const double v : centroids) {
    require(std::isfinite(v), "codebook stage ", stage,
            " contains a non-finite centroid value");
  }
}

std::string group_key(const GroupCode& code, std::size_t levels) {
  const std::size_t depth =
      levels == 0 ? code.indices.size()
                  : std::min(levels, code.indices.size());
  std::ostringstream out;
  for (std::size_t m = 0; m < depth; ++m) {
    if (m > 0) out << ':';
    out << code.indices[m];
  }
  return out.str();
}

std::vector<double> kmeans_plus_plus_init(
    const std::vector<std::vector<double>>& points, std::size_t k,
    std::uint64_t seed) {
  std::size_t dim = 0;
  const auto flat = flatten_points(points, dim);
  const std::size_t n = points.size();
  require(k >= 1, "k-means: k must be >= 1");
  require(k <= n, "k-means: k = ", k, " exceeds point count ", n);

  const auto& backend = kernels::active();
  Rng rng(seed);
  std::vector<double> centroids(k * dim, 0.0);

  const std::size_t first = rng.uniform_index(n);
  std::copy_n(flat.data() + first * dim, dim, centroids.begin());

  // Squared distance from each point to its nearest chosen centroid.
  std::vector<double> nearest_d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    nearest_d2[i] = backend.squared_l2(dim, flat.data() + i * dim,
                                       centroids.data());
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (const double d2 : nearest_d2) total += d2;
    // All residual mass zero (duplicated points): fall back to uniform.
    const std::size_t chosen =
        total > 0.0 ? rng.categorical(nearest_d2) : rng.uniform_index(n);
    double* row = centroids.data() + c * dim;
    std::copy_n(flat.data() + chosen * dim, dim, row);
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = backend.squared_l2(dim, flat.data() + i * dim, row);
      if (d2 < nearest_d2[i]) nearest_d2[i] = d2;
    }
  }
  return centroids;
}

Codebook kmeans_fit(const std::vector<std::vector<double>>& points,
                    std::size_t k, std::uint64_t seed, std::size_t max_iters,
                    double tol, std::vector<double>* objective_trace) {
  std::size_t dim = 0;
  const auto flat = flatten_points(points, dim);
  const std::size_t n = points.size();
  require(max_iters >= 1, "k-means: max_iters must be >= 1");
  require(tol >= 0.0, "k-means: tol must be non-negative");

  Codebook codebook;
  codebook.stage = 1;
  codebook.k = k;
  codebook.dim = dim;
  codebook.centroids = kmeans_plus_plus_init(points, k, seed);

  const auto& backend = kernels::active();
  std::vector<std::size_t> assignment(n, 0);
  std::vector<double> distance(n, 0.0);
  std::vector<std::size_t> counts(k, 0);
  std::vector<double> next(k * dim, 0.0);
  if (objective_trace) objective_trace->clear();

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // Assignment step (ties toward the lowest centroid index).
    double objective = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      assignment[i] = backend.nearest_centroid(
          k, dim, flat.data() + i * dim, codebook.centroids.data(),
          &distance[i]);
      objective += distance[i];
      ++counts[assignment[i]];
    }
    if (objective_trace) objective_trace->push_back(objective);

    // Re-seed empty clusters with the farthest point of a cluster that can
    // spare one (>= 2 members); always possible while k <= n.
    for (std::size_t empty = 0; empty < k; ++empty) {
      if (counts[empty] > 0) continue;
      std::size_t farthest = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignment[i]] < 2) continue;
        if (farthest == n || distance[i] > distance[farthest]) farthest = i;
      }
      require(farthest < n, "k-means: no donor point for empty cluster ",
              empty);
      std::copy_n(flat.data() + farthest * dim, dim,
                  codebook.centroids.data() + empty * dim);
      --counts[assignment[farthest]];
      assignment[farthest] = empty;
      counts[empty] = 1;
      distance[farthest] = 0.0;
    }

    // Update step: centroid = mean of its members.
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      backend.axpy(dim, 1.0, flat.data() + i * dim,
                   next.data() + assignment[i] * dim);
    }
    double max_move = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double* row = next.data() + c * dim;
      backend.scale(dim, 1.0 / static_cast<double>(counts[c]), row);
      const double move = std::sqrt(
          backend.squared_l2(dim, row, codebook.centroids.data() + c * dim));
      if (move > max_move) max_move = move;
    }
    codebook.centroids.swap(next);
    if (max_move < tol) break;
  }
  codebook.validate();
  return codebook;
}

Assignment assign(const std::vector<double>& point, const Codebook& codebook) {
  require(point.size() == codebook.dim, "assign: point dimension ",
          point.size(), " does not match codebook dimension ", codebook.dim);
  Assignment out;
  out.index = kernels::active().nearest_centroid(
      codebook.k, codebook.dim, point.data(), codebook.centroids.data(),
      nullptr);
  const double* row = codebook.centroid(out.index);
  out.residual.resize(codebook.dim);
  for (std::size_t d = 0; d < codebook.dim; ++d) {
    out.residual[d] = point[d] - row[d];
  }
  return out;
}

RqResult rq_kmeans_fit(const std::vector<std::vector<double>>& points,
                       std::size_t stages, std::size_t k, std::uint64_t seed,
                       std::size_t max_iters, double tol) {
  require(stages >= 1, "residual quantization: need at least one stage");
  const std::size_t n = points.size();

  RqResult result;
  result.codes.assign(n, GroupCode{});
  result.codebooks.reserve(stages);

  std::vector<std::vector<double>> residuals = points;
  auto mean_norm = [&residuals]() {
    double total = 0.0;
    for (const auto& r : residuals) total += point_norm(r.data(), r.size());
    return total / static_cast<double>(residuals.size());
  };
  std::size_t dim = 0;
  flatten_points(residuals, dim);  // validates once up front
  result.mean_residual_norms.push_back(mean_norm());

  for (std::size_t m = 1; m <= stages; ++m) {
    const std::uint64_t stage_seed =
        derive_seed(seed, "rq-stage-" + std::to_string(m));
    Codebook codebook = kmeans_fit(residuals, k, stage_seed, max_iters, tol);
    codebook.stage = m;
    for (std::size_t i = 0; i < n; ++i) {
      Assignment a = assign(residuals[i], codebook);
      result.codes[i].indices.push_back(a.index);
      residuals[i] = std::move(a.residual);
    }
    result.codebooks.push_back(std::move(codebook));
    result.mean_residual_norms.push_back(mean_norm());
  }
  return result;
}

std::vector<double> reconstruct(const GroupCode& code,
                                const std::vector<Codebook>& codebooks) {
  require(!codebooks.empty(), "reconstruct: no codebooks");
  require(code.indices.size() == codebooks.size(),
          "reconstruct: code has ", code.indices.size(), " stages, expected ",
          codebooks.size());
  const std::size_t dim = codebooks.front().dim;
  std::vector<double> out(dim, 0.0);
  for (std::size_t m = 0; m < codebooks.size(); ++m) {
    require(codebooks[m].dim == dim, "reconstruct: stage ", m + 1,
            " dimension mismatch");
    const double* row = codebooks[m].centroid(code.indices[m]);
    kernels::active().axpy(dim, 1.0, row, out.data());
  }
  return out;
}

void save_codebooks(const std::vector<Codebook>& codebooks,
                    const std::string& path) {
  require(!codebooks.empty(), "save_codebooks: nothing to save");
  const std::size_t k = codebooks.front().k;
  const std::size_t dim = codebooks.front().dim;
  std::ostringstream out;
  out << "grouprec-codebooks v1\n";
  out << "stages " << codebooks.size() << " k " << k << " dim " << dim
      << '\n';
  for (std::size_t m = 0; m < codebooks.size(); ++m) {
    const auto& codebook = codebooks[m];
    codebook.validate();
    require(codebook.k == k && codebook.dim == dim,
            "save_codebooks: stage ", m + 1, " shape differs");
    for (std::size_t c = 0; c < k; ++c) {
      const double* row = codebook.centroid(c);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d > 0) out << ' ';
        out << fmt_double(row[d]);
      }
      out << '\n';
    }
  }
  write_file(path, out.str());
}

std::vector<Codebook> load_codebooks(const std::string& path) {
  const auto lines = read_lines(path);
  require(lines.size() >= 2, "codebook file ", path, ": missing header");
  require(lines[0] == "grouprec-codebooks v1", "codebook file ", path,
          ": unknown format line '", lines[0], "'");
  const auto header = split(lines[1], ' ');
  require(header.size() == 6 && header[0] == "stages" && header[2] == "k" &&
              header[4] == "dim",
          "codebook file ", path, ": malformed header '", lines[1], "'");
  const std::size_t stages = static_cast<std::size_t>(parse_int(header[1]));
  const std::size_t k = static_cast<std::size_t>(parse_int(header[3]));
  const std::size_t dim = static_cast<std::size_t>(parse_int(header[5]));
  require(stages >= 1 && k >= 1 && dim >= 1, "codebook file ", path,
          ": header values must be >= 1");
  require(lines.size() >= 2 + stages * k, "codebook file ", path,
          ": expected ", stages * k, " centroid lines, found ",
          lines.size() - 2);

  std::vector<Codebook> codebooks(stages);
  std::size_t line = 2;
  for (std::size_t m = 0; m < stages; ++m) {
    auto& codebook = codebooks[m];
    codebook.stage = m + 1;
    codebook.k = k;
    codebook.dim = dim;
    codebook.centroids.resize(k * dim);
    for (std::size_t c = 0; c < k; ++c, ++line) {
      const auto fields = split(lines[line], ' ');
      require(fields.size() == dim, "codebook file ", path, ":", line + 1,
              ": expected ", dim, " values, got ", fields.size());
      for (std::size_t d = 0; d < dim; ++d) {
        codebook.centroids[c * dim + d] = parse_double(fields[d]);
      }
    }
    codebook.validate();
  }
  return codebooks;
}

void save_group_codes(const GroupAssignments& assignments,
                      const std::string& path) {
  require(assignments.user_ids.size() == assignments.codes.size(),
          "save_group_codes: ", assignments.user_ids.size(), " user ids vs ",
          assignments.codes.size(), " codes");
  std::ostringstream out;
  for (std::size_t i = 0; i < assignments.user_ids.size(); ++i) {
    out << assignments.user_ids[i];
    for (const std::size_t index : assignments.codes[i].indices) {
      out << ' ' << index;
    }
    out << '\n';
  }
  write_file(path, out.str());
}

GroupAssignments load_group_codes(const std::string& path) {
  GroupAssignments out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], ' ');
    require(fields.size() >= 2, "group code file ", path, ":", i + 1,
            ": expected user id and at least one index");
    GroupCode code;
    out.user_ids.push_back(static_cast<std::size_t>(parse_int(fields[0])));
    for (std::size_t f = 1; f < fields.size(); ++f) {
      code.indices.push_back(static_cast<std::size_t>(parse_int(fields[f])));
    }
    if (!out.codes.empty()) {
      require(code.indices.size() == out.codes.front().indices.size(),
              "group code file ", path, ":", i + 1,
              ": inconsistent stage count");
    }
    out.codes.push_back(std::move(code));
  }
  return out;
}

}  // namespace grouprec::grouper
