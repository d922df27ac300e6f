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
// Residual-quantization k-means: hierarchical group codes for embeddings.
//
// Stage 1 clusters the embeddings themselves; stage m clusters the residuals
// left over after subtracting each point's stage-(m-1) centroid. A point's
// group code is the tuple of its centroid indices across stages, so code
// prefixes form a coarse-to-fine hierarchy: points sharing a longer prefix
// sit closer in embedding space.
//
// Determinism: a fixed (points, seed, config) triple reproduces identical
// codebooks and codes on a given kernel backend. Stage m draws its RNG from
// derive_seed(seed, "rq-stage-<m>"), which is part of this interface. All
// nearest-centroid ties break toward the lowest index. Distances are
// Euclidean: inputs are unit-norm embeddings (where Euclidean order equals
// cosine order); residuals at stages >= 2 are not unit-norm.
#ifndef GROUPREC_GROUPER_RQ_KMEANS_HPP_
#define GROUPREC_GROUPER_RQ_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace grouprec::grouper {

// One stage's centroids, row-major k x dim. All values finite.
struct Codebook {
  std::size_t stage = 1;  // 1-based stage number
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;

  const double* centroid(std::size_t index) const;
  void validate() const;
};

// Hierarchical group id: one centroid index per stage.
struct GroupCode {
  std::vector<std::size_t> indices;

  bool operator==(const GroupCode& other) const = default;
};

// "3:7:1"-style key for the first `levels` stages (levels = 0 means all).
// Useful as a map key for grouping users by code prefix.
std::string group_key(const GroupCode& code, std::size_t levels = 0);

struct Assignment {
  std::size_t index = 0;
  std::vector<double> residual;  // point - chosen centroid, computed exactly
};

// k-means++ seeding: first centroid uniform, later ones sampled with
// probability proportional to squared distance from the chosen set.
// Exposed so an external reference can run from the identical start.
std::vector<double> kmeans_plus_plus_init(
    const std::vector<std::vector<double>>& points, std::size_t k,
    std::uint64_t seed);

// Lloyd iterations from k-means++ seeding. Stops when every centroid moves
// less than `tol` (Euclidean) in one update or after max_iters. Clusters
// that come out of an assignment empty are re-seeded with the point
// currently farthest from its own centroid (ties: lowest point index),
// drawn only from clusters that still have at least two members.
// If `objective_trace` is non-null it receives the within-cluster squared
// error observed at each assignment step. Requires 1 <= k <= #points.
Codebook kmeans_fit(const std::vector<std::vector<double>>& points,
                    std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 50, double tol = 1e-9,
                    std::vector<double>* objective_trace = nullptr);

// Nearest centroid (lowest index on ties) plus the exact residual.
Assignment assign(const std::vector<double>& point, const Codebook& codebook);

struct RqResult {
  std::vector<Codebook> codebooks;  // one per stage, stages 1..M
  std::vector<GroupCode> codes;     // one per input point, length M each
  // mean_residual_norms[m] = mean Euclidean norm of the stage-m residuals;
  // entry 0 is the mean input norm. Nonincreasing in m.
  std::vector<double> mean_residual_norms;
};

// Fits M stages of k-means over successive residuals and assigns every
// point a length-M group code.
RqResult rq_kmeans_fit(const std::vector<std::vector<double>>& points,
                       std::size_t stages, std::size_t k, std::uint64_t seed,
                       std::size_t max_iters = 50, double tol = 1e-9);

// Sum of the selected centroid rows across stages (the quantized point).
std::vector<double> reconstruct(const GroupCode& code,
                                const std::vector<Codebook>& codebooks);

// Codebook file: text header ("stages", "k", "dim") plus one line of
// centroid values per (stage, centroid). Round-trips bit-exactly.
void save_codebooks(const std::vector<Codebook>& codebooks,
                    const std::string& path);
std::vector<Codebook> load_codebooks(const std::string& path);

// Assignment file: one line per user, "user_id id1 ... idM".
struct GroupAssignments {
  std::vector<std::size_t> user_ids;
  std::vector<GroupCode> codes;
};
void save_group_codes(const GroupAssignments& assignments,
                      const std::string& path);
GroupAssignments load_group_codes(const std::string& path);

}  // namespace grouprec::grouper

#endif  // GROUPREC_GROUPER_RQ_KMEANS_HPP_
