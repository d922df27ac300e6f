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
// Semantic profile embeddings.
//
// Embeddings come from one of two sources: a remote embedding service (see
// remote_client.hpp) or the deterministic offline encoder defined here. The
// offline encoder is a pure function of the ProfileText contents: it mixes a
// category-frequency vector (placed in the leading coordinates, so prefix
// truncation preserves it), a hashed attribute-token vector, and a hashed
// bag-of-words vector of the rendered text, then normalizes to unit length.
// Users with similar purchase mixes and attributes therefore land near each
// other, which is the property the grouping stage relies on.
#ifndef GROUPREC_PROFILER_EMBEDDING_HPP_
#define GROUPREC_PROFILER_EMBEDDING_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "grouprec/profiler/profile_text.hpp"

namespace grouprec::profiler {

enum class EmbeddingSource { remote, offline_stub };

std::string to_string(EmbeddingSource source);
EmbeddingSource embedding_source_from_string(const std::string& text);

struct SemanticEmbedding {
  std::size_t user_id = 0;
  std::vector<double> vector;
  EmbeddingSource source = EmbeddingSource::offline_stub;
};

struct OfflineEncoderConfig {
  // Output dimension. Every embedding produced in a run has this dimension.
  std::size_t dim = 512;
  // Category c contributes at coordinate c % category_prefix_dims, keeping
  // the purchase-mix signal in the leading coordinates.
  std::size_t category_prefix_dims = 64;
  // Relative weights of the three unit-normalized components.
  double category_weight = 0.75;
  double attribute_weight = 0.55;
  double text_weight = 0.08;

  void validate() const;
};

// Deterministic embedding of one profile; unit Euclidean norm.
SemanticEmbedding encode_profile_offline(const ProfileText& profile,
                                         const OfflineEncoderConfig& config);

std::vector<SemanticEmbedding> encode_profiles_offline(
    const std::vector<ProfileText>& profiles,
    const OfflineEncoderConfig& config);

// Keeps the first target_dim coordinates and renormalizes to unit length.
// Policy for a zero prefix: the zero vector is returned unchanged (callers
// that require unit norm must check). Throws if target_dim exceeds the
// source dimension or is zero.
std::vector<double> truncate_matryoshka(const std::vector<double>& vector,
                                        std::size_t target_dim);

// Line-delimited JSON persistence ({"user_id", "source", "vector"}).
// Write is atomic (temp file + rename) and byte-stable for equal inputs.
void save_embeddings(const std::vector<SemanticEmbedding>& embeddings,
                     const std::string& path);
std::vector<SemanticEmbedding> load_embeddings(const std::string& path);

// Cosine similarity; returns 0 when either vector has zero norm.
double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

}  // namespace grouprec::profiler

#endif  // GROUPREC_PROFILER_EMBEDDING_HPP_
