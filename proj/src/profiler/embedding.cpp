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
#include "grouprec/profiler/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"
#include "grouprec/util/io.hpp"

namespace grouprec::profiler {
namespace {

using ordered_json = nlohmann::ordered_json;

double vector_norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

// Normalizes in place; returns false when the vector is all zero.
bool normalize_in_place(std::vector<double>& v) {
  const double norm = vector_norm(v);
  if (norm == 0.0) return false;
  for (double& x : v) x /= norm;
  return true;
}

// Adds `weight * unit(component)` into `accum`; no-op for zero components.
void add_component(std::vector<double>& accum, std::vector<double> component,
                   double weight) {
  if (weight == 0.0) return;
  if (!normalize_in_place(component)) return;
  for (std::size_t i = 0; i < accum.size(); ++i) {
    accum[i] += weight * component[i];
  }
}

// Feature-hashes a token: coordinate from the low hash bits, sign from an
// independent bit so collisions cancel instead of piling up.
void hash_token_into(std::vector<double>& v, std::string_view token,
                     std::uint64_t seed, double weight) {
  const std::uint64_t h = fnv1a64(token, seed);
  const std::size_t index = static_cast<std::size_t>(h % v.size());
  const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
  v[index] += sign * weight;
}

}  // namespace

std::string to_string(EmbeddingSource source) {
  switch (source) {
    case EmbeddingSource::remote:
      return "remote";
    case EmbeddingSource::offline_stub:
      return "offline_stub";
  }
  fail("unknown embedding source value ", static_cast<int>(source));
}

EmbeddingSource embedding_source_from_string(const std::string& text) {
  if (text == "remote") return EmbeddingSource::remote;
  if (text == "offline_stub") return EmbeddingSource::offline_stub;
  fail("unknown embedding source '", text, "'");
}

void OfflineEncoderConfig::validate() const {
  require(dim >= 1, "offline encoder: dim must be at least 1");
  require(category_prefix_dims >= 1 && category_prefix_dims <= dim,
          "offline encoder: category_prefix_dims must be in [1, dim], got ",
          category_prefix_dims, " with dim ", dim);
  require(category_weight >= 0.0 && attribute_weight >= 0.0 &&
              text_weight >= 0.0,
          "offline encoder: component weights must be non-negative");
  require(category_weight + attribute_weight + text_weight > 0.0,
          "offline encoder: at least one component weight must be positive");
}

SemanticEmbedding encode_profile_offline(const ProfileText& profile,
                                         const OfflineEncoderConfig& config) {
  config.validate();
  static const std::uint64_t kAttributeSeed = fnv1a64("attribute-token");
  static const std::uint64_t kTextSeed = fnv1a64("text-token");

  // Category-frequency component, confined to the leading coordinates so
  // prefix truncation keeps the purchase-mix signal.
  std::vector<double> category_component(config.dim, 0.0);
  long long total_purchases = 0;
  for (const auto& [category, count] : profile.category_counts) {
    total_purchases += count;
  }
  if (total_purchases > 0) {
    for (const auto& [category, count] : profile.category_counts) {
      const std::size_t index = static_cast<std::size_t>(category) %
                                config.category_prefix_dims;
      category_component[index] +=
          static_cast<double>(count) / static_cast<double>(total_purchases);
    }
  }

  // Attribute component: one hashed token per observed attribute value.
  std::vector<double> attribute_component(config.dim, 0.0);
  for (std::size_t field = 0; field < profile.attribute_values.size();
       ++field) {
    const int value = profile.attribute_values[field];
    if (value == synth::kMissingAttribute) continue;
    std::ostringstream token;
    token << synth::attribute_field_name(field) << '=' << value;
    hash_token_into(attribute_component, token.str(), kAttributeSeed, 1.0);
  }

  // Bag-of-words component over the full rendered document.
  std::vector<double> text_component(config.dim, 0.0);
  const std::string document = profile.render();
  std::size_t pos = 0;
  while (pos < document.size()) {
    while (pos < document.size() &&
           std::isspace(static_cast<unsigned char>(document[pos]))) {
      ++pos;
    }
    std::size_t end = pos;
    while (end < document.size() &&
           !std::isspace(static_cast<unsigned char>(document[end]))) {
      ++end;
    }
    if (end > pos) {
      hash_token_into(text_component,
                      std::string_view(document).substr(pos, end - pos),
                      kTextSeed, 1.0);
    }
    pos = end;
  }

  SemanticEmbedding embedding;
  embedding.user_id = profile.user_id;
  embedding.source = EmbeddingSource::offline_stub;
  embedding.vector.assign(config.dim, 0.0);
  add_component(embedding.vector, std::move(category_component),
                config.category_weight);
  add_component(embedding.vector, std::move(attribute_component),
                config.attribute_weight);
  add_component(embedding.vector, std::move(text_component),
                config.text_weight);
  require(normalize_in_place(embedding.vector),
          "offline encoder produced a zero embedding for user ",
          profile.user_id);
  return embedding;
}

std::vector<SemanticEmbedding> encode_profiles_offline(
    const std::vector<ProfileText>& profiles,
    const OfflineEncoderConfig& config) {
  std::vector<SemanticEmbedding> out;
  out.reserve(profiles.size());
  for (const auto& profile : profiles) {
    out.push_back(encode_profile_offline(profile, config));
  }
  return out;
}

std::vector<double> truncate_matryoshka(const std::vector<double>& vector,
                                        std::size_t target_dim) {
  require(target_dim >= 1, "matryoshka truncation: target_dim must be >= 1");
  require(target_dim <= vector.size(),
          "matryoshka truncation: target_dim ", target_dim,
          " exceeds source dimension ", vector.size());
  std::vector<double> out(vector.begin(),
                          vector.begin() + static_cast<std::ptrdiff_t>(
                                               target_dim));
  normalize_in_place(out);  // zero prefix stays zero by policy
  return out;
}

void save_embeddings(const std::vector<SemanticEmbedding>& embeddings,
                     const std::string& path) {
  std::ostringstream out;
  for (const auto& embedding : embeddings) {
    ordered_json record;
    record["user_id"] = embedding.user_id;
    record["source"] = to_string(embedding.source);
    record["vector"] = embedding.vector;
    out << record.dump() << '\n';
  }
  write_file(path, out.str());
}

std::vector<SemanticEmbedding> load_embeddings(const std::string& path) {
  std::vector<SemanticEmbedding> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const auto record = ordered_json::parse(lines[i]);
      SemanticEmbedding embedding;
      embedding.user_id = record.at("user_id").get<std::size_t>();
      embedding.source = embedding_source_from_string(
          record.at("source").get<std::string>());
      embedding.vector = record.at("vector").get<std::vector<double>>();
      out.push_back(std::move(embedding));
    } catch (const ordered_json::exception& e) {
      fail("failed to parse embedding record at ", path, ":", i + 1, ": ",
           e.what());
    }
  }
  return out;
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  require(a.size() == b.size(), "cosine similarity: dimension mismatch ",
          a.size(), " vs ", b.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double na = vector_norm(a);
  const double nb = vector_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

}  // namespace grouprec::profiler
