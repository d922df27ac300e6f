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
// HTTP client for a remote text-embedding service.
//
// Wire protocol (JSON over POST):
//   request:  {"model": "<name>", "input": ["text", ...]}
//   response: {"embeddings": [[f, ...], ...]}   // one vector per input,
//                                               // same order, equal dims
// Non-2xx responses and transport errors are retried with exponential
// backoff up to the retry budget; exhaustion raises an error naming the
// first affected user. Texts are batched (at most max_batch_size per
// request) and batches may run concurrently up to max_in_flight.
//
// Results are cached on disk keyed by a content hash of (model, text), so
// re-running a pipeline never re-requests an embedding it already has; a
// cache hit returns the recorded vector byte-for-byte. The cache file is
// line-delimited: "<hash-hex> <dim> <v0> <v1> ...". Appends happen under a
// single writer lock.
#ifndef GROUPREC_PROFILER_REMOTE_CLIENT_HPP_
#define GROUPREC_PROFILER_REMOTE_CLIENT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "grouprec/profiler/embedding.hpp"
#include "grouprec/profiler/profile_text.hpp"

namespace grouprec::profiler {

struct EmbeddingClientConfig {
  std::string endpoint = "http://127.0.0.1:8753";
  std::string path = "/v1/embeddings";
  std::string model = "profile-embedder-v1";
  double timeout_seconds = 30.0;
  std::size_t max_in_flight = 2;     // concurrent requests (>= 1)
  std::size_t max_batch_size = 32;   // texts per request (>= 1)
  std::size_t retry_budget = 3;      // attempts per batch (>= 1)
  double backoff_initial_ms = 50.0;  // doubles per retry
  std::string cache_path;            // empty disables the on-disk cache

  void validate() const;
};

// In-memory view of the on-disk embedding cache.
class EmbeddingCache {
 public:
  // Loads `path` if it exists; a malformed line raises an error that names
  // the line number. An empty path yields an in-memory-only cache.
  explicit EmbeddingCache(std::string path);

  const std::vector<double>* find(std::uint64_t content_hash) const;
  // Records the entry and, when backed by a file, appends the line.
  void insert(std::uint64_t content_hash, const std::vector<double>& vector);
  std::size_t size() const { return entries_.size(); }

 private:
  std::string path_;
  std::unordered_map<std::uint64_t, std::vector<double>> entries_;
};

// Hash under which a (model, text) pair is cached.
std::uint64_t embedding_content_hash(const std::string& model,
                                     const std::string& text);

// Embeds every profile, consulting and filling the cache. Output order
// matches input order; all vectors share one dimension. Throws on exhausted
// retries, malformed responses, or dimension mismatches.
std::vector<SemanticEmbedding> encode_profiles_remote(
    const std::vector<ProfileText>& profiles,
    const EmbeddingClientConfig& config);

}  // namespace grouprec::profiler

#endif  // GROUPREC_PROFILER_REMOTE_CLIENT_HPP_
