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
#include "grouprec/profiler/remote_client.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"
#include "grouprec/util/io.hpp"
#include "grouprec/util/strings.hpp"

namespace grouprec::profiler {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t parse_hex_u64(const std::string& text) {
  require(!text.empty(), "empty hex field");
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 16);
  require(errno == 0 && end == text.c_str() + text.size(),
          "invalid hex field '", text, "'");
  return static_cast<std::uint64_t>(value);
}

std::string hex_u64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << value;
  return out.str();
}

std::string format_cache_line(std::uint64_t content_hash,
                              const std::vector<double>& vector) {
  std::ostringstream out;
  out << hex_u64(content_hash) << ' ' << vector.size();
  for (double v : vector) out << ' ' << fmt_double(v);
  return out.str();
}

}  // namespace

void EmbeddingClientConfig::validate() const {
  require(!endpoint.empty(), "embedding client: endpoint must not be empty");
  require(!path.empty() && path.front() == '/',
          "embedding client: path must start with '/', got '", path, "'");
  require(!model.empty(), "embedding client: model must not be empty");
  require(timeout_seconds > 0.0,
          "embedding client: timeout_seconds must be positive");
  require(max_in_flight >= 1,
          "embedding client: max_in_flight must be at least 1");
  require(max_batch_size >= 1,
          "embedding client: max_batch_size must be at least 1");
  require(retry_budget >= 1,
          "embedding client: retry_budget must be at least 1");
  require(backoff_initial_ms >= 0.0,
          "embedding client: backoff_initial_ms must be non-negative");
}

EmbeddingCache::EmbeddingCache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  const auto lines = read_lines(path_);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const auto fields = split(lines[i], ' ');
      require(fields.size() >= 2, "expected at least hash and dim");
      const std::uint64_t content_hash = parse_hex_u64(fields[0]);
      const long long dim = parse_int(fields[1]);
      require(dim >= 1, "dimension must be at least 1, got ", dim);
      require(static_cast<long long>(fields.size()) == 2 + dim,
              "expected ", 2 + dim, " fields, got ", fields.size());
      std::vector<double> vector(static_cast<std::size_t>(dim));
      for (long long d = 0; d < dim; ++d) {
        vector[static_cast<std::size_t>(d)] =
            parse_double(fields[static_cast<std::size_t>(2 + d)]);
      }
      entries_[content_hash] = std::move(vector);
    } catch (const Error& e) {
      fail("embedding cache corrupt at ", path_, ":", i + 1, ": ", e.what());
    }
  }
}

const std::vector<double>* EmbeddingCache::find(
    std::uint64_t content_hash) const {
  const auto it = entries_.find(content_hash);
  return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingCache::insert(std::uint64_t content_hash,
                            const std::vector<double>& vector) {
  if (entries_.count(content_hash) > 0) return;
  entries_[content_hash] = vector;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  require(out.good(), "cannot append to embedding cache at ", path_);
  out << format_cache_line(content_hash, vector) << '\n';
  require(out.good(), "write to embedding cache at ", path_, " failed");
}

std::uint64_t embedding_content_hash(const std::string& model,
                                     const std::string& text) {
  std::uint64_t h = fnv1a64(model);
  h = fnv1a64("\n", h);
  return fnv1a64(text, h);
}

std::vector<SemanticEmbedding> encode_profiles_remote(
    const std::vector<ProfileText>& profiles,
    const EmbeddingClientConfig& config) {
  config.validate();

  std::vector<std::string> texts(profiles.size());
  std::vector<std::uint64_t> hashes(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    texts[i] = profiles[i].render();
    hashes[i] = embedding_content_hash(config.model, texts[i]);
  }

  EmbeddingCache cache(config.cache_path);
  std::vector<std::optional<std::vector<double>>> results(profiles.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (const auto* hit = cache.find(hashes[i])) {
      results[i] = *hit;
    } else {
      pending.push_back(i);
    }
  }

  // Batch the uncached texts in input order.
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t offset = 0; offset < pending.size();
       offset += config.max_batch_size) {
    const std::size_t end =
        std::min(pending.size(), offset + config.max_batch_size);
    batches.emplace_back(pending.begin() + static_cast<std::ptrdiff_t>(offset),
                         pending.begin() + static_cast<std::ptrdiff_t>(end));
  }

  std::mutex mutex;  // guards results, cache, and first_error
  std::atomic<std::size_t> next_batch{0};
  std::atomic<bool> stop{false};
  std::string first_error;

  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(std::llround(config.timeout_seconds * 1000.0)));

  auto worker = [&]() {
    httplib::Client client(config.endpoint);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    while (!stop.load()) {
      const std::size_t batch_index = next_batch.fetch_add(1);
      if (batch_index >= batches.size()) return;
      const auto& batch = batches[batch_index];

      ordered_json request;
      request["model"] = config.model;
      auto& input = request["input"] = ordered_json::array();
      for (std::size_t index : batch) input.push_back(texts[index]);
      const std::string body = request.dump();

      std::string attempt_error;
      bool done = false;
      for (std::size_t attempt = 0; attempt < config.retry_budget && !done;
           ++attempt) {
        if (attempt > 0 && config.backoff_initial_ms > 0.0) {
          const double delay_ms = config.backoff_initial_ms *
                                  std::pow(2.0, static_cast<double>(attempt - 1));
          std::this_thread::sleep_for(std::chrono::milliseconds(
              static_cast<long long>(std::llround(delay_ms))));
        }
        auto response = client.Post(config.path, body, "application/json");
        if (!response) {
          attempt_error = "transport error: ";
          attempt_error += httplib::to_string(response.error());
          continue;
        }
        if (response->status < 200 || response->status >= 300) {
          attempt_error = "http status " + std::to_string(response->status);
          continue;
        }
        try {
          const auto parsed = ordered_json::parse(response->body);
          const auto& vectors = parsed.at("embeddings");
          require(vectors.is_array() && vectors.size() == batch.size(),
                  "response carries ", vectors.size(), " embeddings for ",
                  batch.size(), " inputs");
          std::lock_guard<std::mutex> lock(mutex);
          for (std::size_t j = 0; j < batch.size(); ++j) {
            auto vector = vectors.at(j).get<std::vector<double>>();
            require(!vector.empty(), "response embedding ", j, " is empty");
            cache.insert(hashes[batch[j]], vector);
            results[batch[j]] = std::move(vector);
          }
          done = true;
        } catch (const std::exception& e) {
          // Malformed payloads are not retried: the request reached the
          // service, so a retry would get the same answer.
          std::lock_guard<std::mutex> lock(mutex);
          if (first_error.empty()) {
            first_error = "malformed embedding response for user " +
                          std::to_string(profiles[batch.front()].user_id) +
                          ": " + e.what();
          }
          stop.store(true);
          return;
        }
      }
      if (!done) {
        std::lock_guard<std::mutex> lock(mutex);
        if (first_error.empty()) {
          first_error = "remote embedding failed for user " +
                        std::to_string(profiles[batch.front()].user_id) +
                        " after " + std::to_string(config.retry_budget) +
                        " attempts: " + attempt_error;
        }
        stop.store(true);
        return;
      }
    }
  };

  if (!batches.empty()) {
    const std::size_t thread_count =
        std::min(config.max_in_flight, batches.size());
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  require(first_error.empty(), first_error);

  // All vectors in a run must share one dimension (cache hits included).
  std::size_t dim = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    require(results[i].has_value(), "missing embedding for user ",
            profiles[i].user_id);
    if (dim == 0) dim = results[i]->size();
    require(results[i]->size() == dim, "embedding dimension mismatch for user ",
            profiles[i].user_id, ": got ", results[i]->size(), ", expected ",
            dim);
  }

  std::vector<SemanticEmbedding> out(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    out[i].user_id = profiles[i].user_id;
    out[i].source = EmbeddingSource::remote;
    out[i].vector = std::move(*results[i]);
  }
  return out;
}

}  // namespace grouprec::profiler
