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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "grouprec/profiler/embedding.hpp"
#include "grouprec/profiler/profile_text.hpp"
#include "grouprec/profiler/remote_client.hpp"
#include "grouprec/synth/world.hpp"
#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"
#include "grouprec/util/io.hpp"

using namespace grouprec;
using namespace grouprec::profiler;
namespace fs = std::filesystem;

namespace {

// Independent cosine oracle (long double accumulation).
double cosine_oracle(const std::vector<double>& a,
                     const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  long double dot = 0.0L, na = 0.0L, nb = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  REQUIRE(na > 0.0L);
  REQUIRE(nb > 0.0L);
  return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

double norm_of(const std::vector<double>& v) {
  long double sum = 0.0L;
  for (double x : v) sum += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(sum));
}

synth::UserRecord sample_user() {
  synth::UserRecord user;
  user.user_id = 42;
  user.static_attributes = {2, synth::kMissingAttribute, 0};
  // Timestamps nondecreasing; one event after the reference time (13.0).
  user.purchase_log = {{7, 3, 1.0},
                       {5, 5, 12.0},
                       {9, 3, 13.0},
                       {11, 7, 13.0},
                       {6, 9, 13.5}};
  user.search_queries = {{{"cat_9"}, 2.0},
                         {{"cat_3"}, 10.0},
                         {{"cat_3", "cat_1"}, 12.5},
                         {{"cat_4"}, 13.5}};
  user.activity_count = user.purchase_log.size();
  return user;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("profile text aggregates purchases per window in category order") {
  const auto user = sample_user();
  const ProfileWindows windows{13.0, 1.0, 4.0};
  const auto profile = build_profile_text(user, windows);

  CHECK(profile.user_id == 42);
  CHECK(profile.static_attributes == "attr_0=2 attr_1=missing attr_2=0");
  // Recent window is (12, 13]: the t=12.0 purchase falls outside, the two
  // t=13.0 purchases fall inside, the t=13.5 one is after the reference.
  CHECK(profile.behaviors_recent == "cat_3:1 cat_7:1");
  CHECK(profile.behaviors_medium == "cat_3:1 cat_5:1 cat_7:1");
  CHECK(profile.behaviors_long == "cat_3:2 cat_5:1 cat_7:1");
  // Queries aggregate over the medium window (9, 13], tokens sorted.
  CHECK(profile.recent_queries == "cat_1:1 cat_3:2");

  REQUIRE(profile.category_counts.size() == 3);
  CHECK(profile.category_counts[0] == std::pair<std::size_t, long long>{3, 2});
  CHECK(profile.category_counts[1] == std::pair<std::size_t, long long>{5, 1});
  CHECK(profile.category_counts[2] == std::pair<std::size_t, long long>{7, 1});
  CHECK(profile.attribute_values == user.static_attributes);
}

TEST_CASE("profile text window counting matches the hand-derived example") {
  // Purchases (A, t=1), (A, t=13), (B, t=13) with a one-unit recent window:
  // recent = {A:1, B:1}, long = {A:2, B:1}.
  synth::UserRecord user;
  user.user_id = 7;
  user.purchase_log = {{0, 3, 1.0}, {1, 3, 13.0}, {2, 7, 13.0}};
  const auto profile = build_profile_text(user, ProfileWindows{13.0, 1.0, 4.0});
  CHECK(profile.behaviors_recent == "cat_3:1 cat_7:1");
  CHECK(profile.behaviors_long == "cat_3:2 cat_7:1");
}

TEST_CASE("profile text spells out empty sections") {
  synth::UserRecord user;
  user.user_id = 9;
  const auto profile = build_profile_text(user, ProfileWindows{});
  CHECK(profile.static_attributes == "none recorded");
  CHECK(profile.behaviors_recent == "no purchases");
  CHECK(profile.behaviors_medium == "no purchases");
  CHECK(profile.behaviors_long == "no purchases");
  CHECK(profile.recent_queries == "no queries");
  CHECK(profile.category_counts.empty());

  const std::string expected =
      "user profile 9\n"
      "static attributes: none recorded\n"
      "recent purchases: no purchases\n"
      "medium-term purchases: no purchases\n"
      "long-term purchases: no purchases\n"
      "recent queries: no queries\n";
  CHECK(profile.render() == expected);
}

TEST_CASE("profile text building is deterministic") {
  const auto user = sample_user();
  const ProfileWindows windows{13.0, 1.0, 4.0};
  CHECK(build_profile_text(user, windows).render() ==
        build_profile_text(user, windows).render());
}

TEST_CASE("profile windows validate span ordering") {
  CHECK_THROWS_AS((ProfileWindows{13.0, 4.0, 4.0}.validate()), Error);
  CHECK_THROWS_AS((ProfileWindows{13.0, 5.0, 4.0}.validate()), Error);
  CHECK_THROWS_AS((ProfileWindows{13.0, 0.0, 4.0}.validate()), Error);
  CHECK_THROWS_AS((ProfileWindows{13.0, -1.0, 4.0}.validate()), Error);
  CHECK_NOTHROW((ProfileWindows{13.0, 1.0, 4.0}.validate()));
}

TEST_CASE("matryoshka truncation keeps the prefix and renormalizes") {
  const std::vector<double> v{3.0, 4.0, 0.0, 0.0};
  const auto two = truncate_matryoshka(v, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(0.8).epsilon(1e-15));

  // target_dim == source dim degenerates to plain normalization.
  const auto full = truncate_matryoshka(v, 4);
  REQUIRE(full.size() == 4);
  CHECK(full[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(full[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(full[2] == 0.0);
  CHECK(full[3] == 0.0);

  // A zero prefix stays zero by policy rather than raising.
  const auto zero = truncate_matryoshka({0.0, 0.0, 1.0}, 2);
  CHECK(zero == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(truncate_matryoshka(v, 5), Error);
  CHECK_THROWS_AS(truncate_matryoshka(v, 0), Error);
}

TEST_CASE("offline encoder is deterministic, unit-norm, and truncatable") {
  const auto profile = build_profile_text(sample_user(), ProfileWindows{});
  OfflineEncoderConfig config;
  const auto a = encode_profile_offline(profile, config);
  const auto b = encode_profile_offline(profile, config);
  CHECK(a.user_id == 42);
  CHECK(a.source == EmbeddingSource::offline_stub);
  REQUIRE(a.vector.size() == config.dim);
  CHECK(bitwise_equal(a.vector, b.vector));
  CHECK(std::abs(norm_of(a.vector) - 1.0) <= 1e-9);

  const auto truncated = truncate_matryoshka(a.vector, 64);
  REQUIRE(truncated.size() == 64);
  CHECK(std::abs(norm_of(truncated) - 1.0) <= 1e-9);
}

TEST_CASE("offline encoder config validation") {
  OfflineEncoderConfig config;
  config.dim = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.category_prefix_dims = 1024;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.text_weight = -0.1;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.category_weight = 0.0;
  config.attribute_weight = 0.0;
  config.text_weight = 0.0;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("offline encoder raises on an all-zero embedding") {
  synth::UserRecord user;  // no purchases, no attributes
  user.user_id = 1;
  const auto profile = build_profile_text(user, ProfileWindows{});
  OfflineEncoderConfig config;
  config.category_weight = 1.0;
  config.attribute_weight = 0.0;
  config.text_weight = 0.0;
  CHECK_THROWS_WITH_AS(encode_profile_offline(profile, config),
                       doctest::Contains("zero embedding"), Error);
  // With the text component enabled the same profile encodes fine.
  config.text_weight = 0.08;
  CHECK(std::abs(norm_of(encode_profile_offline(profile, config).vector) -
                 1.0) <= 1e-9);
}

TEST_CASE("users with equal purchase mix and attributes embed nearly equal") {
  synth::UserRecord a;
  a.user_id = 1;
  a.static_attributes = {1, 2, 3};
  a.purchase_log = {{0, 3, 5.0}, {1, 8, 6.0}, {2, 3, 12.5}};
  a.search_queries = {{{"cat_3"}, 12.0}};

  synth::UserRecord b;
  b.user_id = 2;
  b.static_attributes = {1, 2, 3};
  b.purchase_log = {{3, 3, 1.0}, {4, 3, 2.0}, {5, 8, 12.7}};

  const ProfileWindows windows{13.0, 1.0, 4.0};
  const auto pa = build_profile_text(a, windows);
  const auto pb = build_profile_text(b, windows);
  // Same long-window mix {3: 2/3, 8: 1/3} but different recent windows,
  // queries, and rendered text.
  REQUIRE(pa.category_counts == pb.category_counts);
  REQUIRE(pa.render() != pb.render());

  OfflineEncoderConfig config;
  const auto ea = encode_profile_offline(pa, config);
  const auto eb = encode_profile_offline(pb, config);
  const double cosine = cosine_oracle(ea.vector, eb.vector);
  CHECK(cosine > 0.99);
  CHECK(cosine < 1.0);
  CHECK(cosine == doctest::Approx(cosine_similarity(ea.vector, eb.vector))
                      .epsilon(1e-12));
}

TEST_CASE("offline embeddings separate archetypes on a noise-free world") {
  synth::WorldConfig config;
  config.num_archetypes = 8;
  config.num_users = 160;
  config.num_items = 400;
  config.num_categories = 40;
  config.affinity_support_size = 5;
  config.category_noise = 0.0;
  config.attribute_noise = 0.0;
  const auto world = synth::generate_world(config, 77);

  std::vector<ProfileText> profiles;
  profiles.reserve(world.users.size());
  for (const auto& user : world.users) {
    profiles.push_back(build_profile_text(user, ProfileWindows{}));
  }
  OfflineEncoderConfig encoder;
  encoder.dim = 256;
  const auto embeddings = encode_profiles_offline(profiles, encoder);

  double within_sum = 0.0, cross_sum = 0.0;
  std::size_t within_count = 0, cross_count = 0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    for (std::size_t j = i + 1; j < embeddings.size(); ++j) {
      const double cosine =
          cosine_oracle(embeddings[i].vector, embeddings[j].vector);
      if (world.users[i].archetype_id == world.users[j].archetype_id) {
        within_sum += cosine;
        ++within_count;
      } else {
        cross_sum += cosine;
        ++cross_count;
      }
    }
  }
  REQUIRE(within_count > 0);
  REQUIRE(cross_count > 0);
  const double within_mean = within_sum / static_cast<double>(within_count);
  const double cross_mean = cross_sum / static_cast<double>(cross_count);
  INFO("within-archetype mean cosine ", within_mean, ", cross ", cross_mean);
  CHECK(within_mean > cross_mean + 0.1);

  // A pair of archetypes with disjoint category supports sits well below the
  // within-archetype similarity.
  auto support_of = [&](std::size_t archetype) {
    std::set<std::size_t> support;
    const auto& affinity = world.archetypes[archetype].category_affinity;
    for (std::size_t c = 0; c < affinity.size(); ++c) {
      if (affinity[c] > 0.0) support.insert(c);
    }
    return support;
  };
  std::size_t arch_a = 0, arch_b = 0;
  bool found = false;
  for (std::size_t a = 0; a < config.num_archetypes && !found; ++a) {
    for (std::size_t b = a + 1; b < config.num_archetypes && !found; ++b) {
      const auto sa = support_of(a);
      const auto sb = support_of(b);
      std::vector<std::size_t> overlap;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                            std::back_inserter(overlap));
      if (overlap.empty()) {
        arch_a = a;
        arch_b = b;
        found = true;
      }
    }
  }
  REQUIRE(found);
  double disjoint_sum = 0.0;
  std::size_t disjoint_count = 0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (world.users[i].archetype_id != arch_a) continue;
    for (std::size_t j = 0; j < embeddings.size(); ++j) {
      if (world.users[j].archetype_id != arch_b) continue;
      disjoint_sum +=
          cosine_oracle(embeddings[i].vector, embeddings[j].vector);
      ++disjoint_count;
    }
  }
  REQUIRE(disjoint_count > 0);
  const double disjoint_mean =
      disjoint_sum / static_cast<double>(disjoint_count);
  INFO("disjoint-archetype mean cosine ", disjoint_mean);
  CHECK(disjoint_mean < within_mean);
}

TEST_CASE("embedding files round-trip byte-stably") {
  const fs::path dir = fs::temp_directory_path() / "grouprec_test_profiler";
  fs::create_directories(dir);
  const fs::path path = dir / "embeddings.jsonl";

  const auto profile = build_profile_text(sample_user(), ProfileWindows{});
  OfflineEncoderConfig config;
  config.dim = 32;
  config.category_prefix_dims = 16;
  std::vector<SemanticEmbedding> embeddings = {
      encode_profile_offline(profile, config)};
  embeddings.push_back(embeddings.front());
  embeddings.back().user_id = 43;
  embeddings.back().source = EmbeddingSource::remote;

  save_embeddings(embeddings, path.string());
  const auto h1 = file_hash(path);
  const auto loaded = load_embeddings(path.string());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].user_id == 42);
  CHECK(loaded[0].source == EmbeddingSource::offline_stub);
  CHECK(loaded[1].user_id == 43);
  CHECK(loaded[1].source == EmbeddingSource::remote);
  CHECK(bitwise_equal(loaded[0].vector, embeddings[0].vector));
  CHECK(bitwise_equal(loaded[1].vector, embeddings[1].vector));
  save_embeddings(loaded, path.string());
  CHECK(file_hash(path) == h1);

  write_file(path, "{\"user_id\": 1}\n");
  CHECK_THROWS_WITH_AS(load_embeddings(path.string()),
                       doctest::Contains("failed to parse embedding record"),
                       Error);
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Remote client against a loopback embedding service.
// ---------------------------------------------------------------------------

namespace {

// Deterministic pseudo-embedding the loopback service returns for a text.
// The test uses the same function as its expectation, so the assertion is
// that the client hands back exactly what the service produced.
std::vector<double> server_embedding(const std::string& text,
                                     std::size_t dim) {
  std::uint64_t state = fnv1a64(text);
  std::vector<double> vector(dim);
  for (auto& value : vector) {
    state = splitmix64(state);
    value = static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return vector;
}

struct LoopbackServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::size_t dim = 24;
  std::atomic<int> request_count{0};
  std::atomic<int> fail_next{0};  // respond 500 to this many requests
  std::atomic<int> mode{0};       // 0 ok, 1 drop a vector, 2 ragged dims
  std::mutex sizes_mutex;
  std::vector<std::size_t> batch_sizes;

  LoopbackServer() {
    server.Post("/v1/embeddings", [this](const httplib::Request& request,
                                         httplib::Response& response) {
      ++request_count;
      if (fail_next.fetch_sub(1) > 0) {
        response.status = 500;
        return;
      }
      const auto body = nlohmann::ordered_json::parse(request.body);
      const auto& input = body.at("input");
      {
        std::lock_guard<std::mutex> lock(sizes_mutex);
        batch_sizes.push_back(input.size());
      }
      nlohmann::ordered_json out;
      auto& vectors = out["embeddings"] = nlohmann::ordered_json::array();
      for (const auto& text : input) {
        vectors.push_back(server_embedding(text.get<std::string>(), dim));
      }
      if (mode.load() == 1 && !vectors.empty()) {
        vectors.erase(vectors.size() - 1);
      }
      if (mode.load() == 2 && vectors.size() > 1) {
        vectors[0] = std::vector<double>{1.0, 2.0};
      }
      response.set_content(out.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    require(port > 0, "loopback server failed to bind");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LoopbackServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port);
  }
};

std::vector<ProfileText> distinct_profiles(std::size_t count) {
  std::vector<ProfileText> profiles(count);
  for (std::size_t i = 0; i < count; ++i) {
    profiles[i].user_id = i;
    profiles[i].static_attributes = "attr_0=" + std::to_string(i % 10);
    profiles[i].behaviors_recent = "no purchases";
    profiles[i].behaviors_medium = "no purchases";
    profiles[i].behaviors_long =
        "cat_" + std::to_string(i % 7) + ":" + std::to_string(1 + i);
    profiles[i].recent_queries = "no queries";
  }
  return profiles;
}

EmbeddingClientConfig client_config(const LoopbackServer& server) {
  EmbeddingClientConfig config;
  config.endpoint = server.endpoint();
  config.model = "loopback-embedder";
  config.timeout_seconds = 5.0;
  config.backoff_initial_ms = 1.0;
  return config;
}

}  // namespace

TEST_CASE("remote client batches requests and returns service vectors") {
  LoopbackServer server;
  const fs::path dir =
      fs::temp_directory_path() / "grouprec_test_profiler_remote";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto config = client_config(server);
  config.cache_path = (dir / "cache.txt").string();
  config.max_batch_size = 32;
  config.max_in_flight = 2;

  const auto profiles = distinct_profiles(70);
  const auto embeddings = encode_profiles_remote(profiles, config);
  REQUIRE(embeddings.size() == 70);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    CHECK(embeddings[i].user_id == i);
    CHECK(embeddings[i].source == EmbeddingSource::remote);
    const auto expected = server_embedding(profiles[i].render(), server.dim);
    CHECK(bitwise_equal(embeddings[i].vector, expected));
  }

  // 70 texts at <= 32 per request -> batch sizes {32, 32, 6}.
  std::vector<std::size_t> sizes;
  {
    std::lock_guard<std::mutex> lock(server.sizes_mutex);
    sizes = server.batch_sizes;
  }
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{6, 32, 32});
  CHECK(server.request_count.load() == 3);

  // Second run: every text is cached, no request goes out, vectors are
  // byte-identical to the original responses.
  const auto again = encode_profiles_remote(profiles, config);
  CHECK(server.request_count.load() == 3);
  REQUIRE(again.size() == embeddings.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(bitwise_equal(again[i].vector, embeddings[i].vector));
  }

  // The cache file itself reloads to the same vectors.
  EmbeddingCache cache(config.cache_path);
  CHECK(cache.size() == 70);
  const auto hash0 =
      embedding_content_hash(config.model, profiles[0].render());
  const auto* hit = cache.find(hash0);
  REQUIRE(hit != nullptr);
  CHECK(bitwise_equal(*hit, embeddings[0].vector));
  fs::remove_all(dir);
}

TEST_CASE("remote client retries transient failures then succeeds") {
  LoopbackServer server;
  auto config = client_config(server);
  config.retry_budget = 3;

  server.fail_next.store(2);
  const auto profiles = distinct_profiles(5);
  const auto embeddings = encode_profiles_remote(profiles, config);
  REQUIRE(embeddings.size() == 5);
  CHECK(server.request_count.load() == 3);  // two 500s, then success
  CHECK(bitwise_equal(embeddings[4].vector,
                      server_embedding(profiles[4].render(), server.dim)));
}

TEST_CASE("remote client surfaces exhausted retries with the user id") {
  LoopbackServer server;
  auto config = client_config(server);
  config.retry_budget = 2;
  server.fail_next.store(100);
  CHECK_THROWS_WITH_AS(
      encode_profiles_remote(distinct_profiles(3), config),
      doctest::Contains("remote embedding failed for user 0 after 2 attempts"),
      Error);
  CHECK(server.request_count.load() == 2);
}

TEST_CASE("remote client rejects malformed and ragged responses") {
  LoopbackServer server;
  auto config = client_config(server);

  server.mode.store(1);  // one vector missing from the response
  CHECK_THROWS_WITH_AS(encode_profiles_remote(distinct_profiles(4), config),
                       doctest::Contains("malformed embedding response"),
                       Error);

  server.mode.store(2);  // first vector has the wrong dimension
  CHECK_THROWS_WITH_AS(encode_profiles_remote(distinct_profiles(4), config),
                       doctest::Contains("dimension mismatch"), Error);
}

TEST_CASE("embedding cache persists, deduplicates, and rejects corruption") {
  const fs::path dir =
      fs::temp_directory_path() / "grouprec_test_profiler_cache";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path path = dir / "cache.txt";

  {
    EmbeddingCache cache(path.string());
    CHECK(cache.size() == 0);
    cache.insert(0xdeadbeefULL, {1.5, -2.25, 3.0});
    cache.insert(0xdeadbeefULL, {9.0, 9.0, 9.0});  // duplicate hash ignored
    cache.insert(7, {0.5});
    CHECK(cache.size() == 2);
  }
  {
    EmbeddingCache cache(path.string());
    CHECK(cache.size() == 2);
    const auto* hit = cache.find(0xdeadbeefULL);
    REQUIRE(hit != nullptr);
    CHECK(bitwise_equal(*hit, {1.5, -2.25, 3.0}));
    CHECK(cache.find(123456) == nullptr);
  }

  write_file(path, "zz not a cache line\n");
  CHECK_THROWS_WITH_AS(EmbeddingCache(path.string()),
                       doctest::Contains("embedding cache corrupt"), Error);
  write_file(path, "abc 2 1.0 oops\n");
  CHECK_THROWS_WITH_AS(EmbeddingCache(path.string()),
                       doctest::Contains("embedding cache corrupt"), Error);
  fs::remove_all(dir);
}

TEST_CASE("embedding client config validation") {
  EmbeddingClientConfig config;
  CHECK_NOTHROW(config.validate());
  config.max_in_flight = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.max_batch_size = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.retry_budget = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.path = "v1/embeddings";
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.timeout_seconds = 0.0;
  CHECK_THROWS_AS(config.validate(), Error);
}
