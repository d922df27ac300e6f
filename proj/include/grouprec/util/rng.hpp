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
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"

namespace grouprec {

// Deterministic RNG. The engine is std::mt19937_64 (bit-identical output on
// every platform) and all distributions are implemented here rather than
// taken from <random>, whose distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    require(n > 0, "uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Box-Muller; consumes exactly two draws per call.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double lognormal(double mu, double sigma) {
    return std::exp(normal(mu, sigma));
  }

  std::uint64_t poisson(double lambda) {
    // Inversion by sequential search; fine for the small lambdas used here.
    require(lambda >= 0.0, "poisson: lambda must be nonnegative");
    if (lambda == 0.0) return 0;
    const double l = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn from unnormalized nonnegative weights (CDF scan).
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (const double w : weights) total += w;
    require(total > 0.0, "categorical: total weight must be positive");
    double r = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) return i;
    }
    return weights.size() - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; a function of the root seed and label only,
  // not of how much this stream has been consumed.
  Rng fork(std::string_view label) const {
    return Rng(derive_seed(root_seed_, label));
  }

  std::uint64_t root_seed() const { return root_seed_; }

 private:
  std::uint64_t root_seed_;
  std::mt19937_64 engine_;
};

}  // namespace grouprec
