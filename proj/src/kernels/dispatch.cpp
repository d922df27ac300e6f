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
#include "grouprec/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace grouprec::kernels {

bool avx2_available() {
#if defined(GROUPREC_HAVE_AVX2)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

#if !defined(GROUPREC_HAVE_AVX2)
const Backend& avx2_backend() {
  throw std::runtime_error("kernels: avx2 backend not compiled in");
}
#endif

namespace {

std::atomic<const Backend*> g_active{nullptr};

const Backend& resolve_from_env() {
  const char* mode_env = std::getenv("GROUPREC_SIMD");
  const std::string mode = mode_env ? mode_env : "auto";
  if (mode == "scalar") return scalar_backend();
  if (mode == "avx2") {
    if (!avx2_available())
      throw std::runtime_error("GROUPREC_SIMD=avx2 but AVX2+FMA unavailable");
    return avx2_backend();
  }
  if (mode != "auto")
    throw std::runtime_error("GROUPREC_SIMD must be scalar|avx2|auto, got '" +
                             mode + "'");
  return avx2_available() ? avx2_backend() : scalar_backend();
}

}  // namespace

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (b == nullptr) {
    const Backend& resolved = resolve_from_env();
    const Backend* expected = nullptr;
    g_active.compare_exchange_strong(expected, &resolved,
                                     std::memory_order_acq_rel);
    b = g_active.load(std::memory_order_acquire);
  }
  return *b;
}

void set_active(const Backend& b) {
  g_active.store(&b, std::memory_order_release);
}

std::string describe_backends() {
  std::string out = "active=";
  out += active().name;
  out += " avx2=";
  out += avx2_available() ? "yes" : "no";
  return out;
}

}  // namespace grouprec::kernels
