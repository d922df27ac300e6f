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

#include <cstddef>
#include <string>

namespace grouprec::kernels {

// Dense double-precision primitives behind the tensor engine and the
// clustering inner loops. Every entry point has a scalar reference
// implementation and, on x86-64 with AVX2+FMA, a vectorized variant.
// The two are equivalence-tested against each other; the active variant
// is resolved once per process so a run is deterministic end to end.
//
// All matrices are contiguous row-major.
struct Backend {
  const char* name;

  // out = a + b, out = a * b (elementwise, n doubles)
  void (*add)(std::size_t n, const double* a, const double* b, double* out);
  void (*mul)(std::size_t n, const double* a, const double* b, double* out);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // x *= alpha
  void (*scale)(std::size_t n, double alpha, double* x);
  double (*dot)(std::size_t n, const double* a, const double* b);
  double (*sum)(std::size_t n, const double* a);
  // ||a - b||^2
  double (*squared_l2)(std::size_t n, const double* a, const double* b);

  // C[m x n] = A[m x k] * B[k x n]      (+= when accumulate)
  void (*matmul_nn)(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c,
                    bool accumulate);
  // C[m x n] = A[m x k] * B[n x k]^T    (+= when accumulate)
  void (*matmul_nt)(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c,
                    bool accumulate);
  // C[m x n] = A[k x m]^T * B[k x n]    (+= when accumulate)
  void (*matmul_tn)(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c,
                    bool accumulate);

  // Index of the centroid (rows of `centroids`, K x dim) nearest to `point`
  // in squared L2; ties resolve to the lowest index. `out_dist` receives the
  // winning squared distance when non-null.
  std::size_t (*nearest_centroid)(std::size_t k, std::size_t dim,
                                  const double* point, const double* centroids,
                                  double* out_dist);
};

const Backend& scalar_backend();
bool avx2_available();
// Valid only when avx2_available(); asserts otherwise.
const Backend& avx2_backend();

// Backend in use, resolved once from GROUPREC_SIMD (scalar|avx2|auto; default
// auto) unless set_active() ran first.
const Backend& active();
void set_active(const Backend& b);

std::string describe_backends();

}  // namespace grouprec::kernels
