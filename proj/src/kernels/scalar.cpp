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

#include <cstring>
#include <limits>

// Reference kernels. Plain loops, no reassociation tricks: these define the
// semantics the vectorized variants are tested against.

namespace grouprec::kernels {
namespace {

void add_scalar(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_scalar(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_scalar(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(std::size_t n, double alpha, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double dot_scalar(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(std::size_t n, const double* a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double squared_l2_scalar(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void matmul_nn_scalar(std::size_t m, std::size_t n, std::size_t k,
                      const double* a, const double* b, double* c,
                      bool accumulate) {
  if (!accumulate && m * n > 0) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double av = a[i * k + l];
      const double* brow = b + l * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt_scalar(std::size_t m, std::size_t n, std::size_t k,
                      const double* a, const double* b, double* c,
                      bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dot_scalar(k, a + i * k, b + j * k);
      double& out = c[i * n + j];
      out = accumulate ? out + v : v;
    }
  }
}

void matmul_tn_scalar(std::size_t m, std::size_t n, std::size_t k,
                      const double* a, const double* b, double* c,
                      bool accumulate) {
  if (!accumulate && m * n > 0) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t l = 0; l < k; ++l) {
    const double* arow = a + l * m;
    const double* brow = b + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

std::size_t nearest_centroid_scalar(std::size_t k, std::size_t dim,
                                    const double* point,
                                    const double* centroids, double* out_dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = squared_l2_scalar(dim, point, centroids + c * dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (out_dist) *out_dist = best_d;
  return best;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend = {
      "scalar",         add_scalar,       mul_scalar,
      axpy_scalar,      scale_scalar,     dot_scalar,
      sum_scalar,       squared_l2_scalar, matmul_nn_scalar,
      matmul_nt_scalar, matmul_tn_scalar, nearest_centroid_scalar,
  };
  return backend;
}

}  // namespace grouprec::kernels
