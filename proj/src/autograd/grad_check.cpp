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
#include "grouprec/autograd/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grouprec/util/error.hpp"

namespace grouprec::autograd {

GradCheckResult check_gradients(
    const std::function<Tensor(Graph&)>& forward, std::vector<Tensor> params,
    double h, double tolerance) {
  GradCheckResult result;

  // Analytic pass.
  for (Tensor& p : params) {
    double* g = p.grad_data();
    for (std::size_t i = 0; i < p.numel(); ++i) g[i] = 0.0;
  }
  Graph graph;
  Tensor loss = forward(graph);
  require(loss.numel() == 1, "check_gradients: loss must be scalar");
  graph.backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const Tensor& p : params) {
    analytic.emplace_back(p.grad_data(), p.grad_data() + p.numel());
  }

  // Numeric pass, one coordinate at a time.
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double original = p.data()[i];
      p.data()[i] = original + h;
      Graph gp;
      const double fp = forward(gp).item();
      p.data()[i] = original - h;
      Graph gm;
      const double fm = forward(gm).item();
      p.data()[i] = original;

      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[pi][i];
      const double denom =
          std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      const double rel = std::fabs(a - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        std::ostringstream os;
        os << "param " << pi << " coord " << i << ": analytic " << a
           << " numeric " << numeric << " rel " << rel;
        result.worst = os.str();
      }
    }
  }
  result.passed = result.max_rel_error <= tolerance;
  return result;
}

}  // namespace grouprec::autograd
