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
#include <functional>
#include <string>
#include <vector>

#include "grouprec/autograd/tensor.hpp"

namespace grouprec::autograd {

struct GradCheckResult {
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // description of the worst coordinate
};

// Central-difference check of the tape against the scalar produced by
// `forward`. `forward` must rebuild the computation from the current
// parameter values on the given graph and return the scalar loss tensor.
// The relative error per coordinate is
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckResult check_gradients(
    const std::function<Tensor(Graph&)>& forward, std::vector<Tensor> params,
    double h = 1e-5, double tolerance = 1e-4);

}  // namespace grouprec::autograd
