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
#include <vector>

#include "grouprec/autograd/tensor.hpp"

namespace grouprec::autograd {

// Adagrad with a linearly decaying learning rate. The rate moves from
// `lr_start` to `lr_floor` over `decay_steps` steps and stays at the floor
// afterwards. Per-coordinate update:
//   acc   += g^2
//   theta -= lr_t * g / (sqrt(acc) + eps)
// Gradients of all registered parameters are zeroed after each step.
class Adagrad {
 public:
  Adagrad(std::vector<Tensor> params, double lr_start, double lr_floor,
          std::size_t decay_steps, double eps = 1e-8);

  // Learning rate that the NEXT call to step() will apply.
  double current_lr() const;
  void step();
  void zero_grad();

  std::size_t steps_taken() const { return steps_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> accum_;
  double lr_start_;
  double lr_floor_;
  std::size_t decay_steps_;
  double eps_;
  std::size_t steps_ = 0;
};

}  // namespace grouprec::autograd
