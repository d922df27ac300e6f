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
#include "grouprec/autograd/adagrad.hpp"

#include <cmath>

#include "grouprec/util/error.hpp"

namespace grouprec::autograd {

Adagrad::Adagrad(std::vector<Tensor> params, double lr_start, double lr_floor,
                 std::size_t decay_steps, double eps)
    : params_(std::move(params)),
      lr_start_(lr_start),
      lr_floor_(lr_floor),
      decay_steps_(decay_steps),
      eps_(eps) {
  require(lr_start_ >= lr_floor_,
                "Adagrad: lr_start must be >= lr_floor");
  accum_.reserve(params_.size());
  for (const Tensor& p : params_) {
    require(p.requires_grad(),
                  "Adagrad: parameter does not require gradients");
    accum_.emplace_back(p.numel(), 0.0);
  }
}

double Adagrad::current_lr() const {
  if (decay_steps_ == 0 || steps_ >= decay_steps_) return lr_floor_;
  const double frac =
      static_cast<double>(steps_) / static_cast<double>(decay_steps_);
  return lr_start_ + (lr_floor_ - lr_start_) * frac;
}

void Adagrad::step() {
  const double lr = current_lr();
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = params_[pi];
    double* theta = p.data();
    double* grad = p.grad_data();
    std::vector<double>& acc = accum_[pi];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double g = grad[i];
      acc[i] += g * g;
      theta[i] -= lr * g / (std::sqrt(acc[i]) + eps_);
    }
  }
  ++steps_;
  zero_grad();
}

void Adagrad::zero_grad() {
  for (Tensor& p : params_) {
    double* grad = p.grad_data();
    for (std::size_t i = 0; i < p.numel(); ++i) grad[i] = 0.0;
  }
}

}  // namespace grouprec::autograd
