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
#include <memory>
#include <string>
#include <vector>

#include "grouprec/util/error.hpp"
#include "grouprec/util/rng.hpp"

namespace grouprec::autograd {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_numel(const Shape& s);

struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty until first touched; then values-sized
  bool requires_grad = false;
};

// Dense double tensor, shared-handle semantics. Rank 1 and 2 cover every
// network in this project; rank-1 tensors act as a single row where a matrix
// is expected.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value);
  // N(0, stddev^2) entries; the standard initializer for weights.
  static Tensor randn(Shape shape, Rng& rng, double stddev,
                      bool requires_grad = true);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t numel() const { return impl_->values.size(); }
  // Rank-2 accessors; a rank-1 tensor of n elements reads as [1 x n].
  std::size_t rows() const;
  std::size_t cols() const;

  const std::vector<double>& values() const { return impl_->values; }
  std::vector<double>& values() { return impl_->values; }
  // Raw value pointer. Const on the handle, not the storage: copies of a
  // Tensor share one buffer, so op closures can write through captures.
  double* data() const { return impl_->values.data(); }
  double at(std::size_t i) const { return impl_->values[i]; }
  double at(std::size_t r, std::size_t c) const {
    return impl_->values[r * cols() + c];
  }
  // Value of a one-element tensor.
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool v) { impl_->requires_grad = v; }

  // Gradient buffer, zero-allocated on first access.
  std::vector<double>& grad() const;
  double* grad_data() const { return grad().data(); }
  const std::vector<double>& grad_or_empty() const { return impl_->grad; }
  void zero_grad();

  bool same_impl(const Tensor& other) const { return impl_ == other.impl_; }
  TensorImpl* impl() const { return impl_.get(); }

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<TensorImpl> impl_;
};

// Reverse-mode tape. Ops append themselves in execution order; backward
// replays the tape once, in reverse.
class Graph {
 public:
  struct Node {
    std::string op;
    Tensor output;
    std::function<void()> backward;
  };

  void record(std::string op, Tensor output, std::function<void()> backward) {
    nodes_.push_back(Node{std::move(op), std::move(output), std::move(backward)});
  }

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every tensor
  // recorded on this tape. Throws for a non-scalar loss.
  void backward(const Tensor& loss);

  std::size_t node_count() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  std::vector<Node> nodes_;
};

}  // namespace grouprec::autograd
