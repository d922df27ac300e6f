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

#include "grouprec/autograd/tensor.hpp"

namespace grouprec::autograd::ops {

// Forward ops. Each computes eagerly, validates shapes (throwing Error with
// the op name and offending shapes), and records itself on the graph when
// any input requires gradients. Matrices are row-major; rank-1 tensors act
// as a single row.

// [m x k] * [k x n] -> [m x n]
Tensor matmul(Graph& g, const Tensor& a, const Tensor& b);
// Same shape, or b a row vector broadcast over a's rows.
Tensor add(Graph& g, const Tensor& a, const Tensor& b);
Tensor sub(Graph& g, const Tensor& a, const Tensor& b);
Tensor elementwise_mul(Graph& g, const Tensor& a, const Tensor& b);
// Horizontal concatenation; all parts must share a row count.
Tensor concat_cols(Graph& g, const std::vector<Tensor>& parts);

Tensor tanh(Graph& g, const Tensor& x);
Tensor relu(Graph& g, const Tensor& x);
Tensor sigmoid(Graph& g, const Tensor& x);
Tensor abs(Graph& g, const Tensor& x);
// log(1 + e^x), computed without overflow for any logit.
Tensor softplus(Graph& g, const Tensor& x);

// Rows scaled to unit L2 norm; an all-zero row stays zero.
Tensor l2_normalize_rows(Graph& g, const Tensor& x);
// Row-wise softmax (max-subtracted).
Tensor softmax_rows(Graph& g, const Tensor& x);

// out[i, :] = s[i] * x[i, :]; s holds one entry per row of x.
Tensor row_scale(Graph& g, const Tensor& x, const Tensor& s);
// [(m*group) x n] -> [m x n], summing each consecutive block of `group` rows.
Tensor group_sum_rows(Graph& g, const Tensor& x, std::size_t group);
// [m x n] -> [(m*times) x n], each row repeated `times` consecutively.
Tensor repeat_rows(Graph& g, const Tensor& x, std::size_t times);
Tensor reshape(Graph& g, const Tensor& x, Shape shape);

// rows of `table` gathered by index; gradients scatter-add back, so shared
// rows accumulate contributions.
Tensor embedding_lookup(Graph& g, const Tensor& table,
                        const std::vector<std::size_t>& ids);

Tensor sum_all(Graph& g, const Tensor& x);
Tensor mean_all(Graph& g, const Tensor& x);
Tensor scale(Graph& g, const Tensor& x, double c);
Tensor add_scalar(Graph& g, const Tensor& x, double c);

// Mean binary cross-entropy in logit space (numerically stable for any
// logit). `labels` is a constant tensor of 0/1 with logits' element count.
Tensor bce_with_logits_mean(Graph& g, const Tensor& logits,
                            const Tensor& labels);

// Value copy severed from the tape; gradients never flow into x through it.
Tensor detach(const Tensor& x);

// Scalar sigmoid helper shared by ops and gate logic.
double sigmoid_value(double z);

}  // namespace grouprec::autograd::ops
