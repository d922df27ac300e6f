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
#include "grouprec/autograd/ops.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "grouprec/kernels/kernels.hpp"
#include "grouprec/util/error.hpp"

namespace grouprec::autograd::ops {

namespace {

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << '[';
  const Shape& s = t.shape();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << 'x';
    os << s[i];
  }
  os << ']';
  return os.str();
}

bool track(const Tensor& a) { return a.requires_grad(); }
bool track(const Tensor& a, const Tensor& b) {
  return a.requires_grad() || b.requires_grad();
}

Tensor make_output(Shape shape, bool requires_grad) {
  return Tensor::zeros(std::move(shape), requires_grad);
}

}  // namespace

double sigmoid_value(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Tensor matmul(Graph& g, const Tensor& a, const Tensor& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  require(a.shape().size() <= 2 && b.shape().size() <= 2,
                "matmul: rank > 2 unsupported, got ", shape_str(a), " and ",
                shape_str(b));
  require(b.rows() == k, "matmul: inner dimensions differ, ",
                shape_str(a), " vs ", shape_str(b));
  Tensor out = make_output({m, n}, track(a, b));
  const kernels::Backend& kb = kernels::active();
  kb.matmul_nn(m, n, k, a.data(), b.data(), out.data(), false);
  if (out.requires_grad()) {
    g.record("matmul", out, [a, b, out, m, n, k]() {
      const kernels::Backend& kb2 = kernels::active();
      if (a.requires_grad()) {
        // dA += dC * B^T
        kb2.matmul_nt(m, k, n, out.grad_data(), b.data(), a.grad_data(), true);
      }
      if (b.requires_grad()) {
        // dB += A^T * dC
        kb2.matmul_tn(k, n, m, a.data(), out.grad_data(), b.grad_data(), true);
      }
    });
  }
  return out;
}

Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  const bool broadcast = b.numel() != a.numel() || b.rows() == 1;
  if (b.numel() == a.numel() && !(b.rows() == 1 && a.rows() > 1)) {
    Tensor out = make_output(a.shape(), track(a, b));
    kernels::active().add(a.numel(), a.data(), b.data(), out.data());
    if (out.requires_grad()) {
      g.record("add", out, [a, b, out]() {
        const std::size_t n = out.numel();
        if (a.requires_grad())
          kernels::active().axpy(n, 1.0, out.grad_data(), a.grad_data());
        if (b.requires_grad())
          kernels::active().axpy(n, 1.0, out.grad_data(), b.grad_data());
      });
    }
    return out;
  }
  require(broadcast && b.numel() == a.cols(),
                "add: shapes incompatible, ", shape_str(a), " vs ",
                shape_str(b));
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = make_output(a.shape(), track(a, b));
  for (std::size_t i = 0; i < m; ++i) {
    kernels::active().add(n, a.data() + i * n, b.data(), out.data() + i * n);
  }
  if (out.requires_grad()) {
    g.record("add", out, [a, b, out, m, n]() {
      if (a.requires_grad()) {
        kernels::active().axpy(m * n, 1.0, out.grad_data(), a.grad_data());
      }
      if (b.requires_grad()) {
        double* bg = b.grad_data();
        const double* og = out.grad_data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) bg[j] += og[i * n + j];
        }
      }
    });
  }
  return out;
}

Tensor sub(Graph& g, const Tensor& a, const Tensor& b) {
  require(a.numel() == b.numel() && a.shape() == b.shape(),
                "sub: shapes differ, ", shape_str(a), " vs ", shape_str(b));
  Tensor out = make_output(a.shape(), track(a, b));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < a.numel(); ++i) po[i] = pa[i] - pb[i];
  if (out.requires_grad()) {
    g.record("sub", out, [a, b, out]() {
      const std::size_t n = out.numel();
      if (a.requires_grad())
        kernels::active().axpy(n, 1.0, out.grad_data(), a.grad_data());
      if (b.requires_grad())
        kernels::active().axpy(n, -1.0, out.grad_data(), b.grad_data());
    });
  }
  return out;
}

Tensor elementwise_mul(Graph& g, const Tensor& a, const Tensor& b) {
  require(a.numel() == b.numel() && a.shape() == b.shape(),
                "elementwise_mul: shapes differ, ", shape_str(a), " vs ",
                shape_str(b));
  Tensor out = make_output(a.shape(), track(a, b));
  kernels::active().mul(a.numel(), a.data(), b.data(), out.data());
  if (out.requires_grad()) {
    g.record("elementwise_mul", out, [a, b, out]() {
      const std::size_t n = out.numel();
      const double* og = out.grad_data();
      if (a.requires_grad()) {
        double* ag = a.grad_data();
        const double* pb = b.data();
        for (std::size_t i = 0; i < n; ++i) ag[i] += og[i] * pb[i];
      }
      if (b.requires_grad()) {
        double* bg = b.grad_data();
        const double* pa = a.data();
        for (std::size_t i = 0; i < n; ++i) bg[i] += og[i] * pa[i];
      }
    });
  }
  return out;
}

Tensor concat_cols(Graph& g, const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t m = parts.front().rows();
  std::size_t total_cols = 0;
  bool any_grad = false;
  for (const Tensor& p : parts) {
    require(p.rows() == m, "concat_cols: row counts differ, ",
                  shape_str(parts.front()), " vs ", shape_str(p));
    total_cols += p.cols();
    any_grad = any_grad || p.requires_grad();
  }
  Tensor out = make_output({m, total_cols}, any_grad);
  double* po = out.data();
  std::size_t col_off = 0;
  for (const Tensor& p : parts) {
    const std::size_t pc = p.cols();
    const double* pp = p.data();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < pc; ++j) {
        po[i * total_cols + col_off + j] = pp[i * pc + j];
      }
    }
    col_off += pc;
  }
  if (out.requires_grad()) {
    g.record("concat_cols", out, [parts, out, m, total_cols]() {
      const double* og = out.grad_data();
      std::size_t off = 0;
      for (const Tensor& p : parts) {
        const std::size_t pc = p.cols();
        if (p.requires_grad()) {
          double* pg = p.grad_data();
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < pc; ++j) {
              pg[i * pc + j] += og[i * total_cols + off + j];
            }
          }
        }
        off += pc;
      }
    });
  }
  return out;
}

namespace {

template <typename Fwd, typename BwdFactor>
Tensor unary(Graph& g, const Tensor& x, const char* name, Fwd fwd,
             BwdFactor factor) {
  Tensor out = make_output(x.shape(), track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) po[i] = fwd(px[i]);
  if (out.requires_grad()) {
    g.record(name, out, [x, out, factor]() {
      double* xg = x.grad_data();
      const double* og = out.grad_data();
      const double* px2 = x.data();
      const double* po2 = out.data();
      for (std::size_t i = 0; i < out.numel(); ++i) {
        xg[i] += og[i] * factor(px2[i], po2[i]);
      }
    });
  }
  return out;
}

}  // namespace

Tensor tanh(Graph& g, const Tensor& x) {
  return unary(
      g, x, "tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(Graph& g, const Tensor& x) {
  return unary(
      g, x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(Graph& g, const Tensor& x) {
  return unary(
      g, x, "sigmoid", [](double v) { return sigmoid_value(v); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor abs(Graph& g, const Tensor& x) {
  return unary(
      g, x, "abs", [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor softplus(Graph& g, const Tensor& x) {
  return unary(
      g, x, "softplus",
      [](double v) {
        return std::max(v, 0.0) + std::log1p(std::exp(-std::fabs(v)));
      },
      [](double v, double) { return sigmoid_value(v); });
}

Tensor l2_normalize_rows(Graph& g, const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  Tensor out = make_output(x.shape(), track(x));
  const double* px = x.data();
  double* po = out.data();
  std::vector<double> norms(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double sq = kernels::active().dot(n, px + i * n, px + i * n);
    const double norm = std::sqrt(sq);
    norms[i] = norm;
    if (norm > 0.0) {
      for (std::size_t j = 0; j < n; ++j) po[i * n + j] = px[i * n + j] / norm;
    }
  }
  if (out.requires_grad()) {
    g.record("l2_normalize_rows", out, [x, out, norms, m, n]() {
      double* xg = x.grad_data();
      const double* og = out.grad_data();
      const double* po2 = out.data();
      for (std::size_t i = 0; i < m; ++i) {
        if (norms[i] == 0.0) continue;
        const double proj =
            kernels::active().dot(n, og + i * n, po2 + i * n);
        for (std::size_t j = 0; j < n; ++j) {
          xg[i * n + j] +=
              (og[i * n + j] - po2[i * n + j] * proj) / norms[i];
        }
      }
    });
  }
  return out;
}

Tensor softmax_rows(Graph& g, const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  require(n > 0, "softmax_rows: empty rows in ", shape_str(x));
  Tensor out = make_output(x.shape(), track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double mx = px[i * n];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, px[i * n + j]);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = std::exp(px[i * n + j] - mx);
      po[i * n + j] = e;
      s += e;
    }
    for (std::size_t j = 0; j < n; ++j) po[i * n + j] /= s;
  }
  if (out.requires_grad()) {
    g.record("softmax_rows", out, [x, out, m, n]() {
      double* xg = x.grad_data();
      const double* og = out.grad_data();
      const double* po2 = out.data();
      for (std::size_t i = 0; i < m; ++i) {
        const double dotv =
            kernels::active().dot(n, og + i * n, po2 + i * n);
        for (std::size_t j = 0; j < n; ++j) {
          xg[i * n + j] += po2[i * n + j] * (og[i * n + j] - dotv);
        }
      }
    });
  }
  return out;
}

Tensor row_scale(Graph& g, const Tensor& x, const Tensor& s) {
  const std::size_t m = x.rows(), n = x.cols();
  require(s.numel() == m, "row_scale: scale count ", shape_str(s),
                " does not match rows of ", shape_str(x));
  Tensor out = make_output(x.shape(), track(x, s));
  const double* px = x.data();
  const double* ps = s.data();
  double* po = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) po[i * n + j] = ps[i] * px[i * n + j];
  }
  if (out.requires_grad()) {
    g.record("row_scale", out, [x, s, out, m, n]() {
      const double* og = out.grad_data();
      const double* px2 = x.data();
      const double* ps2 = s.data();
      if (x.requires_grad()) {
        double* xg = x.grad_data();
        for (std::size_t i = 0; i < m; ++i) {
          kernels::active().axpy(n, ps2[i], og + i * n, xg + i * n);
        }
      }
      if (s.requires_grad()) {
        double* sg = s.grad_data();
        for (std::size_t i = 0; i < m; ++i) {
          sg[i] += kernels::active().dot(n, og + i * n, px2 + i * n);
        }
      }
    });
  }
  return out;
}

Tensor group_sum_rows(Graph& g, const Tensor& x, std::size_t group) {
  const std::size_t rows = x.rows(), n = x.cols();
  require(group > 0 && rows % group == 0,
                "group_sum_rows: rows of ", shape_str(x),
                " not divisible by group ", group);
  const std::size_t m = rows / group;
  Tensor out = make_output({m, n}, track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < group; ++l) {
      kernels::active().axpy(n, 1.0, px + (i * group + l) * n, po + i * n);
    }
  }
  if (out.requires_grad()) {
    g.record("group_sum_rows", out, [x, out, m, n, group]() {
      double* xg = x.grad_data();
      const double* og = out.grad_data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < group; ++l) {
          kernels::active().axpy(n, 1.0, og + i * n,
                                 xg + (i * group + l) * n);
        }
      }
    });
  }
  return out;
}

Tensor repeat_rows(Graph& g, const Tensor& x, std::size_t times) {
  require(times > 0, "repeat_rows: times must be positive");
  const std::size_t m = x.rows(), n = x.cols();
  Tensor out = make_output({m * times, n}, track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < times; ++t) {
      for (std::size_t j = 0; j < n; ++j) {
        po[(i * times + t) * n + j] = px[i * n + j];
      }
    }
  }
  if (out.requires_grad()) {
    g.record("repeat_rows", out, [x, out, m, n, times]() {
      double* xg = x.grad_data();
      const double* og = out.grad_data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < times; ++t) {
          kernels::active().axpy(n, 1.0, og + (i * times + t) * n, xg + i * n);
        }
      }
    });
  }
  return out;
}

Tensor reshape(Graph& g, const Tensor& x, Shape shape) {
  std::size_t count = 1;
  for (std::size_t d : shape) count *= d;
  require(count == x.numel(), "reshape: cannot view ", shape_str(x),
                " as requested shape of ", count, " elements");
  Tensor out = make_output(std::move(shape), track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) po[i] = px[i];
  if (out.requires_grad()) {
    g.record("reshape", out, [x, out]() {
      kernels::active().axpy(out.numel(), 1.0, out.grad_data(),
                             x.grad_data());
    });
  }
  return out;
}

Tensor embedding_lookup(Graph& g, const Tensor& table,
                        const std::vector<std::size_t>& ids) {
  const std::size_t vocab = table.rows(), dim = table.cols();
  for (std::size_t id : ids) {
    require(id < vocab, "embedding_lookup: id ", id,
                  " out of range for table ", shape_str(table));
  }
  Tensor out = make_output({ids.size(), dim}, track(table));
  const double* pt = table.data();
  double* po = out.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      po[i * dim + j] = pt[ids[i] * dim + j];
    }
  }
  if (out.requires_grad()) {
    g.record("embedding_lookup", out, [table, out, ids, dim]() {
      double* tg = table.grad_data();
      const double* og = out.grad_data();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        kernels::active().axpy(dim, 1.0, og + i * dim, tg + ids[i] * dim);
      }
    });
  }
  return out;
}

Tensor sum_all(Graph& g, const Tensor& x) {
  Tensor out = make_output({1}, track(x));
  out.data()[0] = kernels::active().sum(x.numel(), x.data());
  if (out.requires_grad()) {
    g.record("sum_all", out, [x, out]() {
      const double go = out.grad_data()[0];
      double* xg = x.grad_data();
      for (std::size_t i = 0; i < x.numel(); ++i) xg[i] += go;
    });
  }
  return out;
}

Tensor mean_all(Graph& g, const Tensor& x) {
  require(x.numel() > 0, "mean_all: empty tensor");
  Tensor out = make_output({1}, track(x));
  const double inv = 1.0 / static_cast<double>(x.numel());
  out.data()[0] = kernels::active().sum(x.numel(), x.data()) * inv;
  if (out.requires_grad()) {
    g.record("mean_all", out, [x, out, inv]() {
      const double go = out.grad_data()[0] * inv;
      double* xg = x.grad_data();
      for (std::size_t i = 0; i < x.numel(); ++i) xg[i] += go;
    });
  }
  return out;
}

Tensor scale(Graph& g, const Tensor& x, double c) {
  Tensor out = make_output(x.shape(), track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) po[i] = c * px[i];
  if (out.requires_grad()) {
    g.record("scale", out, [x, out, c]() {
      kernels::active().axpy(out.numel(), c, out.grad_data(), x.grad_data());
    });
  }
  return out;
}

Tensor add_scalar(Graph& g, const Tensor& x, double c) {
  Tensor out = make_output(x.shape(), track(x));
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) po[i] = px[i] + c;
  if (out.requires_grad()) {
    g.record("add_scalar", out, [x, out]() {
      kernels::active().axpy(out.numel(), 1.0, out.grad_data(),
                             x.grad_data());
    });
  }
  return out;
}

Tensor bce_with_logits_mean(Graph& g, const Tensor& logits,
                            const Tensor& labels) {
  require(logits.numel() == labels.numel(),
                "bce_with_logits_mean: logits ", shape_str(logits),
                " vs labels ", shape_str(labels));
  require(logits.numel() > 0, "bce_with_logits_mean: empty batch");
  const std::size_t n = logits.numel();
  Tensor out = make_output({1}, track(logits));
  const double* pz = logits.data();
  const double* py = labels.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = pz[i];
    // max(z, 0) - z*y + log(1 + exp(-|z|)): stable for large |z|.
    total += std::max(z, 0.0) - z * py[i] + std::log1p(std::exp(-std::fabs(z)));
  }
  out.data()[0] = total / static_cast<double>(n);
  if (out.requires_grad()) {
    g.record("bce_with_logits_mean", out, [logits, labels, out, n]() {
      const double go = out.grad_data()[0] / static_cast<double>(n);
      double* zg = logits.grad_data();
      const double* pz2 = logits.data();
      const double* py2 = labels.data();
      for (std::size_t i = 0; i < n; ++i) {
        zg[i] += go * (sigmoid_value(pz2[i]) - py2[i]);
      }
    });
  }
  return out;
}

Tensor detach(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape(), false);
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < x.numel(); ++i) po[i] = px[i];
  return out;
}

}  // namespace grouprec::autograd::ops
