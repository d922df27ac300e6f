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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "grouprec/autograd/adagrad.hpp"
#include "grouprec/autograd/checkpoint.hpp"
#include "grouprec/autograd/grad_check.hpp"
#include "grouprec/autograd/ops.hpp"
#include "grouprec/autograd/tensor.hpp"
#include "grouprec/util/rng.hpp"

using namespace grouprec;
using namespace grouprec::autograd;
namespace O = grouprec::autograd::ops;

namespace {

Tensor random_param(Rng& rng, Shape shape, double stddev = 1.0) {
  return Tensor::randn(std::move(shape), rng, stddev, true);
}

// Random values bounded away from zero, for ops with a kink at 0.
Tensor random_param_no_kink(Rng& rng, Shape shape) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (double& v : t.values()) {
    const double mag = rng.uniform(0.1, 2.0);
    v = rng.bernoulli(0.5) ? mag : -mag;
  }
  return t;
}

// Projects a tensor to a scalar through fixed random weights, so gradient
// checks see a generic (non-uniform) upstream gradient.
Tensor project(Graph& g, const Tensor& x, Rng& rng) {
  Tensor w = Tensor::zeros(x.shape(), false);
  for (double& v : w.values()) v = rng.normal(0.0, 1.0);
  return O::sum_all(g, O::elementwise_mul(g, x, w));
}

}  // namespace

TEST_CASE("matmul forward matches a naive triple loop") {
  Rng rng(11);
  const std::size_t m = 5, k = 7, n = 4;
  Tensor a = random_param(rng, {m, k});
  Tensor b = random_param(rng, {k, n});
  Graph g;
  Tensor c = O::matmul(g, a, b);
  REQUIRE(c.shape() == Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double want = 0.0;
      for (std::size_t l = 0; l < k; ++l) want += a.at(i, l) * b.at(l, j);
      CHECK(c.at(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("shape violations throw with the op name") {
  Graph g;
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({2, 3});
  CHECK_THROWS_WITH_AS(O::matmul(g, a, b),
                       doctest::Contains("matmul"), Error);
  CHECK_THROWS_AS(O::row_scale(g, a, Tensor::zeros({5})), Error);
  CHECK_THROWS_AS(O::group_sum_rows(g, a, 4), Error);
  CHECK_THROWS_AS(O::reshape(g, a, {7}), Error);
  CHECK_THROWS_AS(O::embedding_lookup(g, a, {3}), Error);
  CHECK_THROWS_AS(O::bce_with_logits_mean(g, a, Tensor::zeros({5})), Error);
  CHECK_THROWS_AS(g.backward(a), Error);  // non-scalar loss
}

TEST_CASE("gradients match central differences across ops and seeds") {
  // 24 random configurations; every op gets exercised in several.
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    Rng rng(1000 + seed);
    const std::size_t m = 2 + rng.uniform_index(3);
    const std::size_t k = 2 + rng.uniform_index(3);
    const std::size_t n = 2 + rng.uniform_index(3);

    {
      // matmul -> tanh -> row bias -> sigmoid chain
      Tensor a = random_param(rng, {m, k}, 0.7);
      Tensor b = random_param(rng, {k, n}, 0.7);
      Tensor bias = random_param(rng, {n}, 0.5);
      Rng proj_rng = rng.fork("proj1");
      auto fwd = [&](Graph& g) -> Tensor {
        Rng pr = proj_rng;
        Tensor h = O::tanh(g, O::matmul(g, a, b));
        Tensor o = O::sigmoid(g, O::add(g, h, bias));
        return project(g, o, pr);
      };
      const auto res = check_gradients(fwd, {a, b, bias});
      CHECK_MESSAGE(res.passed, "seed ", seed, " chain1: ", res.worst);
    }

    {
      // concat/softmax/l2norm/row_scale/mul path
      Tensor x1 = random_param(rng, {m, k}, 0.8);
      Tensor x2 = random_param(rng, {m, n}, 0.8);
      Tensor s = random_param(rng, {m}, 0.6);
      Rng proj_rng = rng.fork("proj2");
      auto fwd = [&](Graph& g) -> Tensor {
        Rng pr = proj_rng;
        Tensor cat = O::concat_cols(g, {x1, x2});
        Tensor sm = O::softmax_rows(g, cat);
        Tensor nm = O::l2_normalize_rows(g, O::row_scale(g, sm, s));
        return project(g, nm, pr);
      };
      const auto res = check_gradients(fwd, {x1, x2, s});
      CHECK_MESSAGE(res.passed, "seed ", seed, " chain2: ", res.worst);
    }

    {
      // relu/abs kinked ops away from the kink, plus sub/scale/add_scalar
      Tensor x = random_param_no_kink(rng, {m, n});
      Tensor y = random_param_no_kink(rng, {m, n});
      Rng proj_rng = rng.fork("proj3");
      auto fwd = [&](Graph& g) -> Tensor {
        Rng pr = proj_rng;
        Tensor d = O::abs(g, O::sub(g, O::scale(g, x, 1.5), y));
        Tensor r = O::relu(g, O::add_scalar(g, d, -0.05));
        Tensor sq = O::elementwise_mul(g, r, r);
        return project(g, sq, pr);
      };
      const auto res = check_gradients(fwd, {x, y});
      CHECK_MESSAGE(res.passed, "seed ", seed, " chain3: ", res.worst);
    }

    {
      // embedding/repeat/group_sum/reshape/mean path
      Tensor table = random_param(rng, {5, n}, 0.9);
      std::vector<std::size_t> ids;
      for (std::size_t i = 0; i < m * 3; ++i) ids.push_back(rng.uniform_index(5));
      Rng proj_rng = rng.fork("proj4");
      auto fwd = [&](Graph& g) -> Tensor {
        Rng pr = proj_rng;
        Tensor e = O::embedding_lookup(g, table, ids);        // [3m x n]
        Tensor gs = O::group_sum_rows(g, e, 3);               // [m x n]
        Tensor rep = O::repeat_rows(g, gs, 2);                // [2m x n]
        Tensor rs = O::reshape(g, rep, {m, 2 * n});
        Tensor p = O::mean_all(g, rs);
        Tensor q = project(g, O::tanh(g, rs), pr);
        return O::add(g, p, q);
      };
      const auto res = check_gradients(fwd, {table});
      CHECK_MESSAGE(res.passed, "seed ", seed, " chain4: ", res.worst);
    }

    {
      // logit-space binary cross-entropy
      Tensor z = random_param(rng, {m}, 2.0);
      Tensor labels = Tensor::zeros({m});
      for (double& v : labels.values()) v = rng.bernoulli(0.4) ? 1.0 : 0.0;
      auto fwd = [&](Graph& g) -> Tensor {
        return O::bce_with_logits_mean(g, z, labels);
      };
      const auto res = check_gradients(fwd, {z});
      CHECK_MESSAGE(res.passed, "seed ", seed, " bce: ", res.worst);
    }

    {
      // softplus is smooth everywhere, so no kink guard needed
      Tensor z = random_param(rng, {m, n}, 2.0);
      Rng proj_rng = rng.fork("proj5");
      auto fwd = [&](Graph& g) -> Tensor {
        Rng pr = proj_rng;
        return project(g, O::softplus(g, z), pr);
      };
      const auto res = check_gradients(fwd, {z});
      CHECK_MESSAGE(res.passed, "seed ", seed, " softplus: ", res.worst);
    }
  }
}

TEST_CASE("hand-derived gradient values") {
  // d(sigmoid)/dz at z=0 is 0.25
  {
    Graph g;
    Tensor z = Tensor::zeros({1}, true);
    Tensor y = O::sigmoid(g, z);
    CHECK(y.item() == 0.5);
    g.backward(y);
    CHECK(z.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
  // sum gradient is all ones
  {
    Graph g;
    Tensor x = Tensor::from_values({3}, {1.0, -2.0, 5.0}, true);
    g.backward(O::sum_all(g, x));
    for (double gv : x.grad()) CHECK(gv == 1.0);
  }
  // cross-entropy at z=0, y=1: loss ln 2, dL/dz = sigma(0) - 1 = -0.5
  {
    Graph g;
    Tensor z = Tensor::zeros({1}, true);
    Tensor label = Tensor::from_values({1}, {1.0});
    Tensor loss = O::bce_with_logits_mean(g, z, label);
    CHECK(loss.item() == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    g.backward(loss);
    CHECK(z.grad()[0] == doctest::Approx(-0.5).epsilon(1e-15));
  }
  // extreme logits stay finite (no exp overflow)
  {
    Graph g;
    Tensor z = Tensor::from_values({2}, {700.0, -700.0}, true);
    Tensor label = Tensor::from_values({2}, {0.0, 1.0});
    Tensor loss = O::bce_with_logits_mean(g, z, label);
    CHECK(std::isfinite(loss.item()));
    CHECK(loss.item() == doctest::Approx(700.0).epsilon(1e-12));
    g.backward(loss);
    CHECK(std::isfinite(z.grad()[0]));
  }
  // squared hinge on |a-b| with margin: inside the margin both value and
  // gradient are exactly zero
  {
    Graph g;
    Tensor a = Tensor::from_values({1}, {0.52}, true);
    Tensor b = Tensor::from_values({1}, {0.50}, true);
    const double margin = 0.05;
    Tensor gap = O::relu(g, O::add_scalar(g, O::abs(g, O::sub(g, a, b)),
                                          -margin));
    Tensor loss = O::sum_all(g, O::elementwise_mul(g, gap, gap));
    CHECK(loss.item() == 0.0);
    g.backward(loss);
    CHECK(a.grad()[0] == 0.0);
    CHECK(b.grad()[0] == 0.0);
  }
  // same hinge outside the margin: d/da (|a-b| - m)^2 = 2(|a-b| - m)*sign
  {
    Graph g;
    Tensor a = Tensor::from_values({1}, {0.70}, true);
    Tensor b = Tensor::from_values({1}, {0.50}, true);
    Tensor gap = O::relu(g, O::add_scalar(g, O::abs(g, O::sub(g, a, b)),
                                          -0.05));
    Tensor loss = O::sum_all(g, O::elementwise_mul(g, gap, gap));
    CHECK(loss.item() == doctest::Approx(0.0225).epsilon(1e-12));
    g.backward(loss);
    CHECK(a.grad()[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(b.grad()[0] == doctest::Approx(-0.3).epsilon(1e-12));
  }
  // softplus: ln 2 at zero, identity-like for huge inputs, sigmoid slope
  {
    Graph g;
    Tensor x = Tensor::from_values({3}, {0.0, 800.0, -800.0}, true);
    Tensor y = O::softplus(g, x);
    CHECK(y.at(0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    CHECK(y.at(1) == 800.0);
    CHECK(y.at(2) == 0.0);
    g.backward(O::sum_all(g, y));
    CHECK(x.grad()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(x.grad()[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x.grad()[2] == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("detach blocks gradient flow") {
  Graph g;
  Tensor x = Tensor::from_values({2}, {3.0, -1.0}, true);
  Tensor frozen = O::detach(x);
  CHECK_FALSE(frozen.requires_grad());
  Tensor y = O::sum_all(g, O::elementwise_mul(g, x, frozen));
  g.backward(y);
  // d/dx of x * const(x_values) = the frozen values, not 2x
  CHECK(x.grad()[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(x.grad()[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("embedding rows shared by several ids accumulate gradient") {
  Graph g;
  Tensor table = Tensor::zeros({4, 2}, true);
  Tensor e = O::embedding_lookup(g, table, {0, 2, 0});
  g.backward(O::sum_all(g, e));
  CHECK(table.grad()[0 * 2 + 0] == 2.0);  // id 0 used twice
  CHECK(table.grad()[0 * 2 + 1] == 2.0);
  CHECK(table.grad()[2 * 2 + 0] == 1.0);
  CHECK(table.grad()[1 * 2 + 0] == 0.0);
}

TEST_CASE("softmax rows sum to one; all-equal rows become uniform") {
  Graph g;
  Tensor x = Tensor::from_values({2, 3},
                                 {5.0, 5.0, 5.0, 1.0, 2.0, 3.0});
  Tensor y = O::softmax_rows(g, x);
  CHECK(y.at(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  double row1 = y.at(1, 0) + y.at(1, 1) + y.at(1, 2);
  CHECK(row1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(y.at(1, 2) > y.at(1, 1));
}

TEST_CASE("l2_normalize leaves zero rows at zero with zero gradient") {
  Graph g;
  Tensor x = Tensor::from_values({2, 2}, {0.0, 0.0, 3.0, 4.0}, true);
  Tensor y = O::l2_normalize_rows(g, x);
  CHECK(y.at(0, 0) == 0.0);
  CHECK(y.at(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(y.at(1, 1) == doctest::Approx(0.8).epsilon(1e-15));
  g.backward(O::sum_all(g, y));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
}

TEST_CASE("adagrad follows the hand-computed trajectory") {
  // One parameter, constant gradient 2, fixed lr 0.01, eps 1e-8.
  // step 1: acc = 4,  theta = 1 - 0.01*2/(sqrt(4) + 1e-8)
  // step 2: acc = 8,  theta -= 0.01*2/(sqrt(8) + 1e-8)
  Tensor p = Tensor::from_values({1}, {1.0}, true);
  Adagrad opt({p}, 0.01, 0.01, 0, 1e-8);
  CHECK(opt.current_lr() == 0.01);

  p.grad()[0] = 2.0;
  opt.step();
  const double after1 = 1.0 - 0.01 * 2.0 / (2.0 + 1e-8);
  CHECK(p.at(0) == doctest::Approx(after1).epsilon(1e-15));
  CHECK(p.grad()[0] == 0.0);  // gradients cleared by step

  p.grad()[0] = 2.0;
  opt.step();
  const double after2 = after1 - 0.01 * 2.0 / (std::sqrt(8.0) + 1e-8);
  CHECK(p.at(0) == doctest::Approx(after2).epsilon(1e-15));
}

TEST_CASE("adagrad learning rate decays linearly to the floor and stays") {
  Tensor p = Tensor::zeros({1}, true);
  Adagrad opt({p}, 0.01, 0.001, 10);
  std::vector<double> lrs;
  for (int i = 0; i < 14; ++i) {
    lrs.push_back(opt.current_lr());
    p.grad()[0] = 1.0;
    opt.step();
  }
  CHECK(lrs[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(lrs[5] == doctest::Approx(0.0055).epsilon(1e-12));  // halfway
  CHECK(lrs[10] == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(lrs[13] == doctest::Approx(0.001).epsilon(1e-15));  // clamped
}

TEST_CASE("training loop is bitwise deterministic") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    Tensor w1 = random_param(rng, {4, 6}, 0.3);
    Tensor b1 = Tensor::zeros({6}, true);
    Tensor w2 = random_param(rng, {6, 1}, 0.3);
    Tensor x = random_param(rng, {8, 4}, 1.0);
    x.set_requires_grad(false);
    Tensor labels = Tensor::zeros({8});
    for (std::size_t i = 0; i < 8; ++i) labels.values()[i] = i % 2;

    Adagrad opt({w1, b1, w2}, 0.01, 0.001, 30);
    for (int step = 0; step < 10; ++step) {
      Graph g;
      Tensor h = O::tanh(g, O::add(g, O::matmul(g, x, w1), b1));
      Tensor z = O::reshape(g, O::matmul(g, h, w2), {8});
      Tensor loss = O::bce_with_logits_mean(g, z, labels);
      g.backward(loss);
      opt.step();
    }
    std::vector<double> flat;
    for (const Tensor* t : {&w1, &b1, &w2}) {
      flat.insert(flat.end(), t->values().begin(), t->values().end());
    }
    return flat;
  };
  const auto a = run(123);
  const auto b = run(123);
  const auto c = run(124);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  CHECK(a != c);  // different seed actually changes the result
}

TEST_CASE("graph only records nodes when gradients are needed") {
  Graph g;
  Tensor a = Tensor::zeros({2, 2});  // no grad
  Tensor b = Tensor::zeros({2, 2});
  O::matmul(g, a, b);
  CHECK(g.node_count() == 0);
  Tensor c = Tensor::zeros({2, 2}, true);
  O::matmul(g, a, c);
  CHECK(g.node_count() == 1);
}

TEST_CASE("checkpoint round-trips bit-exactly and serializes stably") {
  namespace fs = std::filesystem;
  Rng rng(404);
  Checkpoint ck;
  ck.add("layer0.weight", random_param(rng, {3, 5}, 2.5));
  ck.add("layer0.bias", random_param(rng, {5}, 0.01));
  ck.add("table", random_param(rng, {7, 2}, 1e-7));

  const fs::path dir = fs::temp_directory_path() / "grouprec_test_ckpt";
  fs::create_directories(dir);
  const fs::path p = dir / "model.ckpt";
  ck.save(p.string());

  Checkpoint back = Checkpoint::load(p.string());
  REQUIRE(back.entries.size() == 3);
  CHECK(back.has("table"));
  CHECK_THROWS_AS(back.get("missing"), Error);
  for (const auto& [name, t] : ck.entries) {
    const Tensor& r = back.get(name);
    REQUIRE(r.shape() == t.shape());
    CHECK(std::memcmp(r.values().data(), t.values().data(),
                      t.numel() * sizeof(double)) == 0);
  }
  // save(load(x)) must be byte-identical to x
  CHECK(back.serialize() == ck.serialize());
  CHECK_THROWS_AS([&] { Checkpoint d; d.add("x", Tensor::zeros({1}));
                        d.add("x", Tensor::zeros({1})); }(), Error);
  fs::remove_all(dir);
}
