// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "atl/nn.hpp"
#include "atl/rng.hpp"
#include "atl/taxonomy.hpp"

namespace {

// Straightforward re-implementation used as the forward oracle.
std::vector<double> naive_probs(const atl::MLPParams& p, const std::vector<double>& x) {
  std::vector<double> h(p.w1.rows);
  for (std::size_t r = 0; r < p.w1.rows; ++r) {
    double s = p.b1[r];
    for (std::size_t c = 0; c < p.w1.cols; ++c) s += p.w1(r, c) * x[c];
    h[r] = s > 0.0 ? s : 0.0;
  }
  std::vector<double> out(p.w2.rows);
  for (std::size_t r = 0; r < p.w2.rows; ++r) {
    double s = p.b2[r];
    for (std::size_t c = 0; c < p.w2.cols; ++c) s += p.w2(r, c) * h[c];
    out[r] = 1.0 / (1.0 + std::exp(-s));
  }
  return out;
}

double naive_loss(const atl::MLPParams& p, const std::vector<double>& x,
                  const atl::Label& t) {
  const auto probs = naive_probs(p, x);
  double s = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double q = std::clamp(probs[k], 1e-7, 1.0 - 1e-7);
    s -= t[k] ? std::log(q) : std::log(1.0 - q);
  }
  return s / static_cast<double>(probs.size());
}

std::vector<double> random_vec(atl::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = atl::uniform(rng, -1.0, 1.0);
  return v;
}

atl::Label random_label(atl::Rng& rng, std::size_t n) {
  atl::Label t(n);
  for (auto& b : t) b = atl::uniform(rng, 0.0, 1.0) < 0.4;
  return t;
}

}  // namespace

TEST_CASE("forward: zero weights give probability one half") {
  atl::MLPParams p;
  p.w1 = atl::Matrix(3, 2);
  p.b1.assign(3, 0.0);
  p.w2 = atl::Matrix(4, 3);
  p.b2.assign(4, 0.0);
  const auto f = atl::mlp_forward(p, std::vector<double>{0.3, -2.0});
  for (double q : f.probs) CHECK(q == 0.5);

  atl::MLPParams unit;
  unit.w1 = atl::Matrix(1, 1, 1.0);
  unit.b1 = {0.0};
  unit.w2 = atl::Matrix(1, 1, 1.0);
  unit.b2 = {0.0};
  CHECK(atl::mlp_forward(unit, std::vector<double>{0.0}).probs[0] == 0.5);
}

TEST_CASE("forward matches an independent matmul oracle") {
  atl::Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + atl::uniform_index(rng, 40);
    const std::size_t h = 1 + atl::uniform_index(rng, 40);
    const std::size_t k = 1 + atl::uniform_index(rng, 40);
    const auto p = atl::init_params(d, h, k, 100 + t);
    const auto x = random_vec(rng, d);
    const auto got = atl::mlp_forward(p, x).probs;
    const auto want = naive_probs(p, x);
    for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("forward rejects bad input") {
  const auto p = atl::init_params(2, 3, 1, 1);
  CHECK_THROWS_AS(atl::mlp_forward(p, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      atl::mlp_forward(p, std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}),
      std::invalid_argument);
}

TEST_CASE("bce_loss examples") {
  CHECK(atl::bce_loss(std::vector<double>{0.5, 0.5, 0.5}, atl::Label{1, 0, 1}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(atl::bce_loss(std::vector<double>{1.0, 0.0}, atl::Label{1, 0}) < 1e-6);
  CHECK(atl::bce_loss(std::vector<double>{0.9, 0.1}, atl::Label{1, 0}) ==
        doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK_THROWS_AS(atl::bce_loss(std::vector<double>{0.5}, atl::Label{1, 0}),
                  std::invalid_argument);
}

TEST_CASE("backward matches a test-local finite-difference oracle") {
  atl::Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const std::size_t d = 1 + atl::uniform_index(rng, 8);
    const std::size_t h = 1 + atl::uniform_index(rng, 8);
    const std::size_t k = 1 + atl::uniform_index(rng, 8);
    auto p = atl::init_params(d, h, k, 900 + t);
    const auto x = random_vec(rng, d);
    const auto target = random_label(rng, k);
    const auto g = atl::mlp_backward(p, x, target);
    const double eps = 1e-6;
    // Check every b2 entry and every w2 entry: both are smooth everywhere.
    for (std::size_t i = 0; i < p.b2.size(); ++i) {
      const double keep = p.b2[i];
      p.b2[i] = keep + eps;
      const double up = naive_loss(p, x, target);
      p.b2[i] = keep - eps;
      const double down = naive_loss(p, x, target);
      p.b2[i] = keep;
      CHECK(g.b2[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(1e-5));
    }
    for (std::size_t i = 0; i < p.w2.data.size(); ++i) {
      const double keep = p.w2.data[i];
      p.w2.data[i] = keep + eps;
      const double up = naive_loss(p, x, target);
      p.w2.data[i] = keep - eps;
      const double down = naive_loss(p, x, target);
      p.w2.data[i] = keep;
      CHECK(g.w2.data[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(1e-5));
    }
  }
}

TEST_CASE("backward: inactive hidden units block the first-layer gradient") {
  atl::MLPParams p;
  p.w1 = atl::Matrix(2, 2);
  p.b1.assign(2, 0.0);
  p.w2 = atl::Matrix(2, 2, 1.0);
  p.b2.assign(2, 0.0);
  const auto g = atl::mlp_backward(p, std::vector<double>{1.0, 1.0}, atl::Label{1, 0});
  // Hidden units are inactive, so no gradient reaches the first layer.
  for (double v : g.w1.data) CHECK(v == 0.0);
  for (double v : g.b1) CHECK(v == 0.0);
  // The output-bias gradient is (p - t) / K.
  CHECK(g.b2[0] == doctest::Approx(-0.25));
  CHECK(g.b2[1] == doctest::Approx(0.25));
}

TEST_CASE("backward: duplicated example under mean reduction equals one copy") {
  const auto p = atl::init_params(4, 6, 3, 8);
  const std::vector<double> x{0.1, -0.4, 0.9, 0.2};
  const atl::Label t{1, 0, 1};
  const auto once = atl::mlp_backward(p, x, t);
  auto twice = atl::zeros_like(p);
  atl::accumulate_gradient(p, x, t, 0.5, twice);
  atl::accumulate_gradient(p, x, t, 0.5, twice);
  for (std::size_t i = 0; i < once.w1.data.size(); ++i) {
    CHECK(twice.w1.data[i] == doctest::Approx(once.w1.data[i]).epsilon(1e-14));
  }
  for (std::size_t i = 0; i < once.b2.size(); ++i) {
    CHECK(twice.b2[i] == doctest::Approx(once.b2[i]).epsilon(1e-14));
  }
}

TEST_CASE("sgd_step and init_params") {
  auto p = atl::init_params(3, 5, 2, 42);
  CHECK(p == atl::init_params(3, 5, 2, 42));
  CHECK_FALSE(p == atl::init_params(3, 5, 2, 43));
  for (double b : p.b1) CHECK(b == 0.0);
  const double a = std::sqrt(6.0 / 8.0);
  for (double w : p.w1.data) CHECK(std::abs(w) <= a);

  const std::vector<double> x{0.5, -0.5, 1.0};
  const atl::Label t{1, 0};
  const auto g = atl::mlp_backward(p, x, t);
  auto same = p;
  atl::sgd_step(same, g, 0.0);
  CHECK(same == p);

  const double before = atl::bce_loss(atl::mlp_forward(p, x).probs, t);
  atl::sgd_step(p, g, 0.1);
  CHECK(atl::bce_loss(atl::mlp_forward(p, x).probs, t) < before);

  auto bad = g;
  bad.w2.data[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(atl::sgd_step(p, bad, 0.1), doctest::Contains("w2"),
                       std::invalid_argument);
}

TEST_CASE("small steps do not increase the loss") {
  atl::Rng rng(123);
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t d = 1 + atl::uniform_index(rng, 8);
    const std::size_t h = 1 + atl::uniform_index(rng, 8);
    const std::size_t k = 1 + atl::uniform_index(rng, 8);
    auto p = atl::init_params(d, h, k, rng());
    const auto x = random_vec(rng, d);
    const auto target = random_label(rng, k);
    const double before = atl::bce_loss(atl::mlp_forward(p, x).probs, target);
    atl::sgd_step(p, atl::mlp_backward(p, x, target), 1e-3);
    ok += atl::bce_loss(atl::mlp_forward(p, x).probs, target) <= before;
  }
  CHECK(ok >= 990);
}

TEST_CASE("grad_check passes on random configurations") {
  atl::Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + atl::uniform_index(rng, 32);
    const std::size_t h = 1 + atl::uniform_index(rng, 32);
    const std::size_t k = 1 + atl::uniform_index(rng, 32);
    const auto p = atl::init_params(d, h, k, rng());
    const auto report = atl::grad_check(p, random_vec(rng, d), random_label(rng, k));
    CHECK(report.max_rel_error < 1e-4);
    CHECK(report.checked > 0);
  }
}

TEST_CASE("grad_check catches a wrong gradient") {
  auto p = atl::init_params(3, 4, 2, 3);
  const std::vector<double> x{0.2, 0.4, -0.1};
  const atl::Label t{1, 0};
  auto g = atl::mlp_backward(p, x, t);
  g.b2[0] += 0.01;
  const auto blocks = atl::param_blocks("m.", p, g);
  const auto report = atl::check_gradient(blocks, [&] {
    const auto f = atl::mlp_forward(p, x);
    return atl::LossProbe{atl::bce_loss(f.probs, t), atl::relu_pattern(f.hidden_pre)};
  });
  CHECK(report.max_rel_error > 1e-2);
}

TEST_CASE("forward is deterministic") {
  const auto p = atl::init_params(7, 9, 4, 77);
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  CHECK(atl::mlp_forward(p, x).probs == atl::mlp_forward(p, x).probs);
}
