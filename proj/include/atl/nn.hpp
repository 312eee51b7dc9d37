// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Two-layer multi-label classifier with hand-written backpropagation.
//
//   probs = sigmoid(W2 relu(W1 x + b1) + b2)
//
// Loss is binary cross entropy averaged over the K outputs, probabilities
// clamped to [1e-7, 1 - 1e-7] before the logs. Inner loops run through
// atl::kernels.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace atl {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool operator==(const Matrix&) const = default;
};

struct MLPParams {
  Matrix w1;               // hidden x input
  std::vector<double> b1;  // hidden
  Matrix w2;               // outputs x hidden
  std::vector<double> b2;  // outputs
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return w1.cols; }
  std::size_t hidden_width() const { return w1.rows; }
  std::size_t output_dim() const { return w2.rows; }

  bool operator==(const MLPParams&) const = default;
};

// Gradients share the parameter layout.
using MLPGrads = MLPParams;

inline constexpr double kProbClamp = 1e-7;

struct MLPForward {
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> probs;
};

double sigmoid(double z);

// Throws std::invalid_argument on shape mismatch or inconsistent params.
void validate_shapes(const MLPParams& params);

// Throws std::invalid_argument on shape mismatch or non-finite input.
MLPForward mlp_forward(const MLPParams& params, std::span<const double> x);

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> target);

MLPGrads zeros_like(const MLPParams& params);

// Adds scale * d(bce(forward(x), target))/d(params) into grads and returns
// the unscaled loss. The gradient is exact wherever no probability is
// clamped. When input_grad is non-empty it receives scale * dL/dx; when
// pattern is set, the hidden-unit sign pattern is folded into it.
double accumulate_gradient(const MLPParams& params, std::span<const double> x,
                           std::span<const std::uint8_t> target, double scale,
                           MLPGrads& grads, std::span<double> input_grad = {},
                           std::uint64_t* pattern = nullptr);

MLPGrads mlp_backward(const MLPParams& params, std::span<const double> x,
                      std::span<const std::uint8_t> target);

// params -= lr * grads. Throws std::invalid_argument naming the parameter
// when a gradient entry is not finite.
void sgd_step(MLPParams& params, const MLPGrads& grads, double lr);

// Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero biases.
MLPParams init_params(std::size_t input_dim, std::size_t hidden_width,
                      std::size_t output_dim, std::uint64_t seed);

// Finite-difference verification ------------------------------------------

struct GradReport {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> per_parameter;
  std::size_t checked = 0;
  // Coordinates whose +-step probe flipped a ReLU; their central difference
  // straddles a kink and is not a derivative estimate.
  std::size_t skipped_kinks = 0;
};

// |analytic - numeric| / max(|analytic|, |numeric|, kGradCheckFloor)
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric);

struct ParamBlock {
  std::string name;
  std::span<double> values;            // live parameters, perturbed in place
  std::span<const double> analytic;    // gradient under test
};

struct LossProbe {
  double loss = 0.0;
  std::uint64_t relu_pattern = 0;  // hash of all hidden activation signs
};

// Central differences over every coordinate of every block. evaluate() must
// read the live parameters the blocks point into.
GradReport check_gradient(std::span<const ParamBlock> blocks,
                          const std::function<LossProbe()>& evaluate,
                          double step = 1e-5);

std::vector<ParamBlock> param_blocks(const std::string& prefix, MLPParams& params,
                                     const MLPGrads& grads);

std::uint64_t relu_pattern(std::span<const double> hidden_pre,
                           std::uint64_t seed = 0);

GradReport grad_check(const MLPParams& params, std::span<const double> x,
                      std::span<const std::uint8_t> target, double step = 1e-5);

}  // namespace atl
