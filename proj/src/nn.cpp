// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "atl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "atl/kernels.hpp"
#include "atl/rng.hpp"

namespace atl {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void validate_shapes(const MLPParams& p) {
  if (p.w1.data.size() != p.w1.rows * p.w1.cols ||
      p.w2.data.size() != p.w2.rows * p.w2.cols) {
    throw std::invalid_argument("MLP weight storage does not match its shape");
  }
  if (p.b1.size() != p.w1.rows) throw std::invalid_argument("MLP b1 size mismatch");
  if (p.w2.cols != p.w1.rows) throw std::invalid_argument("MLP w2 columns != hidden width");
  if (p.b2.size() != p.w2.rows) throw std::invalid_argument("MLP b2 size mismatch");
}

MLPForward mlp_forward(const MLPParams& params, std::span<const double> x) {
  validate_shapes(params);
  if (x.size() != params.input_dim()) {
    throw std::invalid_argument("mlp_forward: input has " + std::to_string(x.size()) +
                                " dims, expected " + std::to_string(params.input_dim()));
  }
  for (const double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("mlp_forward: non-finite input");
  }
  const auto& k = kernels::active();
  const std::size_t h = params.hidden_width();
  const std::size_t out = params.output_dim();
  MLPForward f;
  f.hidden_pre.resize(h);
  k.gemv(params.w1.data.data(), h, params.input_dim(), x.data(), params.b1.data(),
         f.hidden_pre.data());
  f.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) f.hidden[j] = std::max(0.0, f.hidden_pre[j]);
  f.logits.resize(out);
  k.gemv(params.w2.data.data(), out, h, f.hidden.data(), params.b2.data(),
         f.logits.data());
  f.probs.resize(out);
  for (std::size_t i = 0; i < out; ++i) f.probs[i] = sigmoid(f.logits[i]);
  return f;
}

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> target) {
  if (probs.size() != target.size() || probs.empty()) {
    throw std::invalid_argument("bce_loss: probs and target sizes differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
    sum -= target[i] ? std::log(p) : std::log1p(-p);
  }
  return sum / static_cast<double>(probs.size());
}

MLPGrads zeros_like(const MLPParams& p) {
  MLPGrads g;
  g.w1 = Matrix(p.w1.rows, p.w1.cols);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2 = Matrix(p.w2.rows, p.w2.cols);
  g.b2.assign(p.b2.size(), 0.0);
  g.seed = p.seed;
  return g;
}

double accumulate_gradient(const MLPParams& params, std::span<const double> x,
                           std::span<const std::uint8_t> target, double scale,
                           MLPGrads& grads, std::span<double> input_grad,
                           std::uint64_t* pattern) {
  const MLPForward f = mlp_forward(params, x);
  if (pattern) *pattern = mix64(*pattern ^ relu_pattern(f.hidden_pre));
  if (target.size() != params.output_dim()) {
    throw std::invalid_argument("accumulate_gradient: target size mismatch");
  }
  if (grads.w1.rows != params.w1.rows || grads.w1.cols != params.w1.cols ||
      grads.w2.rows != params.w2.rows || grads.w2.cols != params.w2.cols) {
    throw std::invalid_argument("accumulate_gradient: gradient shape mismatch");
  }
  if (!input_grad.empty() && input_grad.size() != x.size()) {
    throw std::invalid_argument("accumulate_gradient: input_grad size mismatch");
  }
  const auto& k = kernels::active();
  const std::size_t h = params.hidden_width();
  const std::size_t out = params.output_dim();
  const double inv_k = 1.0 / static_cast<double>(out);

  // dL/dlogit = (p - t) / K for mean-reduced BCE on sigmoid outputs.
  std::vector<double> d_logit(out);
  for (std::size_t i = 0; i < out; ++i) {
    d_logit[i] = scale * (f.probs[i] - static_cast<double>(target[i])) * inv_k;
  }
  k.ger(1.0, d_logit.data(), out, f.hidden.data(), h, grads.w2.data.data());
  for (std::size_t i = 0; i < out; ++i) grads.b2[i] += d_logit[i];

  std::vector<double> d_hidden(h, 0.0);
  k.gemv_t(params.w2.data.data(), out, h, d_logit.data(), d_hidden.data());
  for (std::size_t j = 0; j < h; ++j) {
    if (f.hidden_pre[j] <= 0.0) d_hidden[j] = 0.0;
  }
  k.ger(1.0, d_hidden.data(), h, x.data(), x.size(), grads.w1.data.data());
  for (std::size_t j = 0; j < h; ++j) grads.b1[j] += d_hidden[j];
  if (!input_grad.empty()) {
    k.gemv_t(params.w1.data.data(), h, x.size(), d_hidden.data(), input_grad.data());
  }
  return bce_loss(f.probs, target);
}

MLPGrads mlp_backward(const MLPParams& params, std::span<const double> x,
                      std::span<const std::uint8_t> target) {
  MLPGrads g = zeros_like(params);
  accumulate_gradient(params, x, target, 1.0, g);
  return g;
}

void sgd_step(MLPParams& params, const MLPGrads& grads, double lr) {
  validate_shapes(params);
  const auto apply = [lr](std::vector<double>& w, const std::vector<double>& g,
                          const char* name) {
    if (w.size() != g.size()) {
      throw std::invalid_argument(std::string("sgd_step: shape mismatch in ") + name);
    }
    for (const double v : g) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("sgd_step: non-finite gradient in ") + name);
      }
    }
    if (lr == 0.0) return;
    kernels::active().axpy(-lr, g.data(), w.data(), w.size());
  };
  apply(params.w1.data, grads.w1.data, "w1");
  apply(params.b1, grads.b1, "b1");
  apply(params.w2.data, grads.w2.data, "w2");
  apply(params.b2, grads.b2, "b2");
}

MLPParams init_params(std::size_t input_dim, std::size_t hidden_width,
                      std::size_t output_dim, std::uint64_t seed) {
  if (input_dim == 0 || hidden_width == 0 || output_dim == 0) {
    throw std::invalid_argument("init_params: dimensions must be positive");
  }
  Rng rng(seed);
  MLPParams p;
  p.seed = seed;
  const auto fill = [&rng](Matrix& m, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : m.data) w = uniform(rng, -a, a);
  };
  p.w1 = Matrix(hidden_width, input_dim);
  fill(p.w1, input_dim, hidden_width);
  p.b1.assign(hidden_width, 0.0);
  p.w2 = Matrix(output_dim, hidden_width);
  fill(p.w2, hidden_width, output_dim);
  p.b2.assign(output_dim, 0.0);
  return p;
}

double relative_error(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

GradReport check_gradient(std::span<const ParamBlock> blocks,
                          const std::function<LossProbe()>& evaluate, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("check_gradient: step must be positive");
  GradReport report;
  const std::uint64_t base_pattern = evaluate().relu_pattern;
  for (const ParamBlock& block : blocks) {
    if (block.values.size() != block.analytic.size()) {
      throw std::invalid_argument("check_gradient: block " + block.name + " size mismatch");
    }
    double block_max = 0.0;
    for (std::size_t i = 0; i < block.values.size(); ++i) {
      const double saved = block.values[i];
      block.values[i] = saved + step;
      const LossProbe plus = evaluate();
      block.values[i] = saved - step;
      const LossProbe minus = evaluate();
      block.values[i] = saved;
      if (plus.relu_pattern != base_pattern || minus.relu_pattern != base_pattern) {
        ++report.skipped_kinks;
        continue;
      }
      const double numeric = (plus.loss - minus.loss) / (2.0 * step);
      block_max = std::max(block_max, relative_error(block.analytic[i], numeric));
      ++report.checked;
    }
    report.per_parameter.emplace_back(block.name, block_max);
    report.max_rel_error = std::max(report.max_rel_error, block_max);
  }
  return report;
}

std::vector<ParamBlock> param_blocks(const std::string& prefix, MLPParams& params,
                                     const MLPGrads& grads) {
  return {
      {prefix + "w1", params.w1.data, grads.w1.data},
      {prefix + "b1", params.b1, grads.b1},
      {prefix + "w2", params.w2.data, grads.w2.data},
      {prefix + "b2", params.b2, grads.b2},
  };
}

std::uint64_t relu_pattern(std::span<const double> hidden_pre, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ hidden_pre.size());
  std::uint64_t word = 0;
  for (std::size_t j = 0; j < hidden_pre.size(); ++j) {
    word = (word << 1) | (hidden_pre[j] > 0.0 ? 1 : 0);
    if (j % 64 == 63) {
      h = mix64(h ^ word);
      word = 0;
    }
  }
  return mix64(h ^ word);
}

GradReport grad_check(const MLPParams& params, std::span<const double> x,
                      std::span<const std::uint8_t> target, double step) {
  const MLPGrads analytic = mlp_backward(params, x, target);
  MLPParams probe = params;
  const auto blocks = param_blocks("", probe, analytic);
  return check_gradient(blocks, [&] {
    const MLPForward f = mlp_forward(probe, x);
    return LossProbe{bce_loss(f.probs, target), relu_pattern(f.hidden_pre)};
  }, step);
}

}  // namespace atl
