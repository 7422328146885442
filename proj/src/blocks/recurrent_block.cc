// Copyright 2026 The longgen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "longgen/blocks/recurrent_block.h"

#include <cmath>
#include <string>

#include "longgen/blocks/scan.h"
#include "longgen/core/errors.h"

namespace longgen::blocks {
namespace {

void check_input(const Matrix& x, const RecurrentBlockParams& params) {
  if (x.rows() != params.model_dim()) {
    throw InvalidArgument("recurrent block expects inputs of width " +
                          std::to_string(params.model_dim()) + ", got " +
                          std::to_string(x.rows()));
  }
}

void check_state(const RecurrentBlockState& state,
                 const RecurrentBlockParams& params) {
  if (state.h.size() != params.recurrence_dim() ||
      state.conv_tail.rows() != params.recurrence_dim() ||
      state.conv_tail.cols() != params.conv_width() - 1) {
    throw InvalidArgument("recurrent block state does not match parameters");
  }
}

}  // namespace

RecurrentBlockParams RecurrentBlockParams::load(const ParameterSet& params,
                                                const std::string& prefix,
                                                float gate_constant) {
  RecurrentBlockParams p;
  p.branch_a = matrix_from(params, prefix + "branch_a");
  p.branch_b = matrix_from(params, prefix + "branch_b");
  p.conv_weight = matrix_from(params, prefix + "conv.weight").transpose();
  p.conv_bias = vector_from(params, prefix + "conv.bias");
  p.gate_a = matrix_from(params, prefix + "gate_a.weight");
  p.gate_a_bias = vector_from(params, prefix + "gate_a.bias");
  p.gate_x = matrix_from(params, prefix + "gate_x.weight");
  p.gate_x_bias = vector_from(params, prefix + "gate_x.bias");
  p.decay = vector_from(params, prefix + "decay");
  p.out = matrix_from(params, prefix + "out");
  p.gate_constant = gate_constant;
  return p;
}

RecurrentBlockParams RecurrentBlockParams::zeros(int model_dim,
                                                 int recurrence_dim,
                                                 int conv_width,
                                                 float gate_constant) {
  RecurrentBlockParams p;
  p.branch_a = Matrix::Zero(recurrence_dim, model_dim);
  p.branch_b = Matrix::Zero(recurrence_dim, model_dim);
  p.conv_weight = Matrix::Zero(recurrence_dim, conv_width);
  p.conv_bias = Vector::Zero(recurrence_dim);
  p.gate_a = Matrix::Zero(recurrence_dim, recurrence_dim);
  p.gate_a_bias = Vector::Zero(recurrence_dim);
  p.gate_x = Matrix::Zero(recurrence_dim, recurrence_dim);
  p.gate_x_bias = Vector::Zero(recurrence_dim);
  p.decay = Vector::Zero(recurrence_dim);
  p.out = Matrix::Zero(model_dim, recurrence_dim);
  p.gate_constant = gate_constant;
  return p;
}

RecurrentBlockState make_recurrent_state(const RecurrentBlockParams& params) {
  RecurrentBlockState state;
  state.h = Vector::Zero(params.recurrence_dim());
  state.conv_tail = Matrix::Zero(params.recurrence_dim(),
                                 params.conv_width() - 1);
  return state;
}

GatedInputs gate_recurrence_inputs(const Matrix& conv_out,
                                   const RecurrentBlockParams& params) {
  const Vector rate = params.decay.unaryExpr([&](float v) {
    return params.gate_constant * softplus(v);
  });
  Matrix r = params.gate_a * conv_out;
  r.colwise() += params.gate_a_bias;
  Matrix i = params.gate_x * conv_out;
  i.colwise() += params.gate_x_bias;

  GatedInputs out;
  out.a.resize(conv_out.rows(), conv_out.cols());
  out.b.resize(conv_out.rows(), conv_out.cols());
  for (Eigen::Index n = 0; n < conv_out.cols(); ++n) {
    for (Eigen::Index c = 0; c < conv_out.rows(); ++c) {
      const float log_a = -rate(c) * sigmoid(r(c, n));
      // sqrt(1 - a^2) via expm1 keeps precision when a is close to 1.
      const float input_scale = std::sqrt(-std::expm1(2.0f * log_a));
      out.a(c, n) = std::exp(log_a);
      out.b(c, n) = input_scale * sigmoid(i(c, n)) * conv_out(c, n);
    }
  }
  return out;
}

Matrix recurrent_block_step_batch(const Matrix& x,
                                  std::span<RecurrentBlockState* const> states,
                                  const RecurrentBlockParams& params) {
  check_input(x, params);
  if (static_cast<Eigen::Index>(states.size()) != x.cols()) {
    throw InvalidArgument("one recurrent state per batch lane required");
  }
  const int width = params.conv_width();
  const Matrix branch_a =
      (params.branch_a * x).unaryExpr([](float v) { return gelu(v); });
  const Matrix pre_conv = params.branch_b * x;

  Matrix conv_out(pre_conv.rows(), pre_conv.cols());
  for (Eigen::Index l = 0; l < x.cols(); ++l) {
    RecurrentBlockState& s = *states[static_cast<std::size_t>(l)];
    check_state(s, params);
    Vector acc = params.conv_bias + params.conv_weight.col(0).cwiseProduct(
                                        pre_conv.col(l));
    for (int k = 1; k < width; ++k) {
      acc += params.conv_weight.col(k).cwiseProduct(s.conv_tail.col(k - 1));
    }
    conv_out.col(l) = acc;
    for (int j = width - 2; j > 0; --j) {
      s.conv_tail.col(j) = s.conv_tail.col(j - 1);
    }
    if (width > 1) s.conv_tail.col(0) = pre_conv.col(l);
  }

  const GatedInputs gated = gate_recurrence_inputs(conv_out, params);
  Matrix mixed(branch_a.rows(), branch_a.cols());
  for (Eigen::Index l = 0; l < x.cols(); ++l) {
    RecurrentBlockState& s = *states[static_cast<std::size_t>(l)];
    s.h = gated.a.col(l).cwiseProduct(s.h) + gated.b.col(l);
    mixed.col(l) = branch_a.col(l).cwiseProduct(s.h);
  }
  return params.out * mixed;
}

Vector recurrent_block_step(const Vector& x, RecurrentBlockState& state,
                            const RecurrentBlockParams& params) {
  RecurrentBlockState* lanes[] = {&state};
  return recurrent_block_step_batch(x, lanes, params).col(0);
}

Matrix recurrent_block_parallel(const Matrix& x,
                                const RecurrentBlockParams& params) {
  check_input(x, params);
  const int width = params.conv_width();
  const Eigen::Index steps = x.cols();
  const Matrix branch_a =
      (params.branch_a * x).unaryExpr([](float v) { return gelu(v); });
  const Matrix pre_conv = params.branch_b * x;

  Matrix conv_out(pre_conv.rows(), steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    Vector acc = params.conv_bias + params.conv_weight.col(0).cwiseProduct(
                                        pre_conv.col(t));
    for (int k = 1; k < width && k <= t; ++k) {
      acc += params.conv_weight.col(k).cwiseProduct(pre_conv.col(t - k));
    }
    conv_out.col(t) = acc;
  }

  const GatedInputs gated = gate_recurrence_inputs(conv_out, params);
  const Matrix h = rglru_scan<float>(gated.a, gated.b,
                                     Vector::Zero(params.recurrence_dim()));
  return params.out * branch_a.cwiseProduct(h);
}

}  // namespace longgen::blocks
