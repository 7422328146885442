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

#include "longgen/blocks/ops.h"

#include <cmath>

#include "longgen/core/errors.h"

namespace longgen::blocks {

float gelu(float x) {
  constexpr float kSqrt2OverPi = 0.7978845608028654f;
  return 0.5f * x * (1.0f + std::tanh(kSqrt2OverPi * (x + 0.044715f * x * x * x)));
}

float sigmoid(float x) {
  if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
  const float e = std::exp(x);
  return e / (1.0f + e);
}

float softplus(float x) {
  if (x > 20.0f) return x;
  return std::log1p(std::exp(x));
}

Matrix rms_norm(const Matrix& x, const Vector& scale) {
  Matrix out(x.rows(), x.cols());
  const float inv_dim = 1.0f / static_cast<float>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const float mean_sq = x.col(c).squaredNorm() * inv_dim;
    const float inv_rms = 1.0f / std::sqrt(mean_sq + kRmsNormEpsilon);
    out.col(c) = (x.col(c) * inv_rms).cwiseProduct(scale);
  }
  return out;
}

Matrix matrix_from(const ParameterSet& params, const std::string& name) {
  const Tensor& t = params.at(name);
  if (t.shape.size() != 2) {
    throw SchemaError("tensor '" + name + "' is not a matrix");
  }
  using RowMajor =
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(t.data.data(), t.shape[0], t.shape[1]);
}

Vector vector_from(const ParameterSet& params, const std::string& name) {
  const Tensor& t = params.at(name);
  if (t.shape.size() != 1) {
    throw SchemaError("tensor '" + name + "' is not a vector");
  }
  return Eigen::Map<const Vector>(t.data.data(), t.shape[0]);
}

}  // namespace longgen::blocks
