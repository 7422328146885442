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

#include "longgen/blocks/mlp.h"

#include "longgen/core/errors.h"

namespace longgen::blocks {

MlpParams MlpParams::load(const ParameterSet& params,
                          const std::string& prefix) {
  MlpParams p;
  p.gate = matrix_from(params, prefix + "gate.weight");
  p.gate_bias = vector_from(params, prefix + "gate.bias");
  p.up = matrix_from(params, prefix + "up.weight");
  p.up_bias = vector_from(params, prefix + "up.bias");
  p.down = matrix_from(params, prefix + "down.weight");
  p.down_bias = vector_from(params, prefix + "down.bias");
  return p;
}

Matrix gated_mlp(const Matrix& x, const MlpParams& params) {
  if (x.rows() != params.gate.cols()) {
    throw InvalidArgument("MLP input width mismatch");
  }
  Matrix gate = params.gate * x;
  gate.colwise() += params.gate_bias;
  Matrix up = params.up * x;
  up.colwise() += params.up_bias;
  const Matrix hidden =
      gate.unaryExpr([](float v) { return gelu(v); }).cwiseProduct(up);
  Matrix out = params.down * hidden;
  out.colwise() += params.down_bias;
  return out;
}

Vector gated_mlp(const Vector& x, const MlpParams& params) {
  return gated_mlp(Matrix(x), params).col(0);
}

}  // namespace longgen::blocks
