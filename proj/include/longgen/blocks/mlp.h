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

#pragma once

#include <string>

#include "longgen/blocks/ops.h"

namespace longgen::blocks {

// y = W_down (gelu(W_gate x + b_gate) * (W_up x + b_up)) + b_down
struct MlpParams {
  Matrix gate;  // hidden x d
  Vector gate_bias;
  Matrix up;  // hidden x d
  Vector up_bias;
  Matrix down;  // d x hidden
  Vector down_bias;

  static MlpParams load(const ParameterSet& params, const std::string& prefix);
};

Matrix gated_mlp(const Matrix& x, const MlpParams& params);
Vector gated_mlp(const Vector& x, const MlpParams& params);

}  // namespace longgen::blocks
