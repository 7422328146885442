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

#include <Eigen/Dense>

#include "longgen/core/weights.h"

namespace longgen::blocks {

// Activations are model_dim x N matrices; column n is one time step or one
// batch lane.
using Matrix = Eigen::MatrixXf;
using Vector = Eigen::VectorXf;

inline constexpr float kRmsNormEpsilon = 1e-6f;

float gelu(float x);  // tanh approximation
float sigmoid(float x);
float softplus(float x);

// Root-mean-square normalization of every column, then per-channel scale.
Matrix rms_norm(const Matrix& x, const Vector& scale);

// Copies a row-major [rows, cols] tensor into an Eigen matrix.
Matrix matrix_from(const ParameterSet& params, const std::string& name);
Vector vector_from(const ParameterSet& params, const std::string& name);

}  // namespace longgen::blocks
