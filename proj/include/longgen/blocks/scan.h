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

#include <Eigen/Dense>

namespace longgen::blocks {

// Sequences are stored channels x time: column t holds step t.
template <typename Scalar>
using SeqMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ChannelVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ScanOptions {
  // Steps per chunk. Results depend on the chunk length (rounding at chunk
  // joins) but never on the number of threads.
  int chunk_len = 64;
  // 0 uses std::thread::hardware_concurrency().
  int max_threads = 0;
};

// Linear recurrence h_t = a_t * h_{t-1} + b_t (elementwise), evaluated as a
// three-phase chunked associative scan: each chunk is reduced to the composite
// map (prod a, folded b) under (a2, b2) o (a1, b1) = (a2 a1, a2 b1 + b2), the
// chunk carries are scanned, then every chunk is replayed from its carry.
//
// Requires |a| <= 1 everywhere. Throws NumericInputError on NaN inputs and
// InvalidArgument on shape mismatch or |a| > 1.
template <typename Scalar>
SeqMatrix<Scalar> rglru_scan(const SeqMatrix<Scalar>& a,
                             const SeqMatrix<Scalar>& b,
                             const ChannelVector<Scalar>& h0,
                             const ScanOptions& options = {});

template <typename Scalar>
struct RecurrenceGradient {
  SeqMatrix<Scalar> da;
  SeqMatrix<Scalar> db;
  ChannelVector<Scalar> dh0;
};

// Reverse-mode derivative of loss = <upstream, h_T> with respect to every a_t,
// b_t and h0, where h follows the same recurrence as rglru_scan.
template <typename Scalar>
RecurrenceGradient<Scalar> recurrence_gradient(
    const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b,
    const ChannelVector<Scalar>& h0, const ChannelVector<Scalar>& upstream);

}  // namespace longgen::blocks
