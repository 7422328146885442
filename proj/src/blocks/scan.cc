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

#include "longgen/blocks/scan.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "longgen/core/errors.h"

namespace longgen::blocks {
namespace {

template <typename Scalar>
void check_inputs(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b,
                  const ChannelVector<Scalar>& h0) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != h0.size()) {
    throw InvalidArgument("recurrence inputs disagree in shape: a " +
                          std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + ", b " +
                          std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()) + ", h0 " +
                          std::to_string(h0.size()));
  }
  if (a.hasNaN() || b.hasNaN() || h0.hasNaN()) {
    throw NumericInputError("NaN in recurrence inputs");
  }
  if (a.size() > 0 && a.cwiseAbs().maxCoeff() > Scalar(1)) {
    throw InvalidArgument("recurrence decay must satisfy |a| <= 1");
  }
}

// Runs fn(k) for k in [0, count) over up to `threads` workers. Each index is
// handled by exactly one worker, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < count; k += threads) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

template <typename Scalar>
SeqMatrix<Scalar> rglru_scan(const SeqMatrix<Scalar>& a,
                             const SeqMatrix<Scalar>& b,
                             const ChannelVector<Scalar>& h0,
                             const ScanOptions& options) {
  check_inputs(a, b, h0);
  const Eigen::Index channels = a.rows();
  const Eigen::Index steps = a.cols();
  SeqMatrix<Scalar> h(channels, steps);
  if (steps == 0) return h;

  const Eigen::Index chunk = std::max(1, options.chunk_len);
  const int num_chunks = static_cast<int>((steps + chunk - 1) / chunk);
  int threads = options.max_threads > 0
                    ? options.max_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  // Thread start-up dominates small problems.
  if (steps * channels < (1 << 16)) threads = 1;

  // Phase 1: composite map of each chunk.
  SeqMatrix<Scalar> comp_a(channels, num_chunks);
  SeqMatrix<Scalar> comp_b(channels, num_chunks);
  parallel_for(num_chunks, threads, [&](int k) {
    const Eigen::Index begin = k * chunk;
    const Eigen::Index end = std::min(steps, begin + chunk);
    ChannelVector<Scalar> acc_a = ChannelVector<Scalar>::Ones(channels);
    ChannelVector<Scalar> acc_b = ChannelVector<Scalar>::Zero(channels);
    for (Eigen::Index t = begin; t < end; ++t) {
      acc_a = a.col(t).cwiseProduct(acc_a);
      acc_b = a.col(t).cwiseProduct(acc_b) + b.col(t);
    }
    comp_a.col(k) = acc_a;
    comp_b.col(k) = acc_b;
  });

  // Phase 2: exclusive scan of chunk composites applied to h0.
  SeqMatrix<Scalar> carry(channels, num_chunks);
  ChannelVector<Scalar> running = h0;
  for (int k = 0; k < num_chunks; ++k) {
    carry.col(k) = running;
    running = comp_a.col(k).cwiseProduct(running) + comp_b.col(k);
  }

  // Phase 3: replay each chunk from its incoming carry.
  parallel_for(num_chunks, threads, [&](int k) {
    const Eigen::Index begin = k * chunk;
    const Eigen::Index end = std::min(steps, begin + chunk);
    ChannelVector<Scalar> state = carry.col(k);
    for (Eigen::Index t = begin; t < end; ++t) {
      state = a.col(t).cwiseProduct(state) + b.col(t);
      h.col(t) = state;
    }
  });
  return h;
}

template <typename Scalar>
RecurrenceGradient<Scalar> recurrence_gradient(
    const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b,
    const ChannelVector<Scalar>& h0, const ChannelVector<Scalar>& upstream) {
  if (upstream.size() != h0.size()) {
    throw InvalidArgument("upstream cotangent must match the state width");
  }
  const SeqMatrix<Scalar> h = rglru_scan<Scalar>(a, b, h0);
  const Eigen::Index steps = a.cols();

  RecurrenceGradient<Scalar> grad;
  grad.da.resize(a.rows(), steps);
  grad.db.resize(a.rows(), steps);
  ChannelVector<Scalar> adjoint = upstream;  // d loss / d h_t
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    grad.db.col(t) = adjoint;
    grad.da.col(t) = adjoint.cwiseProduct(t > 0 ? h.col(t - 1) : h0);
    adjoint = a.col(t).cwiseProduct(adjoint);
  }
  grad.dh0 = adjoint;
  return grad;
}

template SeqMatrix<float> rglru_scan<float>(const SeqMatrix<float>&,
                                            const SeqMatrix<float>&,
                                            const ChannelVector<float>&,
                                            const ScanOptions&);
template SeqMatrix<double> rglru_scan<double>(const SeqMatrix<double>&,
                                              const SeqMatrix<double>&,
                                              const ChannelVector<double>&,
                                              const ScanOptions&);
template RecurrenceGradient<float> recurrence_gradient<float>(
    const SeqMatrix<float>&, const SeqMatrix<float>&,
    const ChannelVector<float>&, const ChannelVector<float>&);
template RecurrenceGradient<double> recurrence_gradient<double>(
    const SeqMatrix<double>&, const SeqMatrix<double>&,
    const ChannelVector<double>&, const ChannelVector<double>&);

}  // namespace longgen::blocks
