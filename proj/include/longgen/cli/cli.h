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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "longgen/decoder/sequence_model.h"

namespace longgen::cli {

// Runs one subcommand. argv[0] is the program name. Returns 0 on success,
// 2 on a usage or validation error and 1 on a runtime failure.
int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out,
                 std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

// Model references accepted by --model:
//   builtin:desk, builtin:desk-transformer, builtin:bench,
//   builtin:bench-transformer   randomly initialized from `model_seed`
//   path ending in .json        {"type": "scripted", ...} or
//                               {"type": "neural", "config": {...}, "seed": s}
//   any other path              weight archive carrying its config
std::unique_ptr<decoder::SequenceModel> load_model(const std::string& ref,
                                                   std::uint64_t model_seed);

}  // namespace longgen::cli
