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
#include <string_view>
#include <vector>

namespace longgen::evalkit {

// Whitespace-delimited words, in order.
std::vector<std::string> split_words(std::string_view text);

std::string join_words(const std::vector<std::string>& words,
                       std::size_t begin, std::size_t end);

// First `count` words joined by single spaces.
std::string truncate_words(std::string_view text, std::size_t count);

std::string ascii_lower(std::string_view text);

}  // namespace longgen::evalkit
