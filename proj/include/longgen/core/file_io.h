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

namespace longgen {

// Whole-file read. Throws IoError if the file cannot be opened.
std::string read_file(const std::string& path);

// Writes `contents` to a sibling temporary file and renames it over `path`,
// so readers see either the old file or the complete new one.
void write_file_atomic(const std::string& path, std::string_view contents);

bool has_extension(std::string_view path, std::string_view extension);

}  // namespace longgen
