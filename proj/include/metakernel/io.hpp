// Copyright 2026 The Metakernel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace metakernel {

/// Shortest decimal representation that parses back to the same double.
/// Locale independent; non-finite values print as "nan", "inf", "-inf".
std::string format_double(double value);

/// Strict locale-independent parse of a full string; throws InputError.
double parse_double(std::string_view text);

std::int64_t parse_int(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

std::string read_text_file(const std::filesystem::path& path);

/// Writes `content` in binary mode, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace metakernel
