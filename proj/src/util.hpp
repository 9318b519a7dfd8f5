// Copyright 2026 The SuperICL Harness Authors.
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

// Internal helpers shared by the library sources. Not installed.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sicl::detail {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string> split(std::string_view s, char sep);

/// Uniform integer in [0, bound) from the raw 64-bit engine output. Rejection
/// removes modulo bias; the result depends only on the engine's bit stream.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform real in [0, 1) built from the top 53 bits of one engine draw.
double unit_real(std::mt19937_64& rng);

std::uint64_t fnv1a64(std::string_view s) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string shortest_repr(double value);

}  // namespace sicl::detail
