// Copyright 2026 The PLBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace plbf {

// XXH64. Stable across platforms, so serialized filters answer identically
// wherever they are loaded.
std::uint64_t xxh64(std::span<const std::byte> data, std::uint64_t seed) noexcept;

inline std::uint64_t xxh64(std::string_view data, std::uint64_t seed) noexcept {
  return xxh64(std::as_bytes(std::span(data.data(), data.size())), seed);
}

// SplitMix64 finalizer; used to derive independent per-region / per-row seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(master ^ mix64(stream));
}

// CRC32C (Castagnoli), reflected, init/xorout 0xFFFFFFFF.
std::uint32_t crc32c(std::span<const std::byte> data) noexcept;

}  // namespace plbf
