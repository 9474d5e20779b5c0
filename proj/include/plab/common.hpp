// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <initializer_list>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plab {

enum class Errc {
  pool_exhausted,
  missing_placeholder,
  attribute_mismatch,
  odd_count,
  empty_corpus,
  unknown_id,
  misaligned_span,
  length_overflow,
  all_masked,
  cache_mismatch,
  non_finite,
  zero_gradient,
  insufficient_points,
  degenerate_variance,
  invalid_argument,
  config,
  io,
};

std::string_view errc_name(Errc code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class Attribute : std::uint8_t { birth_date, college, major, hometown, company };

inline constexpr std::size_t kNumAttributes = 5;
inline constexpr std::array<Attribute, kNumAttributes> kAttributes = {
    Attribute::birth_date, Attribute::college, Attribute::major,
    Attribute::hometown, Attribute::company};

std::string_view attribute_name(Attribute a);
Attribute parse_attribute(std::string_view name);

inline std::size_t index_of(Attribute a) { return static_cast<std::size_t>(a); }

/// Per-attribute table, indexed by Attribute.
template <typename T>
using PerAttribute = std::array<T, kNumAttributes>;

/// Child seed derived from a parent seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

}  // namespace plab
