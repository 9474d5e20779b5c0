// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/common.hpp"

#include <random>
#include <vector>

namespace plab {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::pool_exhausted: return "pool exhausted";
    case Errc::missing_placeholder: return "missing placeholder";
    case Errc::attribute_mismatch: return "attribute mismatch";
    case Errc::odd_count: return "odd count";
    case Errc::empty_corpus: return "empty corpus";
    case Errc::unknown_id: return "unknown id";
    case Errc::misaligned_span: return "misaligned span";
    case Errc::length_overflow: return "length overflow";
    case Errc::all_masked: return "all masked";
    case Errc::cache_mismatch: return "cache mismatch";
    case Errc::non_finite: return "non-finite value";
    case Errc::zero_gradient: return "zero gradient";
    case Errc::insufficient_points: return "insufficient points";
    case Errc::degenerate_variance: return "degenerate variance";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::config: return "config error";
    case Errc::io: return "io error";
  }
  return "error";
}

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::birth_date: return "birth_date";
    case Attribute::college: return "college";
    case Attribute::major: return "major";
    case Attribute::hometown: return "hometown";
    case Attribute::company: return "company";
  }
  return "?";
}

Attribute parse_attribute(std::string_view name) {
  for (Attribute a : kAttributes) {
    if (attribute_name(a) == name) return a;
  }
  throw Error(Errc::invalid_argument, "unknown attribute '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint64_t p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace plab
