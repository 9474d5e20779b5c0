// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-vocabulary word-and-symbol tokenizer.
//
// Rules:
//   * alphanumeric runs are word tokens;
//   * each of  " ' * # [ ] ( ) , . : ? !  and the newline is its own token;
//   * the whitespace expected between two tokens under canonical spacing is
//     implicit; every further space emits <sp>, every tab emits <tab>.
// Canonical spacing is one space between tokens, except none before a
// closing mark (, . : ? ! ) ] and a closing quote/asterisk), none after an
// opening mark (( [ and an opening quote/asterisk), and none around a
// newline, <sp> or <tab>. Quotes and asterisks alternate between opening and
// closing within one text. Under these rules decode(encode(t)) == t for every
// text the corpus and the formatting augmentations produce.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "plab/common.hpp"

namespace plab {

using TokenId = int;

namespace special {
inline constexpr TokenId kBos = 0;
inline constexpr TokenId kEos = 1;
inline constexpr TokenId kPad = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr TokenId kSp = 4;
inline constexpr TokenId kTab = 5;
inline constexpr TokenId kCount = 6;
}  // namespace special

class Vocab {
 public:
  Vocab() = default;
  /// `tokens` are the non-special surface forms, ids start after the specials.
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return id_to_token_.size(); }
  TokenId id(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  TokenId newline() const { return newline_; }

  std::span<const std::string> tokens() const;  // non-special, in id order

  std::string to_json() const;
  static Vocab from_json(std::string_view text);
  void save(const std::filesystem::path& file) const;
  static Vocab load(const std::filesystem::path& file);

  bool operator==(const Vocab& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  TokenId newline_ = special::kUnk;
};

struct Offset {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Offset&) const = default;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<Offset> offsets;

  std::size_t size() const { return ids.size(); }
};

/// Surface tokens of `text` under the rules above, whitespace tokens included
/// as "<sp>" / "<tab>".
std::vector<std::string> surface_tokens(std::string_view text);

Vocab build_vocab(std::span<const std::string> texts);

TokenSequence encode(std::string_view text, const Vocab& vocab);
std::string decode(std::span<const TokenId> ids, const Vocab& vocab);

/// Smallest token range [first, last) whose offsets cover [start, end).
/// Throws misaligned_span when a span boundary falls inside a token.
std::pair<std::size_t, std::size_t> map_span(std::size_t start, std::size_t end,
                                             const TokenSequence& seq);

}  // namespace plab
