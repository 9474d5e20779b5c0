// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Formatting-based document augmentation. Every transform tracks knowledge
// spans by exact offsets; none of them touches the words of the document.
// eda_lite is the word-level baseline and deliberately drops spans.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plab/corpus.hpp"

namespace plab {

enum class AugmentKind { identity, wrap, left_pad, space_insert, eda_lite };
enum class WrapStyle { double_quote, single_quote, asterisk, square_bracket, paren };
enum class PadStyle { spaces, tab, pound };

struct EdaOps {
  bool insert = true;
  bool remove = true;
  bool swap = true;
  bool operator==(const EdaOps&) const = default;
};

struct AugmentSpec {
  AugmentKind kind = AugmentKind::identity;
  WrapStyle wrap_style = WrapStyle::double_quote;
  PadStyle pad_style = PadStyle::spaces;
  int pad_width = 1;
  double space_prob = 0.3;
  EdaOps eda_ops;
  double eda_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const AugmentSpec&) const = default;
};

struct AugmentedDocument {
  int profile_id = 0;
  std::string base_template_id;
  AugmentSpec spec;
  std::string text;
  std::vector<Span> spans;  // empty for eda_lite

  Document as_document() const;
};

inline constexpr double kDefaultSpaceProb = 0.3;
inline constexpr int kDefaultAugmentCount = 3;

std::string_view kind_name(AugmentKind k);
std::string_view wrap_style_name(WrapStyle s);
std::string_view pad_style_name(PadStyle s);
AugmentKind parse_augment_kind(std::string_view s);  // accepts CLI aliases pad/space/eda

std::string spec_to_json(const AugmentSpec& spec);

/// docs.jsonl record plus base_template_id and spec.
std::string to_json_line(const AugmentedDocument& d);

AugmentedDocument identity(const Document& doc);
AugmentedDocument wrap(const Document& doc, WrapStyle style);
AugmentedDocument left_pad(const Document& doc, PadStyle style, int width);
AugmentedDocument insert_spaces(const Document& doc, double p, std::uint64_t seed);
AugmentedDocument eda_lite(const Document& doc, EdaOps ops, double rate, std::uint64_t seed);
AugmentedDocument apply(const Document& doc, const AugmentSpec& spec);

/// Identity followed by k formatting variants. (kind, style) pairs are drawn
/// without replacement until the pool of 9 pairs is used up, then refilled.
/// `only` restricts the draw to one kind; identity means "all formatting kinds".
std::vector<AugmentedDocument> augment_set(const Document& doc, int k, std::uint64_t seed,
                                           double space_prob = kDefaultSpaceProb,
                                           AugmentKind only = AugmentKind::identity);

/// Transforms the question of a QA pair; the answer is never touched.
QAPair augment_question(const QAPair& qa, const AugmentSpec& spec);

/// Draws one formatting spec (wrap/left_pad/space_insert) from `seed`.
AugmentSpec sample_format_spec(std::uint64_t seed, double space_prob = kDefaultSpaceProb);

/// Removes wrap marks and left padding and collapses space runs; maps every
/// formatting augmentation of a canonical text back to that text.
std::string strip_formatting(std::string_view text);

/// Span slice with space runs collapsed, i.e. the value before space insertion.
std::string span_value(std::string_view text, const Span& span);

}  // namespace plab
