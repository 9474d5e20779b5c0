// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "plab/augment.hpp"
#include "plab/corpus.hpp"

namespace plab {
namespace {

Document eden_doc() {
  Document d;
  d.profile_id = 0;
  d.template_id = "ex";
  d.text = "Eden Benitez was raised in Santa Clarita.";
  d.spans = {{Attribute::hometown, 27, 40}};
  return d;
}

std::size_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  std::size_t n = 0;
  while (in >> w) ++n;
  return n;
}

void expect_knowledge_preserved(const Document& base, const AugmentedDocument& a) {
  ASSERT_EQ(a.spans.size(), base.spans.size());
  for (std::size_t i = 0; i < base.spans.size(); ++i) {
    EXPECT_EQ(a.spans[i].attr, base.spans[i].attr);
    EXPECT_EQ(span_value(a.text, a.spans[i]), base.text.substr(base.spans[i].start, base.spans[i].length()))
        << a.text;
  }
  EXPECT_EQ(strip_formatting(a.text), strip_formatting(base.text));
}

TEST(Wrap, AsteriskExample) {
  AugmentedDocument a = wrap(eden_doc(), WrapStyle::asterisk);
  EXPECT_EQ(a.text, "*Eden Benitez was raised in Santa Clarita.*");
  EXPECT_EQ(a.spans[0].start, 28u);
  EXPECT_EQ(a.text.substr(1, a.text.size() - 2), eden_doc().text);
}

TEST(Wrap, AllStylesShiftByOpenMark) {
  Document d{0, "x", "X", {{Attribute::college, 0, 1}}};
  AugmentedDocument q = wrap(d, WrapStyle::double_quote);
  EXPECT_EQ(q.text, "\"X\"");
  EXPECT_EQ(q.spans[0], (Span{Attribute::college, 1, 2}));
  EXPECT_EQ(wrap(d, WrapStyle::single_quote).text, "'X'");
  EXPECT_EQ(wrap(d, WrapStyle::square_bracket).text, "[X]");
  EXPECT_EQ(wrap(d, WrapStyle::paren).text, "(X)");
}

TEST(LeftPad, Examples) {
  AugmentedDocument p = left_pad(eden_doc(), PadStyle::pound, 1);
  EXPECT_EQ(p.text, "# Eden Benitez was raised in Santa Clarita.");
  EXPECT_EQ(p.spans[0].start, 29u);
  AugmentedDocument s = left_pad(eden_doc(), PadStyle::spaces, 4);
  EXPECT_EQ(s.text.substr(0, 5), "    E");
  EXPECT_EQ(s.spans[0].start, 31u);
  EXPECT_EQ(s.text.substr(4), eden_doc().text);
  EXPECT_EQ(left_pad(eden_doc(), PadStyle::tab, 2).text.substr(0, 3), "\t\tE");
  EXPECT_EQ(left_pad(eden_doc(), PadStyle::pound, 3).text.substr(0, 7), "# # # E");
  EXPECT_THROW(left_pad(eden_doc(), PadStyle::spaces, 0), Error);
}

TEST(InsertSpaces, ExampleIsReachable) {
  // The original has six gaps; doubling gaps 1, 4 and 6 gives the target.
  // Search seeds at p = 0.5 for one that draws exactly that pattern.
  const std::string target = "Eden  Benitez was raised  in Santa  Clarita.";
  std::optional<std::uint64_t> found;
  for (std::uint64_t seed = 0; seed < 2000 && !found; ++seed) {
    if (insert_spaces(eden_doc(), 0.5, seed).text == target) found = seed;
  }
  ASSERT_TRUE(found.has_value());
  AugmentedDocument a = insert_spaces(eden_doc(), 0.5, *found);
  EXPECT_EQ(a.text, target);
  EXPECT_EQ(a.text.substr(a.spans[0].start, a.spans[0].length()), "Santa  Clarita");
  EXPECT_EQ(span_value(a.text, a.spans[0]), "Santa Clarita");
}

TEST(InsertSpaces, ZeroProbabilityIsIdentity) {
  AugmentedDocument a = insert_spaces(eden_doc(), 0.0, 99);
  EXPECT_EQ(a.text, eden_doc().text);
  EXPECT_EQ(a.spans, eden_doc().spans);
}

TEST(InsertSpaces, OnlySpacesChange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    AugmentedDocument a = insert_spaces(eden_doc(), 0.4, seed);
    EXPECT_EQ(strip_formatting(a.text), eden_doc().text);
    EXPECT_GE(a.text.size(), eden_doc().text.size());
    EXPECT_LE(a.text.size(), eden_doc().text.size() + 6);
  }
  EXPECT_THROW(insert_spaces(eden_doc(), 1.5, 1), Error);
}

TEST(AugmentSet, ZeroIsIdentity) {
  auto v = augment_set(eden_doc(), 0, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].spec.kind, AugmentKind::identity);
  EXPECT_EQ(v[0].text, eden_doc().text);
}

TEST(AugmentSet, DistinctDeterministicAndPreserving) {
  Corpus c = build_corpus(20, 4);
  for (const Document& d : c.train_docs) {
    auto v = augment_set(d, 3, static_cast<std::uint64_t>(d.profile_id) + 100);
    ASSERT_EQ(v.size(), 4u);
    std::set<std::string> texts;
    for (const auto& a : v) {
      texts.insert(a.text);
      expect_knowledge_preserved(d, a);
    }
    EXPECT_EQ(texts.size(), 4u);
    auto again = augment_set(d, 3, static_cast<std::uint64_t>(d.profile_id) + 100);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(again[i].text, v[i].text);
  }
}

TEST(AugmentSet, PairsDoNotRepeatBeforePoolIsUsed) {
  auto v = augment_set(eden_doc(), 9, 3);
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const AugmentSpec& s = v[i].spec;
    int style = s.kind == AugmentKind::wrap       ? static_cast<int>(s.wrap_style)
                : s.kind == AugmentKind::left_pad ? static_cast<int>(s.pad_style)
                                                  : 0;
    EXPECT_TRUE(pairs.insert({static_cast<int>(s.kind), style}).second);
  }
  EXPECT_EQ(pairs.size(), 9u);
}

TEST(EdaLite, ZeroRateIsIdentity) {
  AugmentedDocument a = eda_lite(eden_doc(), {}, 0.0, 5);
  EXPECT_EQ(a.text, eden_doc().text);
}

TEST(EdaLite, SwapTwoWords) {
  Document d{0, "x", "A B", {}};
  AugmentedDocument a = eda_lite(d, EdaOps{false, false, true}, 0.5, 1);
  EXPECT_EQ(a.text, "B A");
  EXPECT_TRUE(a.spans.empty());
}

TEST(EdaLite, InsertCountsAndDropsSpans) {
  for (double rate : {0.1, 0.25, 0.5}) {
    AugmentedDocument a = eda_lite(eden_doc(), EdaOps{true, false, false}, rate, 7);
    std::size_t n = word_count(eden_doc().text);
    auto edits = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
    EXPECT_EQ(word_count(a.text), n + edits);
    EXPECT_TRUE(a.spans.empty());
  }
  AugmentedDocument del = eda_lite(eden_doc(), EdaOps{false, true, false}, 0.25, 7);
  EXPECT_EQ(word_count(del.text), word_count(eden_doc().text) - 2);
}

TEST(AugmentQuestion, AnswerUntouched) {
  QAPair qa{0, Attribute::hometown, "Where did Eden Benitez grow up?", "Santa Clarita", Split::it_train};
  AugmentSpec w;
  w.kind = AugmentKind::wrap;
  w.wrap_style = WrapStyle::double_quote;
  QAPair out = augment_question(qa, w);
  EXPECT_EQ(out.question, "\"Where did Eden Benitez grow up?\"");
  EXPECT_EQ(out.answer, qa.answer);
  EXPECT_EQ(augment_question(qa, AugmentSpec{}), qa);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    QAPair r = augment_question(qa, sample_format_spec(seed));
    EXPECT_EQ(r.answer, qa.answer);
    EXPECT_EQ(strip_formatting(r.question), qa.question);
  }
  AugmentSpec eda;
  eda.kind = AugmentKind::eda_lite;
  EXPECT_THROW(augment_question(qa, eda), Error);
}

TEST(Apply, DeterministicInSpec) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AugmentSpec s = sample_format_spec(seed, 0.5);
    EXPECT_EQ(apply(eden_doc(), s).text, apply(eden_doc(), s).text);
    expect_knowledge_preserved(eden_doc(), apply(eden_doc(), s));
  }
}

}  // namespace
}  // namespace plab
