// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>

#include "plab/corpus.hpp"

namespace plab {
namespace {

Profile eden() {
  Profile p;
  p.id = 0;
  p.name = "Eden Benitez";
  p.value(Attribute::birth_date) = "March 3, 1957";
  p.value(Attribute::college) = "Rice University";
  p.value(Attribute::major) = "Geology";
  p.value(Attribute::hometown) = "Santa Clarita, California";
  p.value(Attribute::company) = "Intel";
  return p;
}

std::string serialize(const ProfileSet& set) {
  std::string out;
  for (const Profile& p : set.profiles) out += to_json_line(p) + "\n";
  return out;
}

void expect_spans_verbatim(const Document& d, const Profile& p) {
  ASSERT_EQ(d.spans.size(), kNumAttributes) << d.template_id;
  for (Attribute a : kAttributes) {
    const Span& s = d.span(a);
    EXPECT_EQ(d.text.substr(s.start, s.length()), p.value(a)) << d.template_id;
  }
}

TEST(Pools, MeetMinimumSizesAndAreAscii) {
  EXPECT_GE(first_name_pool().size(), 200u);
  EXPECT_GE(last_name_pool().size(), 200u);
  EXPECT_GE(college_pool().size(), 50u);
  EXPECT_GE(major_pool().size(), 30u);
  EXPECT_GE(hometown_pool().size(), 100u);
  EXPECT_GE(company_pool().size(), 50u);
  for (auto pool : {first_name_pool(), last_name_pool(), college_pool(), major_pool(), hometown_pool(),
                    company_pool()}) {
    std::set<std::string> seen;
    for (const char* v : pool) {
      std::string s(v);
      EXPECT_TRUE(seen.insert(s).second) << "duplicate " << s;
      EXPECT_TRUE(std::all_of(s.begin(), s.end(), [](char c) { return c > 0 && c < 127; })) << s;
    }
  }
  for (const char* h : hometown_pool()) {
    EXPECT_NE(std::string(h).find(", "), std::string::npos) << h;
  }
}

TEST(Templates, BuiltinCounts) {
  const TemplateSet& t = builtin_templates();
  EXPECT_EQ(t.train.size(), 3u);
  EXPECT_EQ(t.eval.size(), 5u);
  for (Attribute a : kAttributes) EXPECT_EQ(t.questions[index_of(a)].size(), 5u);
}

TEST(Templates, MissingPlaceholderRejected) {
  Template t{"bad", TemplateKind::train, std::nullopt, "{name} studied at {college}."};
  EXPECT_THROW(
      {
        try {
          validate_template(t);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), Errc::missing_placeholder);
          throw;
        }
      },
      Error);
}

TEST(GenerateProfiles, ThousandDistinctNames) {
  ProfileSet set = generate_profiles(1000, 42);
  ASSERT_EQ(set.size(), 1000u);
  std::set<std::string> names;
  for (const Profile& p : set.profiles) names.insert(p.name);
  EXPECT_EQ(names.size(), 1000u);
}

TEST(GenerateProfiles, EmptySet) { EXPECT_EQ(generate_profiles(0, 7).size(), 0u); }

TEST(GenerateProfiles, Deterministic) {
  EXPECT_EQ(serialize(generate_profiles(100, 5)), serialize(generate_profiles(100, 5)));
  EXPECT_NE(serialize(generate_profiles(100, 5)), serialize(generate_profiles(100, 6)));
}

TEST(GenerateProfiles, PoolExhaustion) {
  std::size_t capacity = first_name_pool().size() * last_name_pool().size();
  try {
    generate_profiles(capacity + 1, 1);
    FAIL() << "expected pool_exhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::pool_exhausted);
  }
}

TEST(GenerateProfiles, BirthDatesAreValidCalendarDates) {
  static const std::set<std::string> months = {"January", "February", "March",     "April",   "May",      "June",
                                               "July",    "August",   "September", "October", "November", "December"};
  for (const Profile& p : generate_profiles(500, 3).profiles) {
    const std::string& d = p.value(Attribute::birth_date);
    auto sp = d.find(' ');
    auto comma = d.find(", ");
    ASSERT_NE(sp, std::string::npos);
    ASSERT_NE(comma, std::string::npos);
    EXPECT_TRUE(months.count(d.substr(0, sp))) << d;
    int day = std::stoi(d.substr(sp + 1, comma - sp - 1));
    int year = std::stoi(d.substr(comma + 2));
    EXPECT_GE(day, 1);
    EXPECT_LE(day, 31);
    EXPECT_GE(year, 1900);
    EXPECT_LE(year, 1999);
    if (d.rfind("February", 0) == 0) {
      bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
      EXPECT_LE(day, leap ? 29 : 28) << d;
    }
  }
}

TEST(RenderDocument, SubstitutesWithSpan) {
  Profile p = eden();
  p.value(Attribute::hometown) = "Santa Clarita";
  Template t{"t", TemplateKind::train, std::nullopt,
             "{name} was raised in {hometown}. {birth_date} {college} {major} {company}"};
  Document d = render_document(p, t);
  EXPECT_EQ(d.text.substr(0, 41), "Eden Benitez was raised in Santa Clarita.");
  const Span& s = d.span(Attribute::hometown);
  EXPECT_EQ(s.start, 27u);
  EXPECT_EQ(s.end, 40u);
}

TEST(RenderDocument, OffsetsFollowSubstitution) {
  Profile p;
  p.name = "A B";
  for (Attribute a : kAttributes) p.value(a) = "x";
  p.value(Attribute::college) = "C";
  Template t{"t", TemplateKind::train, std::nullopt, "{name}: {college}|{birth_date}|{major}|{hometown}|{company}"};
  Document d = render_document(p, t);
  EXPECT_EQ(d.text, "A B: C|x|x|x|x");
  EXPECT_EQ(d.span(Attribute::college), (Span{Attribute::college, 5, 6}));
}

TEST(RenderDocument, SpansVerbatimOverRandomProfiles) {
  const TemplateSet& t = builtin_templates();
  for (const Profile& p : generate_profiles(200, 11).profiles) {
    for (const Template& tmpl : t.train) expect_spans_verbatim(render_document(p, tmpl), p);
    for (const Template& tmpl : t.eval) expect_spans_verbatim(render_document(p, tmpl), p);
  }
}

TEST(RenderDocument, SpansSortedAndDisjoint) {
  Profile p = eden();
  for (const Template& tmpl : builtin_templates().train) {
    Document d = render_document(p, tmpl);
    for (std::size_t i = 1; i < d.spans.size(); ++i) EXPECT_LE(d.spans[i - 1].end, d.spans[i].start);
  }
}

TEST(RenderQa, QuestionAndBareAnswer) {
  Profile p = eden();
  p.value(Attribute::hometown) = "Santa Clarita";
  Template t{"q", TemplateKind::question, Attribute::hometown, "Where did {name} grow up?"};
  QAPair qa = render_qa(p, Attribute::hometown, t);
  EXPECT_EQ(qa.question, "Where did Eden Benitez grow up?");
  EXPECT_EQ(qa.answer, "Santa Clarita");
}

TEST(RenderQa, AttributeMismatch) {
  Template t{"q", TemplateKind::question, Attribute::hometown, "Where did {name} grow up?"};
  try {
    render_qa(eden(), Attribute::college, t);
    FAIL() << "expected attribute_mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::attribute_mismatch);
  }
}

TEST(Splits, HalfAndHalfDisjointCovering) {
  ProfileSet set = generate_profiles(1000, 42);
  Splits s = make_splits(set, 42);
  EXPECT_EQ(s.it_train.size(), 500u);
  EXPECT_EQ(s.eval.size(), 500u);
  std::set<int> all(s.it_train.begin(), s.it_train.end());
  for (int id : s.eval) EXPECT_TRUE(all.insert(id).second) << "id in both splits: " << id;
  EXPECT_EQ(all.size(), 1000u);
  Splits again = make_splits(set, 42);
  EXPECT_EQ(again.it_train, s.it_train);
  EXPECT_EQ(again.eval, s.eval);
}

TEST(Splits, OddCountRejected) {
  try {
    make_splits(generate_profiles(7, 1), 1);
    FAIL() << "expected odd_count";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::odd_count);
  }
}

TEST(BuildCorpus, Counts) {
  Corpus c = build_corpus(1000, 42);
  EXPECT_EQ(c.train_docs.size(), 3000u);
  EXPECT_EQ(c.eval_docs.size(), 5000u);
  // Counting oracle: it_train gets the first template of each attribute,
  // eval gets all five.
  std::size_t it = 0, ev = 0;
  for (const QAPair& q : c.qa) (q.split == Split::it_train ? it : ev)++;
  EXPECT_EQ(it, 500u * kNumAttributes);
  EXPECT_EQ(ev, 500u * kNumAttributes * 5);
  EXPECT_EQ(ev, 12500u);
  for (const QAPair& q : c.qa) {
    EXPECT_EQ(q.answer, c.profiles.by_id(q.profile_id).value(q.attr));
    EXPECT_EQ(c.is_eval_profile(q.profile_id), q.split == Split::eval);
  }
}

TEST(BuildCorpus, ItTrainUsesFirstQuestionTemplate) {
  Corpus c = build_corpus(20, 9);
  const TemplateSet& t = builtin_templates();
  for (const QAPair& q : c.qa_for(Split::it_train)) {
    const Profile& p = c.profiles.by_id(q.profile_id);
    EXPECT_EQ(q.question, render_qa(p, q.attr, t.questions[index_of(q.attr)][0]).question);
  }
}

TEST(BuildCorpus, WriteReadRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "plab_corpus_test";
  std::filesystem::remove_all(dir);
  Corpus c = build_corpus(40, 3);
  write_corpus(c, dir);
  Corpus r = read_corpus(dir);
  ASSERT_EQ(r.profiles.size(), c.profiles.size());
  for (std::size_t i = 0; i < c.profiles.size(); ++i) EXPECT_EQ(r.profiles.profiles[i], c.profiles.profiles[i]);
  ASSERT_EQ(r.train_docs.size(), c.train_docs.size());
  for (std::size_t i = 0; i < c.train_docs.size(); ++i) {
    EXPECT_EQ(r.train_docs[i].text, c.train_docs[i].text);
    EXPECT_EQ(r.train_docs[i].spans, c.train_docs[i].spans);
  }
  EXPECT_EQ(r.qa, c.qa);
  EXPECT_EQ(r.splits.eval, c.splits.eval);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace plab
