// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "plab/embedded_data.hpp"

namespace plab {

using nlohmann::json;

namespace {

constexpr const char* kMonths[] = {"January", "February", "March",     "April",
                                   "May",     "June",     "July",      "August",
                                   "September", "October", "November", "December"};

int days_in_month(int month, int year) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 1 && leap ? 29 : kDays[month];
}

template <typename Rng>
std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// A pattern piece is either literal text or a placeholder.
struct Piece {
  std::string_view literal;
  bool is_name = false;
  std::optional<Attribute> attr;
};

std::vector<Piece> split_pattern(std::string_view pattern) {
  std::vector<Piece> pieces;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    std::size_t open = pattern.find('{', pos);
    if (open == std::string_view::npos) {
      pieces.push_back({pattern.substr(pos), false, std::nullopt});
      break;
    }
    if (open > pos) pieces.push_back({pattern.substr(pos, open - pos), false, std::nullopt});
    std::size_t close = pattern.find('}', open);
    if (close == std::string_view::npos) {
      throw Error(Errc::missing_placeholder, "unterminated placeholder in '" + std::string(pattern) + "'");
    }
    std::string_view key = pattern.substr(open + 1, close - open - 1);
    Piece p;
    if (key == "name") {
      p.is_name = true;
    } else {
      try {
        p.attr = parse_attribute(key);
      } catch (const Error&) {
        throw Error(Errc::missing_placeholder, "unknown placeholder {" + std::string(key) + "}");
      }
    }
    pieces.push_back(p);
    pos = close + 1;
  }
  return pieces;
}

TemplateKind parse_kind(std::string_view s) {
  if (s == "train") return TemplateKind::train;
  if (s == "eval") return TemplateKind::eval_paraphrase;
  return TemplateKind::question;
}

json span_json(const Span& s) {
  return {{"attr", attribute_name(s.attr)}, {"start", s.start}, {"end", s.end}};
}

std::vector<json> read_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::io, "cannot open " + file.string());
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(json::parse(line));
  }
  return rows;
}

}  // namespace

const Profile& ProfileSet::by_id(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < profiles.size() && profiles[id].id == id) {
    return profiles[id];
  }
  for (const Profile& p : profiles) {
    if (p.id == id) return p;
  }
  throw Error(Errc::invalid_argument, "no profile with id " + std::to_string(id));
}

const Span& Document::span(Attribute a) const {
  for (const Span& s : spans) {
    if (s.attr == a) return s;
  }
  throw Error(Errc::invalid_argument, "document has no span for " + std::string(attribute_name(a)));
}

void validate_template(const Template& t) {
  auto pieces = split_pattern(t.pattern);
  int names = 0;
  PerAttribute<int> counts{};
  for (const Piece& p : pieces) {
    if (p.is_name) ++names;
    if (p.attr) ++counts[index_of(*p.attr)];
  }
  if (names != 1) {
    throw Error(Errc::missing_placeholder, t.id + ": {name} must appear exactly once");
  }
  if (t.kind == TemplateKind::question) {
    if (!t.attribute) throw Error(Errc::missing_placeholder, t.id + ": question without attribute tag");
    for (int c : counts) {
      if (c != 0) throw Error(Errc::missing_placeholder, t.id + ": question must not embed values");
    }
    return;
  }
  for (Attribute a : kAttributes) {
    if (counts[index_of(a)] != 1) {
      throw Error(Errc::missing_placeholder,
                  t.id + ": {" + std::string(attribute_name(a)) + "} must appear exactly once");
    }
  }
}

TemplateSet parse_templates(std::string_view json_text) {
  json j = json::parse(json_text);
  TemplateSet set;
  set.version = j.at("version").get<std::string>();
  for (const char* group : {"train", "eval"}) {
    for (const json& t : j.at(group)) {
      Template tmpl{t.at("id").get<std::string>(), parse_kind(group), std::nullopt,
                    t.at("pattern").get<std::string>()};
      validate_template(tmpl);
      (tmpl.kind == TemplateKind::train ? set.train : set.eval).push_back(std::move(tmpl));
    }
  }
  for (Attribute a : kAttributes) {
    const json& list = j.at("questions").at(std::string(attribute_name(a)));
    for (std::size_t i = 0; i < list.size(); ++i) {
      Template tmpl{"q_" + std::string(attribute_name(a)) + "_" + std::to_string(i),
                    TemplateKind::question, a, list[i].get<std::string>()};
      validate_template(tmpl);
      set.questions[index_of(a)].push_back(std::move(tmpl));
    }
  }
  return set;
}

const TemplateSet& builtin_templates() {
  static const TemplateSet set = parse_templates(embedded::kTemplatesV1);
  return set;
}

ProfileSet generate_profiles(std::size_t n, std::uint64_t seed) {
  auto firsts = first_name_pool();
  auto lasts = last_name_pool();
  const std::size_t capacity = firsts.size() * lasts.size();
  if (n > capacity) {
    throw Error(Errc::pool_exhausted, "requested " + std::to_string(n) + " profiles but only " +
                                          std::to_string(capacity) + " distinct names exist");
  }
  std::mt19937_64 rng(seed);
  std::unordered_set<std::size_t> used;
  ProfileSet set;
  set.seed = seed;
  set.profiles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t name_index;
    do {
      name_index = pick(rng, capacity);
    } while (!used.insert(name_index).second);
    Profile p;
    p.id = static_cast<int>(i);
    p.name = std::string(firsts[name_index / lasts.size()]) + " " + lasts[name_index % lasts.size()];

    int year = 1900 + static_cast<int>(pick(rng, 100));
    int month = static_cast<int>(pick(rng, 12));
    int day = 1 + static_cast<int>(pick(rng, days_in_month(month, year)));
    p.value(Attribute::birth_date) =
        std::string(kMonths[month]) + " " + std::to_string(day) + ", " + std::to_string(year);
    p.value(Attribute::college) = college_pool()[pick(rng, college_pool().size())];
    p.value(Attribute::major) = major_pool()[pick(rng, major_pool().size())];
    p.value(Attribute::hometown) = hometown_pool()[pick(rng, hometown_pool().size())];
    p.value(Attribute::company) = company_pool()[pick(rng, company_pool().size())];
    set.profiles.push_back(std::move(p));
  }
  return set;
}

Document render_document(const Profile& profile, const Template& tmpl) {
  if (tmpl.kind == TemplateKind::question) {
    throw Error(Errc::invalid_argument, tmpl.id + " is a question template");
  }
  validate_template(tmpl);
  Document doc;
  doc.profile_id = profile.id;
  doc.template_id = tmpl.id;
  for (const Piece& p : split_pattern(tmpl.pattern)) {
    if (p.is_name) {
      doc.text += profile.name;
    } else if (p.attr) {
      const std::string& v = profile.value(*p.attr);
      doc.spans.push_back({*p.attr, doc.text.size(), doc.text.size() + v.size()});
      doc.text += v;
    } else {
      doc.text += p.literal;
    }
  }
  return doc;
}

QAPair render_qa(const Profile& profile, Attribute attr, const Template& tmpl, Split split) {
  if (tmpl.kind != TemplateKind::question || tmpl.attribute != attr) {
    throw Error(Errc::attribute_mismatch,
                tmpl.id + " does not ask for " + std::string(attribute_name(attr)));
  }
  validate_template(tmpl);
  QAPair qa;
  qa.profile_id = profile.id;
  qa.attr = attr;
  qa.split = split;
  qa.answer = profile.value(attr);
  for (const Piece& p : split_pattern(tmpl.pattern)) {
    qa.question += p.is_name ? std::string_view(profile.name) : p.literal;
  }
  return qa;
}

Splits make_splits(const ProfileSet& profiles, std::uint64_t seed) {
  if (profiles.size() % 2 != 0) {
    throw Error(Errc::odd_count, "cannot split " + std::to_string(profiles.size()) + " profiles in half");
  }
  std::vector<int> ids;
  ids.reserve(profiles.size());
  for (const Profile& p : profiles.profiles) ids.push_back(p.id);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::shuffle(ids.begin(), ids.end(), rng);
  Splits s;
  auto half = ids.begin() + static_cast<std::ptrdiff_t>(ids.size() / 2);
  s.it_train.assign(ids.begin(), half);
  s.eval.assign(half, ids.end());
  std::sort(s.it_train.begin(), s.it_train.end());
  std::sort(s.eval.begin(), s.eval.end());
  return s;
}

std::vector<QAPair> Corpus::qa_for(Split split) const {
  std::vector<QAPair> out;
  for (const QAPair& q : qa) {
    if (q.split == split) out.push_back(q);
  }
  return out;
}

std::vector<Document> Corpus::train_docs_for_template(std::size_t template_index) const {
  const std::string id = "train_" + std::to_string(template_index);
  std::vector<Document> out;
  for (const Document& d : train_docs) {
    if (d.template_id == id) out.push_back(d);
  }
  return out;
}

bool Corpus::is_eval_profile(int id) const {
  return std::binary_search(splits.eval.begin(), splits.eval.end(), id);
}

std::vector<Document> Corpus::eval_docs_for(Split split) const {
  std::vector<Document> out;
  for (const Document& d : eval_docs) {
    if (is_eval_profile(d.profile_id) == (split == Split::eval)) out.push_back(d);
  }
  return out;
}

Corpus build_corpus(std::size_t n, std::uint64_t seed, const TemplateSet& templates) {
  Corpus c;
  c.profiles = generate_profiles(n, seed);
  c.splits = make_splits(c.profiles, seed);
  for (const Profile& p : c.profiles.profiles) {
    for (const Template& t : templates.train) c.train_docs.push_back(render_document(p, t));
    for (const Template& t : templates.eval) c.eval_docs.push_back(render_document(p, t));
  }
  for (int id : c.splits.it_train) {
    for (Attribute a : kAttributes) {
      c.qa.push_back(render_qa(c.profiles.by_id(id), a, templates.questions[index_of(a)].front(),
                               Split::it_train));
    }
  }
  for (int id : c.splits.eval) {
    for (Attribute a : kAttributes) {
      for (const Template& t : templates.questions[index_of(a)]) {
        c.qa.push_back(render_qa(c.profiles.by_id(id), a, t, Split::eval));
      }
    }
  }
  return c;
}

std::string to_json_line(const Profile& p) {
  json j = {{"id", p.id}, {"name", p.name}};
  for (Attribute a : kAttributes) j[std::string(attribute_name(a))] = p.value(a);
  return j.dump();
}

std::string to_json_line(const Document& d) {
  json spans = json::array();
  for (const Span& s : d.spans) spans.push_back(span_json(s));
  return json{{"profile_id", d.profile_id}, {"template_id", d.template_id}, {"text", d.text}, {"spans", spans}}
      .dump();
}

std::string to_json_line(const QAPair& q) {
  return json{{"profile_id", q.profile_id},
              {"attr", attribute_name(q.attr)},
              {"question", q.question},
              {"answer", q.answer},
              {"split", q.split == Split::it_train ? "it_train" : "eval"}}
      .dump();
}

void write_lines(const std::filesystem::path& file, const std::vector<std::string>& lines) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + file.string());
  for (const std::string& l : lines) out << l << '\n';
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> lines;
  for (const Profile& p : corpus.profiles.profiles) lines.push_back(to_json_line(p));
  write_lines(dir / "profiles.jsonl", lines);
  lines.clear();
  for (const Document& d : corpus.train_docs) lines.push_back(to_json_line(d));
  for (const Document& d : corpus.eval_docs) lines.push_back(to_json_line(d));
  write_lines(dir / "docs.jsonl", lines);
  lines.clear();
  for (const QAPair& q : corpus.qa) lines.push_back(to_json_line(q));
  write_lines(dir / "qa.jsonl", lines);
  json meta = {{"seed", corpus.profiles.seed}, {"n", corpus.profiles.size()},
               {"templates", builtin_templates().version}};
  std::ofstream(dir / "corpus.json") << meta.dump(2) << '\n';
}

std::vector<Document> read_documents(const std::filesystem::path& file) {
  std::vector<Document> docs;
  for (const json& j : read_jsonl(file)) {
    Document d;
    d.profile_id = j.at("profile_id").get<int>();
    d.template_id = j.at("template_id").get<std::string>();
    d.text = j.at("text").get<std::string>();
    for (const json& s : j.at("spans")) {
      d.spans.push_back({parse_attribute(s.at("attr").get<std::string>()), s.at("start").get<std::size_t>(),
                         s.at("end").get<std::size_t>()});
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

Corpus read_corpus(const std::filesystem::path& dir) {
  Corpus c;
  for (const json& j : read_jsonl(dir / "profiles.jsonl")) {
    Profile p;
    p.id = j.at("id").get<int>();
    p.name = j.at("name").get<std::string>();
    for (Attribute a : kAttributes) p.value(a) = j.at(std::string(attribute_name(a))).get<std::string>();
    c.profiles.profiles.push_back(std::move(p));
  }
  std::ifstream meta_in(dir / "corpus.json");
  if (meta_in) c.profiles.seed = json::parse(meta_in).value("seed", std::uint64_t{0});

  for (Document& d : read_documents(dir / "docs.jsonl")) {
    (d.template_id.starts_with("train_") ? c.train_docs : c.eval_docs).push_back(std::move(d));
  }
  for (const json& j : read_jsonl(dir / "qa.jsonl")) {
    QAPair q;
    q.profile_id = j.at("profile_id").get<int>();
    q.attr = parse_attribute(j.at("attr").get<std::string>());
    q.question = j.at("question").get<std::string>();
    q.answer = j.at("answer").get<std::string>();
    q.split = j.at("split").get<std::string>() == "it_train" ? Split::it_train : Split::eval;
    c.qa.push_back(std::move(q));
  }
  std::unordered_set<int> it_ids;
  for (const QAPair& q : c.qa) {
    if (q.split == Split::it_train) it_ids.insert(q.profile_id);
  }
  for (const Profile& p : c.profiles.profiles) {
    (it_ids.count(p.id) ? c.splits.it_train : c.splits.eval).push_back(p.id);
  }
  return c;
}

}  // namespace plab
