// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic biography corpus: profiles drawn from built-in value pools,
// documents rendered from templates with exact knowledge spans, and QA pairs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plab/common.hpp"

namespace plab {

struct Profile {
  int id = 0;
  std::string name;
  PerAttribute<std::string> values;

  const std::string& value(Attribute a) const { return values[index_of(a)]; }
  std::string& value(Attribute a) { return values[index_of(a)]; }

  bool operator==(const Profile&) const = default;
};

struct ProfileSet {
  std::vector<Profile> profiles;
  std::uint64_t seed = 0;

  std::size_t size() const { return profiles.size(); }
  const Profile& by_id(int id) const;
};

enum class TemplateKind { train, eval_paraphrase, question };

struct Template {
  std::string id;
  TemplateKind kind = TemplateKind::train;
  std::optional<Attribute> attribute;  // question templates only
  std::string pattern;
};

struct TemplateSet {
  std::string version;
  std::vector<Template> train;
  std::vector<Template> eval;
  PerAttribute<std::vector<Template>> questions;
};

/// Byte range [start, end) of one attribute value inside a rendered text.
struct Span {
  Attribute attr = Attribute::birth_date;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Span&) const = default;
};

struct Document {
  int profile_id = 0;
  std::string template_id;
  std::string text;
  std::vector<Span> spans;  // sorted by start, non-overlapping

  const Span& span(Attribute a) const;
};

enum class Split { it_train, eval };

struct QAPair {
  int profile_id = 0;
  Attribute attr = Attribute::birth_date;
  std::string question;
  std::string answer;
  Split split = Split::eval;

  bool operator==(const QAPair&) const = default;
};

struct Splits {
  std::vector<int> it_train;
  std::vector<int> eval;
};

/// Templates compiled into the library from data/templates_v1.json.
const TemplateSet& builtin_templates();
TemplateSet parse_templates(std::string_view json_text);
void validate_template(const Template& t);

// Value pools; exposed for tests and for vocabulary coverage checks.
std::span<const char* const> first_name_pool();
std::span<const char* const> last_name_pool();
std::span<const char* const> college_pool();
std::span<const char* const> major_pool();
std::span<const char* const> hometown_pool();
std::span<const char* const> company_pool();

ProfileSet generate_profiles(std::size_t n, std::uint64_t seed);

Document render_document(const Profile& profile, const Template& tmpl);
QAPair render_qa(const Profile& profile, Attribute attr, const Template& tmpl,
                 Split split = Split::eval);

Splits make_splits(const ProfileSet& profiles, std::uint64_t seed);

/// Everything `gen-data` produces.
struct Corpus {
  ProfileSet profiles;
  Splits splits;
  std::vector<Document> train_docs;  // 3 per profile, template order
  std::vector<Document> eval_docs;   // 5 per profile
  std::vector<QAPair> qa;            // it_train: 1 per attribute, eval: 5 per attribute

  std::vector<QAPair> qa_for(Split split) const;
  std::vector<Document> train_docs_for_template(std::size_t template_index) const;
  std::vector<Document> eval_docs_for(Split split) const;
  bool is_eval_profile(int id) const;
};

Corpus build_corpus(std::size_t n, std::uint64_t seed,
                    const TemplateSet& templates = builtin_templates());

// JSON-lines persistence (profiles.jsonl, docs.jsonl, qa.jsonl).
std::string to_json_line(const Profile& p);
std::string to_json_line(const Document& d);
std::string to_json_line(const QAPair& q);

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus read_corpus(const std::filesystem::path& dir);

std::vector<Document> read_documents(const std::filesystem::path& file);
void write_lines(const std::filesystem::path& file, const std::vector<std::string>& lines);

}  // namespace plab
