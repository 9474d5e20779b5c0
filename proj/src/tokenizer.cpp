// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace plab {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, special::kCount> kSpecialNames = {
    "<bos>", "<eos>", "<pad>", "<unk>", "<sp>", "<tab>"};

constexpr std::string_view kSymbols = "\"'*#[](),.:?!";
constexpr std::string_view kClosers = ",.:?!)]";
constexpr std::string_view kOpeners = "([";
constexpr std::string_view kToggles = "\"'*";

bool is_symbol(char c) { return kSymbols.find(c) != std::string_view::npos; }
bool is_space_like(char c) { return c == ' ' || c == '\t'; }

enum class Kind { word, symbol, newline };

// Tracks alternation of quote/asterisk marks along a token stream.
struct ToggleState {
  std::array<int, 3> seen{};

  // Returns +1 for an opening mark, -1 for a closing mark, 0 otherwise.
  int classify(char c) {
    auto i = kToggles.find(c);
    if (i == std::string_view::npos) return 0;
    return (seen[i]++ % 2 == 0) ? 1 : -1;
  }
};

struct Visible {
  Kind kind = Kind::word;
  bool opening = false;
  bool closing = false;
};

Visible describe(std::string_view surface, ToggleState& toggles) {
  Visible v;
  if (surface == "\n") {
    v.kind = Kind::newline;
  } else if (surface.size() == 1 && is_symbol(surface[0])) {
    v.kind = Kind::symbol;
    int t = toggles.classify(surface[0]);
    v.opening = t > 0 || kOpeners.find(surface[0]) != std::string_view::npos;
    v.closing = t < 0 || kClosers.find(surface[0]) != std::string_view::npos;
  }
  return v;
}

// Number of spaces canonical spacing puts between two visible tokens.
int canonical_gap(const Visible* prev, const Visible& next) {
  if (prev == nullptr) return 0;
  if (prev->kind == Kind::newline || next.kind == Kind::newline) return 0;
  if (next.closing || prev->opening) return 0;
  return 1;
}

struct Lexeme {
  std::string_view text;
  std::size_t start = 0;
};

// Splits text into visible lexemes and the whitespace runs before each one.
// runs[i] precedes lexemes[i]; runs.back() trails the last lexeme.
void lex(std::string_view text, std::vector<Lexeme>& lexemes, std::vector<Lexeme>& runs) {
  std::size_t i = 0;
  std::size_t run_start = 0;
  auto flush_run = [&](std::size_t end) { runs.push_back({text.substr(run_start, end - run_start), run_start}); };
  while (i < text.size()) {
    char c = text[i];
    if (is_space_like(c)) {
      ++i;
      continue;
    }
    flush_run(i);
    std::size_t start = i;
    if (c == '\n' || is_symbol(c)) {
      ++i;
    } else {
      while (i < text.size() && !is_space_like(text[i]) && text[i] != '\n' && !is_symbol(text[i])) ++i;
    }
    lexemes.push_back({text.substr(start, i - start), start});
    run_start = i;
  }
  flush_run(text.size());
}

// Appends whitespace tokens for a run given the canonical gap.
template <typename Emit>
void emit_run(const Lexeme& run, int gap, Emit&& emit) {
  bool literal = run.text.find('\t') != std::string_view::npos;
  std::size_t skip = literal ? 0 : std::min<std::size_t>(gap, run.text.size());
  for (std::size_t k = skip; k < run.text.size(); ++k) {
    emit(run.text[k] == '\t' ? special::kTab : special::kSp, Offset{run.start + k, run.start + k + 1});
  }
}

}  // namespace

Vocab::Vocab(std::vector<std::string> tokens) {
  id_to_token_.reserve(special::kCount + tokens.size());
  for (std::string_view s : kSpecialNames) id_to_token_.emplace_back(s);
  for (std::string& t : tokens) id_to_token_.push_back(std::move(t));
  for (std::size_t i = special::kCount; i < id_to_token_.size(); ++i) {
    auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
    if (!inserted) throw Error(Errc::invalid_argument, "duplicate token '" + id_to_token_[i] + "'");
  }
  newline_ = id("\n");
}

TokenId Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? special::kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return token_to_id_.count(std::string(token)) > 0; }

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw Error(Errc::unknown_id, "token id " + std::to_string(id) + " outside vocabulary of " +
                                      std::to_string(id_to_token_.size()));
  }
  return id_to_token_[id];
}

std::span<const std::string> Vocab::tokens() const {
  return std::span<const std::string>(id_to_token_).subspan(special::kCount);
}

std::string Vocab::to_json() const {
  json j;
  j["specials"] = std::vector<std::string>(kSpecialNames.begin(), kSpecialNames.end());
  j["tokens"] = std::vector<std::string>(tokens().begin(), tokens().end());
  return j.dump();
}

Vocab Vocab::from_json(std::string_view text) {
  json j = json::parse(text);
  auto specials = j.at("specials").get<std::vector<std::string>>();
  if (specials.size() != special::kCount ||
      !std::equal(specials.begin(), specials.end(), kSpecialNames.begin())) {
    throw Error(Errc::config, "vocab.json specials do not match this tokenizer");
  }
  return Vocab(j.at("tokens").get<std::vector<std::string>>());
}

void Vocab::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + file.string());
  out << to_json() << '\n';
}

Vocab Vocab::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<std::string> surface_tokens(std::string_view text) {
  std::vector<Lexeme> lexemes, runs;
  lex(text, lexemes, runs);
  std::vector<std::string> out;
  ToggleState toggles;
  std::optional<Visible> prev;
  auto emit_ws = [&](TokenId id, Offset) { out.emplace_back(kSpecialNames[id]); };
  for (std::size_t i = 0; i < lexemes.size(); ++i) {
    Visible v = describe(lexemes[i].text, toggles);
    emit_run(runs[i], canonical_gap(prev ? &*prev : nullptr, v), emit_ws);
    out.emplace_back(lexemes[i].text);
    prev = v;
  }
  emit_run(runs.back(), 0, emit_ws);
  return out;
}

Vocab build_vocab(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(Errc::empty_corpus, "cannot build a vocabulary from no texts");
  std::set<std::string> distinct;
  for (const std::string& t : texts) {
    std::vector<Lexeme> lexemes, runs;
    lex(t, lexemes, runs);
    for (const Lexeme& l : lexemes) distinct.emplace(l.text);
  }
  return Vocab(std::vector<std::string>(distinct.begin(), distinct.end()));
}

TokenSequence encode(std::string_view text, const Vocab& vocab) {
  std::vector<Lexeme> lexemes, runs;
  lex(text, lexemes, runs);
  TokenSequence seq;
  seq.ids.reserve(lexemes.size() + 4);
  seq.offsets.reserve(lexemes.size() + 4);
  auto emit = [&](TokenId id, Offset off) {
    seq.ids.push_back(id);
    seq.offsets.push_back(off);
  };
  ToggleState toggles;
  std::optional<Visible> prev;
  for (std::size_t i = 0; i < lexemes.size(); ++i) {
    Visible v = describe(lexemes[i].text, toggles);
    emit_run(runs[i], canonical_gap(prev ? &*prev : nullptr, v), emit);
    emit(vocab.id(lexemes[i].text), {lexemes[i].start, lexemes[i].start + lexemes[i].text.size()});
    prev = v;
  }
  emit_run(runs.back(), 0, emit);
  return seq;
}

std::string decode(std::span<const TokenId> ids, const Vocab& vocab) {
  std::string out;
  ToggleState toggles;
  std::optional<Visible> prev;
  std::string pending;  // whitespace tokens since the last visible token
  bool pending_literal = false;
  for (TokenId id : ids) {
    const std::string& surface = vocab.token(id);
    if (id == special::kBos || id == special::kEos || id == special::kPad) continue;
    if (id == special::kSp || id == special::kTab) {
      pending += id == special::kTab ? '\t' : ' ';
      pending_literal |= id == special::kTab;
      continue;
    }
    Visible v = describe(surface, toggles);
    if (!pending_literal) out.append(canonical_gap(prev ? &*prev : nullptr, v), ' ');
    out += pending;
    pending.clear();
    pending_literal = false;
    out += surface;
    prev = v;
  }
  out += pending;
  return out;
}

std::pair<std::size_t, std::size_t> map_span(std::size_t start, std::size_t end, const TokenSequence& seq) {
  if (end < start) throw Error(Errc::misaligned_span, "span end precedes start");
  std::size_t first = seq.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Offset& o = seq.offsets[i];
    bool overlaps = o.start < end && start < o.end;
    if (!overlaps) continue;
    if (o.start < start || o.end > end) {
      throw Error(Errc::misaligned_span, "span [" + std::to_string(start) + ", " + std::to_string(end) +
                                             ") splits token " + std::to_string(i));
    }
    first = std::min(first, i);
    last = i + 1;
  }
  if (first >= last) throw Error(Errc::misaligned_span, "span covers no token");
  if (seq.offsets[first].start != start || seq.offsets[last - 1].end != end) {
    throw Error(Errc::misaligned_span, "span boundary falls between tokens");
  }
  return {first, last};
}

}  // namespace plab
