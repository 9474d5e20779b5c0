// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace plab {

namespace {

struct Marks {
  std::string_view open;
  std::string_view close;
};

Marks wrap_marks(WrapStyle s) {
  switch (s) {
    case WrapStyle::double_quote: return {"\"", "\""};
    case WrapStyle::single_quote: return {"'", "'"};
    case WrapStyle::asterisk: return {"*", "*"};
    case WrapStyle::square_bracket: return {"[", "]"};
    case WrapStyle::paren: return {"(", ")"};
  }
  return {"", ""};
}

std::string_view pad_unit(PadStyle s) {
  switch (s) {
    case PadStyle::spaces: return " ";
    case PadStyle::tab: return "\t";
    case PadStyle::pound: return "# ";
  }
  return "";
}

AugmentedDocument based_on(const Document& doc, const AugmentSpec& spec) {
  AugmentedDocument out;
  out.profile_id = doc.profile_id;
  out.base_template_id = doc.template_id;
  out.spec = spec;
  return out;
}

AugmentedDocument with_prefix(const Document& doc, const AugmentSpec& spec, const std::string& prefix,
                              std::string_view suffix) {
  AugmentedDocument out = based_on(doc, spec);
  out.text.reserve(prefix.size() + doc.text.size() + suffix.size());
  out.text.append(prefix).append(doc.text).append(suffix);
  out.spans = doc.spans;
  for (Span& s : out.spans) {
    s.start += prefix.size();
    s.end += prefix.size();
  }
  return out;
}

// The 9 (kind, style) formatting pairs, in a fixed canonical order.
struct FormatPair {
  AugmentKind kind;
  int style;
};

constexpr std::array<FormatPair, 9> kFormatPairs = {{
    {AugmentKind::wrap, static_cast<int>(WrapStyle::double_quote)},
    {AugmentKind::wrap, static_cast<int>(WrapStyle::single_quote)},
    {AugmentKind::wrap, static_cast<int>(WrapStyle::asterisk)},
    {AugmentKind::wrap, static_cast<int>(WrapStyle::square_bracket)},
    {AugmentKind::wrap, static_cast<int>(WrapStyle::paren)},
    {AugmentKind::left_pad, static_cast<int>(PadStyle::spaces)},
    {AugmentKind::left_pad, static_cast<int>(PadStyle::tab)},
    {AugmentKind::left_pad, static_cast<int>(PadStyle::pound)},
    {AugmentKind::space_insert, 0},
}};

constexpr int kMaxPadWidth = 4;

AugmentSpec spec_for(const FormatPair& pair, std::mt19937_64& rng, double space_prob) {
  AugmentSpec spec;
  spec.kind = pair.kind;
  spec.space_prob = space_prob;
  if (pair.kind == AugmentKind::wrap) spec.wrap_style = static_cast<WrapStyle>(pair.style);
  if (pair.kind == AugmentKind::left_pad) {
    spec.pad_style = static_cast<PadStyle>(pair.style);
    spec.pad_width = std::uniform_int_distribution<int>(1, kMaxPadWidth)(rng);
  }
  spec.seed = rng();
  return spec;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

}  // namespace

void AugmentSpec::validate() const {
  if (!(space_prob >= 0.0 && space_prob <= 1.0)) {
    throw Error(Errc::invalid_argument, "space_prob must lie in [0, 1]");
  }
  if (!(eda_rate >= 0.0 && eda_rate <= 1.0)) throw Error(Errc::invalid_argument, "eda_rate must lie in [0, 1]");
  if (pad_width < 1) throw Error(Errc::invalid_argument, "pad_width must be at least 1");
}

Document AugmentedDocument::as_document() const {
  return Document{profile_id, base_template_id, text, spans};
}

std::string to_json_line(const AugmentedDocument& d) {
  nlohmann::json j = nlohmann::json::parse(to_json_line(d.as_document()));
  j["template_id"] = d.base_template_id + "+" + std::string(kind_name(d.spec.kind));
  j["base_template_id"] = d.base_template_id;
  j["spec"] = nlohmann::json::parse(spec_to_json(d.spec));
  return j.dump();
}

std::string_view kind_name(AugmentKind k) {
  switch (k) {
    case AugmentKind::identity: return "identity";
    case AugmentKind::wrap: return "wrap";
    case AugmentKind::left_pad: return "left_pad";
    case AugmentKind::space_insert: return "space_insert";
    case AugmentKind::eda_lite: return "eda_lite";
  }
  return "?";
}

std::string_view wrap_style_name(WrapStyle s) {
  switch (s) {
    case WrapStyle::double_quote: return "double_quote";
    case WrapStyle::single_quote: return "single_quote";
    case WrapStyle::asterisk: return "asterisk";
    case WrapStyle::square_bracket: return "square_bracket";
    case WrapStyle::paren: return "paren";
  }
  return "?";
}

std::string_view pad_style_name(PadStyle s) {
  switch (s) {
    case PadStyle::spaces: return "spaces";
    case PadStyle::tab: return "tab";
    case PadStyle::pound: return "pound";
  }
  return "?";
}

AugmentKind parse_augment_kind(std::string_view s) {
  if (s == "identity" || s == "none") return AugmentKind::identity;
  if (s == "wrap") return AugmentKind::wrap;
  if (s == "pad" || s == "left_pad") return AugmentKind::left_pad;
  if (s == "space" || s == "space_insert") return AugmentKind::space_insert;
  if (s == "eda" || s == "eda_lite") return AugmentKind::eda_lite;
  throw Error(Errc::invalid_argument, "unknown augmentation kind '" + std::string(s) + "'");
}

std::string spec_to_json(const AugmentSpec& spec) {
  nlohmann::json j = {{"kind", kind_name(spec.kind)}, {"seed", spec.seed}};
  switch (spec.kind) {
    case AugmentKind::wrap: j["style"] = wrap_style_name(spec.wrap_style); break;
    case AugmentKind::left_pad:
      j["style"] = pad_style_name(spec.pad_style);
      j["width"] = spec.pad_width;
      break;
    case AugmentKind::space_insert: j["p"] = spec.space_prob; break;
    case AugmentKind::eda_lite: {
      std::vector<std::string> ops;
      if (spec.eda_ops.insert) ops.emplace_back("insert");
      if (spec.eda_ops.remove) ops.emplace_back("delete");
      if (spec.eda_ops.swap) ops.emplace_back("swap");
      j["ops"] = ops;
      j["rate"] = spec.eda_rate;
      break;
    }
    case AugmentKind::identity: break;
  }
  return j.dump();
}

AugmentedDocument identity(const Document& doc) {
  AugmentedDocument out = based_on(doc, AugmentSpec{});
  out.text = doc.text;
  out.spans = doc.spans;
  return out;
}

AugmentedDocument wrap(const Document& doc, WrapStyle style) {
  AugmentSpec spec;
  spec.kind = AugmentKind::wrap;
  spec.wrap_style = style;
  Marks m = wrap_marks(style);
  return with_prefix(doc, spec, std::string(m.open), m.close);
}

AugmentedDocument left_pad(const Document& doc, PadStyle style, int width) {
  AugmentSpec spec;
  spec.kind = AugmentKind::left_pad;
  spec.pad_style = style;
  spec.pad_width = width;
  spec.validate();
  std::string prefix;
  for (int i = 0; i < width; ++i) prefix += pad_unit(style);
  return with_prefix(doc, spec, prefix, "");
}

AugmentedDocument insert_spaces(const Document& doc, double p, std::uint64_t seed) {
  AugmentSpec spec;
  spec.kind = AugmentKind::space_insert;
  spec.space_prob = p;
  spec.seed = seed;
  spec.validate();
  AugmentedDocument out = based_on(doc, spec);

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution extra(p);
  // inserted_before[i]: extra spaces placed before original byte i.
  std::vector<std::size_t> inserted_before(doc.text.size() + 1, 0);
  std::size_t inserted = 0;
  out.text.reserve(doc.text.size() + doc.text.size() / 4);
  for (std::size_t i = 0; i < doc.text.size(); ++i) {
    inserted_before[i] = inserted;
    char c = doc.text[i];
    out.text += c;
    if (c == ' ' && extra(rng)) {
      out.text += ' ';
      ++inserted;
    }
  }
  inserted_before[doc.text.size()] = inserted;
  out.spans = doc.spans;
  for (Span& s : out.spans) {
    s.start += inserted_before[s.start];
    s.end += inserted_before[s.end];
  }
  return out;
}

AugmentedDocument eda_lite(const Document& doc, EdaOps ops, double rate, std::uint64_t seed) {
  AugmentSpec spec;
  spec.kind = AugmentKind::eda_lite;
  spec.eda_ops = ops;
  spec.eda_rate = rate;
  spec.seed = seed;
  spec.validate();
  AugmentedDocument out = based_on(doc, spec);

  std::vector<std::string> words = split_words(doc.text);
  const auto edits = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(words.size())));
  if (edits == 0 || words.empty()) {
    out.text = doc.text;
    out.spans = doc.spans;
    return out;
  }
  std::mt19937_64 rng(seed);
  auto index = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  if (ops.insert) {
    for (std::size_t e = 0; e < edits; ++e) {
      std::string w = words[index(words.size())];
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(index(words.size() + 1)), std::move(w));
    }
  }
  if (ops.remove) {
    for (std::size_t e = 0; e < edits && words.size() > 1; ++e) {
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(index(words.size())));
    }
  }
  if (ops.swap && words.size() > 1) {
    for (std::size_t e = 0; e < edits; ++e) {
      std::size_t i = index(words.size());
      std::size_t j = index(words.size() - 1);
      if (j >= i) ++j;
      std::swap(words[i], words[j]);
    }
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.text += ' ';
    out.text += words[i];
  }
  return out;
}

AugmentedDocument apply(const Document& doc, const AugmentSpec& spec) {
  spec.validate();
  AugmentedDocument out;
  switch (spec.kind) {
    case AugmentKind::identity: out = identity(doc); break;
    case AugmentKind::wrap: out = wrap(doc, spec.wrap_style); break;
    case AugmentKind::left_pad: out = left_pad(doc, spec.pad_style, spec.pad_width); break;
    case AugmentKind::space_insert: out = insert_spaces(doc, spec.space_prob, spec.seed); break;
    case AugmentKind::eda_lite: out = eda_lite(doc, spec.eda_ops, spec.eda_rate, spec.seed); break;
  }
  out.spec = spec;
  return out;
}

std::vector<AugmentedDocument> augment_set(const Document& doc, int k, std::uint64_t seed, double space_prob,
                                           AugmentKind only) {
  if (k < 0) throw Error(Errc::invalid_argument, "augmentation count must be non-negative");
  std::vector<AugmentedDocument> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  out.push_back(identity(doc));
  std::mt19937_64 rng(seed);

  if (only == AugmentKind::eda_lite) {
    for (int i = 0; i < k; ++i) {
      AugmentSpec spec;
      spec.kind = AugmentKind::eda_lite;
      spec.seed = rng();
      out.push_back(apply(doc, spec));
    }
    return out;
  }

  std::vector<FormatPair> pool;
  for (const FormatPair& p : kFormatPairs) {
    if (only == AugmentKind::identity || p.kind == only) pool.push_back(p);
  }
  std::vector<FormatPair> order;
  for (int i = 0; i < k; ++i) {
    if (order.empty()) {
      order = pool;
      std::shuffle(order.begin(), order.end(), rng);
      std::reverse(order.begin(), order.end());  // pop from the back in shuffled order
    }
    FormatPair pair = order.back();
    order.pop_back();
    out.push_back(apply(doc, spec_for(pair, rng, space_prob)));
  }
  return out;
}

AugmentSpec sample_format_spec(std::uint64_t seed, double space_prob) {
  std::mt19937_64 rng(seed);
  const FormatPair& pair = kFormatPairs[std::uniform_int_distribution<std::size_t>(0, kFormatPairs.size() - 1)(rng)];
  return spec_for(pair, rng, space_prob);
}

QAPair augment_question(const QAPair& qa, const AugmentSpec& spec) {
  if (spec.kind == AugmentKind::eda_lite) {
    throw Error(Errc::invalid_argument, "eda_lite is not a formatting augmentation for questions");
  }
  Document as_doc{qa.profile_id, "question", qa.question, {}};
  QAPair out = qa;
  out.question = apply(as_doc, spec).text;
  return out;
}

std::string strip_formatting(std::string_view text) {
  std::string_view t = text;
  // Left padding: spaces, tabs, or repeated "# ".
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  while (t.starts_with("# ")) t.remove_prefix(2);
  if (t.size() >= 2) {
    for (WrapStyle s : {WrapStyle::double_quote, WrapStyle::single_quote, WrapStyle::asterisk,
                        WrapStyle::square_bracket, WrapStyle::paren}) {
      Marks m = wrap_marks(s);
      if (t.starts_with(m.open) && t.ends_with(m.close)) {
        t = t.substr(m.open.size(), t.size() - m.open.size() - m.close.size());
        break;
      }
    }
  }
  std::string out;
  out.reserve(t.size());
  for (char c : t) {
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out += c;
  }
  return out;
}

std::string span_value(std::string_view text, const Span& span) {
  std::string out;
  for (std::size_t i = span.start; i < span.end && i < text.size(); ++i) {
    if (text[i] == ' ' && !out.empty() && out.back() == ' ') continue;
    out += text[i];
  }
  return out;
}

}  // namespace plab
