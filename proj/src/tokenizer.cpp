#include "mti/tokenizer.hpp"

#include "mti/text.hpp"

namespace mti {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Word: return "Word";
    case TokenKind::Number: return "Number";
    case TokenKind::Punct: return "Punct";
    case TokenKind::Hyphenated: return "Hyphenated";
  }
  return "Word";
}

std::string_view to_string(TokenShape s) {
  switch (s) {
    case TokenShape::Lower: return "Lower";
    case TokenShape::Capitalized: return "Capitalized";
    case TokenShape::AllCaps: return "AllCaps";
    case TokenShape::Mixed: return "Mixed";
  }
  return "Lower";
}

const SegmenterConfig& SegmenterConfig::defaults() {
  static const SegmenterConfig config = [] {
    SegmenterConfig c;
    c.abbreviations["en"] = {"e", "g", "i", "etc", "al", "fig", "figs", "dr", "mr", "mrs", "ms", "cf", "vs",
                             "approx", "no", "vol", "pp", "p", "st", "mt", "ca", "resp", "eq"};
    c.abbreviations["fr"] = {"etc", "cf", "fig", "p", "pp", "m", "mme", "mlle", "env", "av", "apr", "j",
                             "c", "st", "ste", "vol", "no", "n°", "al", "coll"};
    c.elisions["fr"] = {"l", "d", "j", "m", "n", "s", "t", "c", "qu", "jusqu", "lorsqu", "puisqu", "quoiqu", "presqu"};
    c.elisions["en"] = {"d", "l"};
    return c;
  }();
  return config;
}

namespace {

bool alnum(char32_t c) { return text::is_letter(c) || text::is_digit(c); }

TokenShape classify_shape(const std::vector<text::Scalar>& s, std::size_t b, std::size_t e) {
  std::size_t letters = 0;
  std::size_t uppers = 0;
  bool first_letter_seen = false;
  bool first_upper = false;
  bool inner_upper_off_boundary = false;
  for (std::size_t i = b; i < e; ++i) {
    const char32_t c = s[i].value;
    if (!text::is_letter(c)) continue;
    ++letters;
    const bool up = text::is_upper(c);
    if (up) ++uppers;
    if (!first_letter_seen) {
      first_letter_seen = true;
      first_upper = up;
      continue;
    }
    const bool after_hyphen = i > b && text::is_hyphen(s[i - 1].value);
    if (up && !after_hyphen) inner_upper_off_boundary = true;
  }
  if (letters == 0 || uppers == 0) return TokenShape::Lower;
  if (uppers == letters && letters >= 2) return TokenShape::AllCaps;
  if (first_upper && !inner_upper_off_boundary) return TokenShape::Capitalized;
  return TokenShape::Mixed;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::string_view lang, const SegmenterConfig& config) {
  const auto s = text::decode(source);
  std::vector<Token> tokens;
  static const std::set<std::string> no_elisions;
  const auto elision_it = config.elisions.find(std::string(lang));
  const auto& elisions = elision_it == config.elisions.end() ? no_elisions : elision_it->second;

  auto emit = [&](std::size_t b, std::size_t e, TokenKind kind) {
    Token t;
    t.start = b;
    t.end = e;
    t.byte_begin = s[b].byte_begin;
    t.byte_end = s[e - 1].byte_end;
    t.text = std::string(source.substr(t.byte_begin, t.byte_end - t.byte_begin));
    t.kind = kind;
    t.shape = classify_shape(s, b, e);
    t.folded = text::fold(t.text);
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const char32_t c = s[i].value;
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (alnum(c)) {
      const std::size_t b = i;
      bool hyphenated = false;
      bool all_digits = true;
      while (i < n) {
        const char32_t cur = s[i].value;
        if (alnum(cur) || text::is_mark(cur)) {
          all_digits = all_digits && text::is_digit(cur);
          ++i;
          continue;
        }
        const bool has_next = i + 1 < n;
        if (text::is_hyphen(cur) && has_next && text::is_letter(s[i - 1].value) && text::is_letter(s[i + 1].value)) {
          hyphenated = true;
          all_digits = false;
          ++i;
          continue;
        }
        if (all_digits && (cur == U'.' || cur == U',') && has_next && text::is_digit(s[i + 1].value)) {
          ++i;
          continue;
        }
        if (text::is_apostrophe(cur) && !all_digits && (!has_next || text::is_letter(s[i + 1].value))) {
          std::string prefix;
          for (std::size_t k = b; k < i; ++k) prefix += text::encode(s[k].value);
          if (elisions.count(text::fold(prefix))) {
            ++i;  // keep the apostrophe on the elided article
            break;
          }
          if (!has_next) break;
          if (lang == "en" && (s[i + 1].value == U's' || s[i + 1].value == U'S') &&
              (i + 2 >= n || !text::is_letter(s[i + 2].value))) {
            break;  // possessive 's becomes its own token
          }
          ++i;
          continue;
        }
        break;
      }
      emit(b, i, all_digits ? TokenKind::Number : (hyphenated ? TokenKind::Hyphenated : TokenKind::Word));
      continue;
    }
    if (text::is_apostrophe(c) && i + 1 < n && (s[i + 1].value == U's' || s[i + 1].value == U'S') &&
        (i + 2 >= n || !text::is_letter(s[i + 2].value)) && !tokens.empty() && tokens.back().end == i) {
      emit(i, i + 2, TokenKind::Word);
      i += 2;
      continue;
    }
    emit(i, i + 1, TokenKind::Punct);
    ++i;
  }

  // Sentence ids: a terminator followed by whitespace and a capitalized token
  // closes the sentence unless the preceding token is a known abbreviation.
  static const std::set<std::string> no_abbreviations;
  const auto abbr_it = config.abbreviations.find(std::string(lang));
  const auto& abbreviations = abbr_it == config.abbreviations.end() ? no_abbreviations : abbr_it->second;
  std::size_t sentence = 0;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    tokens[k].sentence = sentence;
    const Token& t = tokens[k];
    if (t.kind != TokenKind::Punct || (t.text != "." && t.text != "?" && t.text != "!")) continue;
    if (k + 1 >= tokens.size()) continue;
    const Token& next = tokens[k + 1];
    if (next.start == t.end || !(next.capitalized() || next.kind == TokenKind::Number)) continue;
    if (t.text == "." && k > 0 && tokens[k - 1].end == t.start) {
      const Token& prev = tokens[k - 1];
      if (abbreviations.count(prev.folded)) continue;
      // initials such as "U.S." or "J. Smith"
      if (prev.is_word() && prev.capitalized() && text::scalar_length(prev.text) == 1) continue;
    }
    ++sentence;
  }
  return tokens;
}

}  // namespace mti
