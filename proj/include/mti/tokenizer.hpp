#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mti {

enum class TokenKind { Word, Number, Punct, Hyphenated };
enum class TokenShape { Lower, Capitalized, AllCaps, Mixed };

std::string_view to_string(TokenKind k);
std::string_view to_string(TokenShape s);

/// Offsets are Unicode scalar positions; `byte_begin`/`byte_end` address the
/// same range in the UTF-8 source so `text` is always an exact substring.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  TokenKind kind = TokenKind::Word;
  TokenShape shape = TokenShape::Lower;
  std::size_t sentence = 0;
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;
  std::string folded;

  bool capitalized() const { return shape == TokenShape::Capitalized || shape == TokenShape::AllCaps; }
  bool is_word() const { return kind == TokenKind::Word || kind == TokenKind::Hyphenated; }
};

struct SegmenterConfig {
  /// Folded token texts (without the trailing period) that never end a sentence.
  std::map<std::string, std::set<std::string>> abbreviations;
  /// Folded prefixes split off with their apostrophe ("l'" + "Arabie").
  std::map<std::string, std::set<std::string>> elisions;

  static const SegmenterConfig& defaults();
};

std::vector<Token> tokenize(std::string_view text, std::string_view lang,
                            const SegmenterConfig& config = SegmenterConfig::defaults());

}  // namespace mti
