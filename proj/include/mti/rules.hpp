#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

/// A named list of (possibly multi-token) terms, matched on folded tokens.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, std::optional<IndicatorCategory> category);

  void add(std::string_view phrase, std::string_view lang);
  /// Token lengths of every entry matching at `pos`, longest first.
  std::vector<std::size_t> match_lengths(const std::vector<Token>& tokens, std::size_t pos) const;
  bool contains_token(std::string_view folded) const;

  const std::string& name() const { return name_; }
  const std::optional<IndicatorCategory>& category() const { return category_; }
  std::size_t size() const { return size_; }

 private:
  std::string name_;
  std::optional<IndicatorCategory> category_;
  std::map<std::string, std::vector<std::vector<std::string>>> by_first_;
  std::size_t size_ = 0;
};

enum class RuleLabel { Esa, Esr, Organization };

struct PatternTerm {
  enum class Kind { Cap, Low, Num, Punct, Word, Any, Lexicon, Literal, Esa };
  Kind kind = Kind::Any;
  bool negated = false;
  std::string arg;  // lexicon name or folded literal
};

struct PatternAtom {
  std::string role;  // "", "name", "ind", "anchor", "org" or "ctx" (context, outside the span)
  std::vector<PatternTerm> terms;
  char quant = '1';  // '1', '?', '*', '+'
};

struct Rule {
  std::string id;
  std::vector<PatternAtom> atoms;
  RuleLabel label = RuleLabel::Esa;
  std::optional<IndicatorCategory> relation;  // explicit "=> ESR:Inclusion"
  std::size_t order = 0;
  std::string source;
};

struct Capture {
  std::string role;
  std::size_t atom = 0;
  std::size_t begin = 0;  // token indices
  std::size_t end = 0;
  const Lexicon* lexicon = nullptr;
  std::optional<std::size_t> esa;
};

struct RuleMatch {
  const Rule* rule = nullptr;
  std::size_t begin = 0;  // span in tokens, context atoms excluded
  std::size_t end = 0;
  std::vector<Capture> captures;

  std::size_t length() const { return end - begin; }
};

/// Rules and lexicons for one language, read from a plain-text rule file:
///
///     lang en
///     lexicon feature_type FeatureType lexicons/en/feature_types.txt
///     lexicon toponym - @external
///     rule esa.en.10 name=Cap&!@feature_type+ ind=@feature_type&Cap+ => ESA
///
/// See resources/rules/README.md for the full atom syntax.
class RuleSet {
 public:
  static RuleSet load(const std::filesystem::path& file);
  static RuleSet parse(std::string_view text, const std::filesystem::path& base_dir);

  const std::string& lang() const { return lang_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Lexicon* lexicon(std::string_view name) const;
  /// Names declared `@external` that still need set_lexicon().
  std::vector<std::string> missing_lexicons() const;
  void set_lexicon(Lexicon lexicon);
  /// Throws Error(MalformedRule) if a referenced lexicon is absent.
  void validate() const;

 private:
  std::string lang_;
  std::vector<Rule> rules_;
  std::map<std::string, Lexicon, std::less<>> lexicons_;
  std::vector<std::string> external_;
};

/// Token ranges [begin, end) of already accepted Absolute entities, used by ESA atoms.
using EsaTokenSpans = std::vector<std::pair<std::size_t, std::size_t>>;

/// Best match of every rule with `label` at every start token.
std::vector<RuleMatch> find_matches(const RuleSet& rules, RuleLabel label, const std::vector<Token>& tokens,
                                    const EsaTokenSpans& esas = {});

/// Longest match wins, then leftmost, then lowest rule order. Matches that
/// overlap an accepted one or any `blocked` range are dropped. Output is
/// sorted by position.
std::vector<RuleMatch> resolve_overlaps(std::vector<RuleMatch> candidates,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& blocked = {});

}  // namespace mti
