#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/document.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

/// Per-language words for the calendar grammar. File format, tab separated,
/// '#' comments:
///
///     month     janvier      1
///     range     entre        et
///     decade    les années
///     relative  l'année dernière   -1
///     block_before  p
///     block_after   km
struct TemporalLexicon {
  std::string lang;
  std::map<std::string, int> months;                        // folded word -> 1..12
  std::vector<std::pair<std::string, std::string>> ranges;  // folded opener, closer
  std::vector<std::vector<std::string>> decade_prefixes;    // folded token sequences
  std::vector<std::pair<std::vector<std::string>, int>> relatives;  // phrase, year offset
  std::set<std::string> block_before;
  std::set<std::string> block_after;

  static TemporalLexicon parse(std::string_view tsv, std::string_view lang);
  static TemporalLexicon load(const std::filesystem::path& file, std::string_view lang);
};

struct TemporalConfig {
  int min_year = 1000;
  int max_year = 2100;
};

/// Lexicons keyed by language, read from `<dir>/<lang>.tsv`.
class TemporalLibrary {
 public:
  static TemporalLibrary load(const std::filesystem::path& dir);
  void add(TemporalLexicon lexicon);
  const TemporalLexicon* for_lang(std::string_view lang) const;

 private:
  std::map<std::string, TemporalLexicon, std::less<>> lexicons_;
};

/// Dates ("1998", "March 2004", "12 mars 2004"), intervals ("from 1990 to
/// 2000", "entre 1990 et 2000", "1990-2000") and decades ("the 1990s", "les
/// années 1990"). Relative expressions are kept only when `dct` is given.
/// Ids are left empty; spans are non-overlapping and token aligned.
std::vector<TemporalEntity> annotate_temporal(std::string_view text, const TemporalLexicon& lexicon,
                                              const std::optional<CalendarDate>& dct = std::nullopt,
                                              const TemporalConfig& config = {});

struct TemporalResources {
  const TemporalLibrary* lexicons = nullptr;
  TemporalConfig config;
};

/// Every abstract segment in its own language; ids t1.. in output order.
std::vector<TemporalEntity> annotate_temporal(const Document& doc, const TemporalResources& resources,
                                              const std::optional<CalendarDate>& dct = std::nullopt);

}  // namespace mti
