#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/document.hpp"
#include "mti/modsti.hpp"

namespace mti {

enum class EvalCategory { Esa, Esr, Organization, Temporal, Thematic };
enum class MatchMode { ExactSpan, Overlap };

inline const std::vector<EvalCategory> kEvalCategories = {EvalCategory::Esa, EvalCategory::Esr,
                                                          EvalCategory::Organization, EvalCategory::Temporal,
                                                          EvalCategory::Thematic};

std::string_view to_string(EvalCategory c);  // "ESA", "ESR", "Organization", "Temporal", "Thematic"
EvalCategory eval_category_from_string(std::string_view s);
std::string_view to_string(MatchMode m);      // "exact", "overlap"
MatchMode match_mode_from_string(std::string_view s);

struct GoldSpan {
  Span span;
  EvalCategory category = EvalCategory::Esa;

  auto operator<=>(const GoldSpan&) const = default;
};

struct GoldDocument {
  std::string id;
  std::string lang;
  std::string text;
  std::vector<GoldSpan> spans;

  bool operator==(const GoldDocument&) const = default;
};

/// JSON array of {id, lang, text, spans: [{start, end, category}]}.
std::vector<GoldDocument> parse_gold(std::string_view json);
std::vector<GoldDocument> load_gold(const std::filesystem::path& file);
std::string gold_to_json(const std::vector<GoldDocument>& gold);

/// Pipeline input for a gold document: one abstract segment, no title.
Document document_from_gold(const GoldDocument& gold);
/// Annotations of segment 0 of a record as typed spans.
std::vector<GoldSpan> spans_from_record(const ModsTiRecord& record);

struct CategoryScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  /// Absent when the denominator is zero.
  std::optional<double> precision() const;
  std::optional<double> recall() const;
  /// 2PR/(P+R), 0 when either is absent or P+R = 0.
  double f1() const;

  CategoryScore& operator+=(const CategoryScore& o);
  bool operator==(const CategoryScore&) const = default;
};

double f_measure(double precision, double recall);

struct EvalReport {
  MatchMode mode = MatchMode::ExactSpan;
  std::map<EvalCategory, CategoryScore> categories;

  CategoryScore spatial() const;  // ESA + ESR
  CategoryScore overall() const;

  std::string to_json() const;
  static EvalReport from_json(std::string_view json);
  /// Aligned text table: category, TP, FP, FN, precision, recall, F-measure.
  std::string to_table() const;

  bool operator==(const EvalReport&) const = default;
};

/// Matches, per document and category, each gold span to at most one
/// prediction and vice versa. The pairing has maximum size; gold spans are
/// tried left to right and earlier predictions are preferred. Throws
/// Error(UnknownDocId) for predictions on documents absent from the gold set;
/// gold documents without predictions count as all misses.
EvalReport score(const std::vector<GoldDocument>& gold, const std::map<std::string, std::vector<GoldSpan>>& predicted,
                 MatchMode mode);

/// Size of a maximum one-to-one pairing between two span lists.
std::size_t matched_pairs(const std::vector<Span>& gold, const std::vector<Span>& predicted, MatchMode mode);

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t words = 0;
  std::map<EvalCategory, std::size_t> spans;

  double mean_words() const { return documents ? static_cast<double>(words) / static_cast<double>(documents) : 0; }
  std::string to_json() const;
};

/// Words are whitespace-separated chunks holding at least one letter or digit.
CorpusStats corpus_stats(const std::vector<GoldDocument>& gold);

}  // namespace mti
