#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/document.hpp"

namespace mti {

struct SkosConcept {
  std::string id;
  std::map<std::string, std::string> pref_labels;               // lang -> label ("" when untagged)
  std::map<std::string, std::vector<std::string>> alt_labels;  // the "used for" terms
  std::vector<std::string> broader;

  bool operator==(const SkosConcept&) const = default;
};

struct LabelHit {
  std::string concept_id;
  MatchedVia via = MatchedVia::PrefLabel;
};

/// Concept store over skos:Concept, prefLabel, altLabel and broader. Other
/// SKOS properties are ignored. Immutable after construction.
class SkosStore {
 public:
  /// Throws Error(MalformedSkos) or Error(DanglingBroaderRef) listing the ids.
  static SkosStore parse(std::string_view xml_bytes);
  /// Concepts may be spread across files; broader references are resolved
  /// over the union.
  static SkosStore parse_many(const std::vector<std::string>& xml_documents);
  static SkosStore load(const std::filesystem::path& file);

  std::size_t size() const { return concepts_.size(); }
  const SkosConcept* find(std::string_view id) const;
  const std::map<std::string, SkosConcept, std::less<>>& concepts() const { return concepts_; }

  /// Case- and diacritic-insensitive label lookup. Untagged labels match any
  /// language. PrefLabel hits rank before AltLabel, then by concept id.
  std::optional<LabelHit> lookup(std::string_view label, std::string_view lang) const;

  /// Broader concepts, nearest first, breadth-first up to `depth` levels;
  /// never contains `id` itself.
  std::vector<std::string> broader_chain(std::string_view id, std::size_t depth) const;

 private:
  void index();
  std::optional<LabelHit> lookup_key(const std::string& key, std::string_view lang) const;
  friend std::vector<ThematicEntity> annotate_thematic(std::string_view, std::string_view, const SkosStore&, std::size_t);

  std::map<std::string, SkosConcept, std::less<>> concepts_;
  std::map<std::string, std::map<std::string, std::vector<LabelHit>>> labels_;  // lang -> key -> hits
};

constexpr std::size_t kMaxThematicNgram = 6;

/// Longest match over token n-grams (n <= 6); shorter overlapping matches
/// are suppressed. Ids are left empty.
std::vector<ThematicEntity> annotate_thematic(std::string_view text, std::string_view lang, const SkosStore& store,
                                              std::size_t broader_depth = 2);

/// Every abstract segment in its own language; ids c1.. in output order.
std::vector<ThematicEntity> annotate_thematic(const Document& doc, const SkosStore& store, std::size_t broader_depth = 2);

}  // namespace mti
