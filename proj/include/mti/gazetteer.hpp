#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mti {

enum class FeatureClass { Country, Admin, City, Stream, Lake, Gulf, Ocean, Island, Region, Other };

std::string_view to_string(FeatureClass c);
FeatureClass feature_class_from_string(std::string_view s);  // throws Error(InvalidArgument)

struct GazetteerEntry {
  std::int64_t id = 0;
  std::string name;
  std::vector<std::string> alt_names;
  FeatureClass feature_class = FeatureClass::Other;
  double lat = 0;
  double lon = 0;
  std::string country;  // ISO 3166-1 alpha-2
  std::int64_t importance = 0;

  bool operator==(const GazetteerEntry&) const = default;
};

/// Read-only place directory. Columns (tab separated): id, name, altNames
/// (comma-joined), featureClass, lat, lon, country, importance. Blank lines
/// and lines starting with '#' are skipped.
class Gazetteer {
 public:
  static Gazetteer load(const std::filesystem::path& tsv);
  /// Throws Error(MalformedRow) naming the 1-based line, or Error(DuplicateId).
  static Gazetteer parse(std::string_view tsv);

  /// Entries whose folded name or alt name equals the folded query, restricted
  /// to `filter` when given, ordered by importance descending then id ascending.
  std::vector<GazetteerEntry> lookup(std::string_view name,
                                     const std::optional<std::set<FeatureClass>>& filter = std::nullopt) const;

  const GazetteerEntry* find(std::int64_t id) const;
  const std::vector<GazetteerEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Every distinct surface name (names and alt names) in file order.
  std::vector<std::string> names() const;

 private:
  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
  std::unordered_map<std::int64_t, std::size_t> by_id_;
};

/// Maps folded feature-type words ("river", "golfe") to gazetteer classes.
/// File format: term TAB class[,class...]; '#' comments.
class FeatureTypeMap {
 public:
  static FeatureTypeMap load(const std::filesystem::path& tsv);
  static FeatureTypeMap parse(std::string_view tsv);

  void add(std::string_view term, std::set<FeatureClass> classes);
  /// Empty when the term is unknown.
  std::set<FeatureClass> classes_for(std::string_view term) const;

 private:
  std::map<std::string, std::set<FeatureClass>> map_;
};

}  // namespace mti
