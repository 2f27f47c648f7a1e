#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/modsti.hpp"

namespace mti {

struct SpatialPosting {
  std::optional<std::int64_t> gazetteer_id;  // absent when unresolved
  std::string surface;
  SpatialKind kind = SpatialKind::Absolute;
  std::optional<IndicatorCategory> relation;
  std::optional<double> lat;
  std::optional<double> lon;

  bool operator==(const SpatialPosting&) const = default;
};

struct TemporalPosting {
  std::string surface;
  TemporalCategory category = TemporalCategory::Date;
  CalendarDate start;
  CalendarDate end;

  bool operator==(const TemporalPosting&) const = default;
};

struct ThematicPosting {
  std::string surface;
  std::string concept_id;
  std::vector<std::string> broader;

  bool operator==(const ThematicPosting&) const = default;
};

struct IndexEntry {
  std::string doc_id;
  std::string title;
  std::vector<std::string> languages;
  Source source = Source::Other;
  std::vector<SpatialPosting> spatial;
  std::vector<TemporalPosting> temporal;
  std::vector<ThematicPosting> thematic;

  bool operator==(const IndexEntry&) const = default;
};

IndexEntry make_index_entry(const ModsTiRecord& record);
std::string to_json_line(const IndexEntry& entry);
IndexEntry index_entry_from_json(std::string_view line);

/// Stage names in report order.
inline const std::vector<std::string> kStageNames = {"ingest", "spatial", "temporal", "thematic", "index"};

struct IndexSummary {
  std::size_t documents = 0;
  std::vector<StageTiming> stages;  // kStageNames order
  double total_seconds = 0;

  double per_document_seconds() const { return documents ? total_seconds / static_cast<double>(documents) : 0; }
  std::string to_json() const;
  static IndexSummary from_json(std::string_view text);
};

/// Path of the summary written next to an index file.
std::filesystem::path summary_path(const std::filesystem::path& index_file);

/// Writes one JSON line per record, in input order, and the summary object to
/// summary_path(out). Stage timings come from each record's provenance plus
/// the time spent here. Throws Error(IoFailure).
IndexSummary build_index(const std::vector<ModsTiRecord>& records, const std::filesystem::path& out);

/// NDJSON body only, for in-memory use.
std::string render_index(const std::vector<ModsTiRecord>& records);

std::vector<IndexEntry> load_index(const std::filesystem::path& file);
std::vector<IndexEntry> parse_index(std::string_view ndjson);

struct BoundingBox {
  double min_lat = -90;
  double min_lon = -180;
  double max_lat = 90;
  double max_lon = 180;

  bool contains(double lat, double lon) const {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
  }
};

/// Each present dimension must match (conjunction); values inside one
/// dimension are alternatives (disjunction).
struct Query {
  std::vector<std::int64_t> places;
  std::optional<BoundingBox> bbox;
  std::optional<std::pair<CalendarDate, CalendarDate>> period;
  std::vector<std::string> concepts;  // matched against concept ids and broader ids
  std::string text;                   // every term must occur in title or annotated surfaces

  bool empty() const { return places.empty() && !bbox && !period && concepts.empty() && text.empty(); }
};

struct QueryHit {
  std::string doc_id;
  std::size_t score = 0;  // matching postings plus matched text terms

  bool operator==(const QueryHit&) const = default;
};

/// Ranked by score descending, ties by docId ascending.
std::vector<QueryHit> query_index(const std::vector<IndexEntry>& index, const Query& query);

}  // namespace mti
