#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mti {

/// Half-open range in Unicode scalar offsets within one abstract segment.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  auto operator<=>(const Span&) const = default;
};

enum class IndicatorCategory { FeatureType, Orientation, Distance, Adjacency, Inclusion, GeometricFigure };
enum class SpatialKind { Absolute, Relative };

std::string_view to_string(IndicatorCategory c);
IndicatorCategory indicator_category_from_string(std::string_view s);
std::string_view to_string(SpatialKind k);
SpatialKind spatial_kind_from_string(std::string_view s);

struct SpatialIndicator {
  std::string surface;
  IndicatorCategory category = IndicatorCategory::FeatureType;
  std::string lang;
  Span span;

  bool operator==(const SpatialIndicator&) const = default;
};

struct Footprint {
  std::int64_t gazetteer_id = 0;
  double lat = 0;
  double lon = 0;

  bool operator==(const Footprint&) const = default;
};

/// ESA or ESR. An ESR wraps one or more ESAs (listed by id in `anchors`) and
/// carries exactly one topological relation; FeatureType is never a relation.
struct SpatialEntity {
  std::string id;
  std::size_t segment = 0;
  std::string surface;
  Span span;
  SpatialKind kind = SpatialKind::Absolute;
  std::string head;  // toponym text used for gazetteer lookup
  std::string rule;
  std::vector<SpatialIndicator> indicators;
  std::vector<std::string> anchors;
  std::optional<IndicatorCategory> relation;
  std::vector<std::int64_t> candidates;
  std::optional<Footprint> footprint;
  double confidence = 0;

  bool operator==(const SpatialEntity&) const = default;
};

struct OrganizationEntity {
  std::string id;
  std::size_t segment = 0;
  std::string surface;
  Span span;
  std::string trigger;  // rule id

  bool operator==(const OrganizationEntity&) const = default;
};

enum class Granularity { Year, Month, Day };
std::string_view to_string(Granularity g);

/// Calendar value at year, month or day granularity; month/day are 0 when
/// the surface does not state them.
struct CalendarDate {
  int year = 0;
  int month = 0;
  int day = 0;

  Granularity granularity() const;
  std::string iso() const;                      // "2004", "2004-03", "2004-03-12"
  static CalendarDate parse_iso(std::string_view s);  // inverse of iso()
  /// Day serials (days since 1970-01-01) of the first and last day covered.
  std::int64_t first_day() const;
  std::int64_t last_day() const;
  bool valid() const;

  auto operator<=>(const CalendarDate&) const = default;
};

enum class TemporalCategory { Date, Period };
std::string_view to_string(TemporalCategory c);

struct TemporalEntity {
  std::string id;
  std::size_t segment = 0;
  std::string surface;
  Span span;
  TemporalCategory category = TemporalCategory::Date;
  CalendarDate begin;
  CalendarDate end;  // equals begin for Date

  /// "2004-03" for dates, "1990/2000" for periods.
  std::string value() const;
  static void parse_value(std::string_view v, TemporalCategory category, CalendarDate& begin, CalendarDate& end);

  bool operator==(const TemporalEntity&) const = default;
};

enum class MatchedVia { PrefLabel, AltLabel };
std::string_view to_string(MatchedVia m);

struct ThematicEntity {
  std::string id;
  std::size_t segment = 0;
  std::string surface;
  Span span;
  std::string concept_id;
  MatchedVia matched_via = MatchedVia::PrefLabel;
  std::vector<std::string> broader_chain;  // nearest first

  bool operator==(const ThematicEntity&) const = default;
};

}  // namespace mti
