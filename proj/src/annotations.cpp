#include "mti/annotations.hpp"

#include <chrono>
#include <cstdio>

#include "mti/error.hpp"
#include "mti/text.hpp"

namespace mti {

std::string_view to_string(IndicatorCategory c) {
  switch (c) {
    case IndicatorCategory::FeatureType: return "FeatureType";
    case IndicatorCategory::Orientation: return "Orientation";
    case IndicatorCategory::Distance: return "Distance";
    case IndicatorCategory::Adjacency: return "Adjacency";
    case IndicatorCategory::Inclusion: return "Inclusion";
    case IndicatorCategory::GeometricFigure: return "GeometricFigure";
  }
  return "FeatureType";
}

IndicatorCategory indicator_category_from_string(std::string_view s) {
  for (const auto c : {IndicatorCategory::FeatureType, IndicatorCategory::Orientation, IndicatorCategory::Distance,
                       IndicatorCategory::Adjacency, IndicatorCategory::Inclusion, IndicatorCategory::GeometricFigure}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown indicator category '" + std::string(s) + "'");
}

std::string_view to_string(SpatialKind k) { return k == SpatialKind::Absolute ? "absolute" : "relative"; }

SpatialKind spatial_kind_from_string(std::string_view s) {
  if (s == "absolute") return SpatialKind::Absolute;
  if (s == "relative") return SpatialKind::Relative;
  throw Error(ErrorCode::InvalidArgument, "unknown spatial kind '" + std::string(s) + "'");
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::Year: return "year";
    case Granularity::Month: return "month";
    case Granularity::Day: return "day";
  }
  return "year";
}

std::string_view to_string(TemporalCategory c) { return c == TemporalCategory::Date ? "Date" : "Period"; }

std::string_view to_string(MatchedVia m) { return m == MatchedVia::PrefLabel ? "PrefLabel" : "AltLabel"; }

Granularity CalendarDate::granularity() const {
  if (day != 0) return Granularity::Day;
  if (month != 0) return Granularity::Month;
  return Granularity::Year;
}

std::string CalendarDate::iso() const {
  char buf[32];
  switch (granularity()) {
    case Granularity::Year: std::snprintf(buf, sizeof buf, "%04d", year); break;
    case Granularity::Month: std::snprintf(buf, sizeof buf, "%04d-%02d", year, month); break;
    case Granularity::Day: std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day); break;
  }
  return buf;
}

CalendarDate CalendarDate::parse_iso(std::string_view s) {
  CalendarDate d;
  const auto parts = text::split(s, '-');
  auto field = [&](const std::string& p, std::size_t width) {
    if (p.size() != width) throw Error(ErrorCode::MalformedInput, "bad ISO date '" + std::string(s) + "'");
    return static_cast<int>(text::parse_int(p));
  };
  if (parts.empty() || parts.size() > 3) throw Error(ErrorCode::MalformedInput, "bad ISO date '" + std::string(s) + "'");
  d.year = field(parts[0], 4);
  if (parts.size() > 1) d.month = field(parts[1], 2);
  if (parts.size() > 2) d.day = field(parts[2], 2);
  if (!d.valid()) throw Error(ErrorCode::MalformedInput, "invalid calendar date '" + std::string(s) + "'");
  return d;
}

bool CalendarDate::valid() const {
  using namespace std::chrono;
  if (month == 0) return day == 0;
  if (month < 1 || month > 12) return false;
  if (day == 0) return true;
  return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                        std::chrono::day{static_cast<unsigned>(day)}}
      .ok();
}

std::int64_t CalendarDate::first_day() const {
  using namespace std::chrono;
  const auto m = static_cast<unsigned>(month == 0 ? 1 : month);
  const auto d = static_cast<unsigned>(day == 0 ? 1 : day);
  return sys_days{std::chrono::year{year} / std::chrono::month{m} / std::chrono::day{d}}.time_since_epoch().count();
}

std::int64_t CalendarDate::last_day() const {
  using namespace std::chrono;
  if (day != 0) return first_day();
  if (month != 0) {
    return sys_days{year_month_day_last{std::chrono::year{year}, month_day_last{std::chrono::month{static_cast<unsigned>(month)}}}}
        .time_since_epoch()
        .count();
  }
  return sys_days{std::chrono::year{year} / December / 31}.time_since_epoch().count();
}

std::string TemporalEntity::value() const {
  if (category == TemporalCategory::Date) return begin.iso();
  return begin.iso() + "/" + end.iso();
}

void TemporalEntity::parse_value(std::string_view v, TemporalCategory category, CalendarDate& begin, CalendarDate& end) {
  if (category == TemporalCategory::Date) {
    begin = CalendarDate::parse_iso(v);
    end = begin;
    return;
  }
  const auto slash = v.find('/');
  if (slash == std::string_view::npos) throw Error(ErrorCode::MalformedInput, "period value without '/': " + std::string(v));
  begin = CalendarDate::parse_iso(v.substr(0, slash));
  end = CalendarDate::parse_iso(v.substr(slash + 1));
  if (begin.first_day() > end.last_day()) throw Error(ErrorCode::MalformedInput, "period ends before it starts: " + std::string(v));
}

}  // namespace mti
