#include "mti/gazetteer.hpp"

#include <algorithm>
#include <sstream>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"

namespace mti {

namespace {

constexpr FeatureClass kAllClasses[] = {FeatureClass::Country, FeatureClass::Admin, FeatureClass::City,
                                        FeatureClass::Stream,  FeatureClass::Lake,  FeatureClass::Gulf,
                                        FeatureClass::Ocean,   FeatureClass::Island, FeatureClass::Region,
                                        FeatureClass::Other};

}  // namespace

std::string_view to_string(FeatureClass c) {
  switch (c) {
    case FeatureClass::Country: return "Country";
    case FeatureClass::Admin: return "Admin";
    case FeatureClass::City: return "City";
    case FeatureClass::Stream: return "Stream";
    case FeatureClass::Lake: return "Lake";
    case FeatureClass::Gulf: return "Gulf";
    case FeatureClass::Ocean: return "Ocean";
    case FeatureClass::Island: return "Island";
    case FeatureClass::Region: return "Region";
    case FeatureClass::Other: return "Other";
  }
  return "Other";
}

FeatureClass feature_class_from_string(std::string_view s) {
  for (const auto c : kAllClasses) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown feature class '" + std::string(s) + "'");
}

Gazetteer Gazetteer::load(const std::filesystem::path& tsv) { return parse(read_file(tsv)); }

Gazetteer Gazetteer::parse(std::string_view tsv) {
  Gazetteer g;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + why);
    };
    const auto cols = text::split(line, '\t');
    if (cols.size() != 8) throw bad("expected 8 columns, found " + std::to_string(cols.size()));
    GazetteerEntry e;
    try {
      e.id = text::parse_int(cols[0]);
      e.lat = text::parse_double(cols[4]);
      e.lon = text::parse_double(cols[5]);
      e.importance = text::parse_int(cols[7]);
      e.feature_class = feature_class_from_string(cols[3]);
    } catch (const Error& err) {
      throw bad(err.what());
    }
    e.name = text::trim(cols[1]);
    if (e.name.empty()) throw bad("empty name");
    for (const auto& alt : text::split(cols[2], ',')) {
      const std::string t = text::trim(alt);
      if (!t.empty()) e.alt_names.push_back(t);
    }
    if (e.lat < -90 || e.lat > 90) throw bad("latitude out of range");
    if (e.lon < -180 || e.lon > 180) throw bad("longitude out of range");
    if (e.importance < 0) throw bad("negative importance");
    e.country = text::trim(cols[6]);
    if (g.by_id_.count(e.id)) throw Error(ErrorCode::DuplicateId, "gazetteer id " + std::to_string(e.id) + " repeated at row " + std::to_string(row));

    const std::size_t index = g.entries_.size();
    g.by_id_[e.id] = index;
    std::set<std::string> keys{text::fold(e.name)};
    for (const auto& alt : e.alt_names) keys.insert(text::fold(alt));
    for (const auto& k : keys) g.by_name_[k].push_back(index);
    g.entries_.push_back(std::move(e));
  }
  return g;
}

std::vector<GazetteerEntry> Gazetteer::lookup(std::string_view name, const std::optional<std::set<FeatureClass>>& filter) const {
  std::vector<GazetteerEntry> out;
  const auto it = by_name_.find(text::fold(text::trim(name)));
  if (it == by_name_.end()) return out;
  for (const auto index : it->second) {
    const auto& e = entries_[index];
    if (filter && !filter->count(e.feature_class)) continue;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const GazetteerEntry& a, const GazetteerEntry& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.id < b.id;
  });
  return out;
}

const GazetteerEntry* Gazetteer::find(std::int64_t id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<std::string> Gazetteer::names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (seen.insert(e.name).second) out.push_back(e.name);
    for (const auto& a : e.alt_names) {
      if (seen.insert(a).second) out.push_back(a);
    }
  }
  return out;
}

FeatureTypeMap FeatureTypeMap::load(const std::filesystem::path& tsv) { return parse(read_file(tsv)); }

FeatureTypeMap FeatureTypeMap::parse(std::string_view tsv) {
  FeatureTypeMap m;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = text::split(t, '\t');
    if (cols.size() != 2) throw Error(ErrorCode::MalformedRow, "feature type map row " + std::to_string(row));
    std::set<FeatureClass> classes;
    for (const auto& c : text::split(cols[1], ',')) classes.insert(feature_class_from_string(text::trim(c)));
    m.add(cols[0], std::move(classes));
  }
  return m;
}

void FeatureTypeMap::add(std::string_view term, std::set<FeatureClass> classes) {
  auto& slot = map_[text::fold(text::trim(term))];
  slot.insert(classes.begin(), classes.end());
}

std::set<FeatureClass> FeatureTypeMap::classes_for(std::string_view term) const {
  const auto it = map_.find(text::fold(text::trim(term)));
  return it == map_.end() ? std::set<FeatureClass>{} : it->second;
}

}  // namespace mti
