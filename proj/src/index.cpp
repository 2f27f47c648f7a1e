#include "mti/index.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

using nlohmann::ordered_json;

namespace {

Granularity coarser(Granularity a, Granularity b) { return static_cast<int>(a) < static_cast<int>(b) ? a : b; }

Granularity granularity_from_string(const std::string& s) {
  if (s == "year") return Granularity::Year;
  if (s == "month") return Granularity::Month;
  if (s == "day") return Granularity::Day;
  throw Error(ErrorCode::MalformedInput, "unknown granularity " + s);
}

}  // namespace

IndexEntry make_index_entry(const ModsTiRecord& input) {
  ModsTiRecord r = input;
  canonicalize(r);
  IndexEntry e;
  e.doc_id = r.document.id;
  e.title = r.document.title;
  e.languages = r.document.languages;
  e.source = r.document.source;
  for (const auto& s : r.spatial) {
    SpatialPosting p;
    p.surface = s.surface;
    p.kind = s.kind;
    p.relation = s.relation;
    if (s.footprint) {
      p.gazetteer_id = s.footprint->gazetteer_id;
      p.lat = s.footprint->lat;
      p.lon = s.footprint->lon;
    }
    e.spatial.push_back(std::move(p));
  }
  for (const auto& t : r.temporal) e.temporal.push_back({t.surface, t.category, t.begin, t.end});
  for (const auto& t : r.thematic) e.thematic.push_back({t.surface, t.concept_id, t.broader_chain});
  return e;
}

std::string to_json_line(const IndexEntry& e) {
  ordered_json j;
  j["docId"] = e.doc_id;
  j["title"] = e.title;
  j["languages"] = e.languages;
  j["source"] = to_string(e.source);
  j["spatial"] = ordered_json::array();
  for (const auto& p : e.spatial) {
    ordered_json o;
    o["gazetteerId"] = p.gazetteer_id ? ordered_json(*p.gazetteer_id) : ordered_json(nullptr);
    o["surface"] = p.surface;
    o["kind"] = to_string(p.kind);
    o["relation"] = p.relation ? ordered_json(to_string(*p.relation)) : ordered_json(nullptr);
    o["lat"] = p.lat ? ordered_json(*p.lat) : ordered_json(nullptr);
    o["lon"] = p.lon ? ordered_json(*p.lon) : ordered_json(nullptr);
    j["spatial"].push_back(std::move(o));
  }
  j["temporal"] = ordered_json::array();
  for (const auto& p : e.temporal) {
    ordered_json o;
    o["surface"] = p.surface;
    o["category"] = to_string(p.category);
    o["start"] = p.start.iso();
    o["end"] = p.end.iso();
    o["granularity"] = to_string(coarser(p.start.granularity(), p.end.granularity()));
    j["temporal"].push_back(std::move(o));
  }
  j["thematic"] = ordered_json::array();
  for (const auto& p : e.thematic) {
    ordered_json o;
    o["surface"] = p.surface;
    o["concept"] = p.concept_id;
    o["broader"] = p.broader;
    j["thematic"].push_back(std::move(o));
  }
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

IndexEntry index_entry_from_json(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    IndexEntry e;
    e.doc_id = j.at("docId").get<std::string>();
    e.title = j.at("title").get<std::string>();
    e.languages = j.at("languages").get<std::vector<std::string>>();
    e.source = source_from_string(j.at("source").get<std::string>());
    for (const auto& o : j.at("spatial")) {
      SpatialPosting p;
      if (!o.at("gazetteerId").is_null()) p.gazetteer_id = o["gazetteerId"].get<std::int64_t>();
      p.surface = o.at("surface").get<std::string>();
      p.kind = spatial_kind_from_string(o.at("kind").get<std::string>());
      if (!o.at("relation").is_null()) p.relation = indicator_category_from_string(o["relation"].get<std::string>());
      if (!o.at("lat").is_null()) p.lat = o["lat"].get<double>();
      if (!o.at("lon").is_null()) p.lon = o["lon"].get<double>();
      e.spatial.push_back(std::move(p));
    }
    for (const auto& o : j.at("temporal")) {
      TemporalPosting p;
      p.surface = o.at("surface").get<std::string>();
      p.category = o.at("category").get<std::string>() == "Period" ? TemporalCategory::Period : TemporalCategory::Date;
      p.start = CalendarDate::parse_iso(o.at("start").get<std::string>());
      p.end = CalendarDate::parse_iso(o.at("end").get<std::string>());
      granularity_from_string(o.at("granularity").get<std::string>());
      e.temporal.push_back(std::move(p));
    }
    for (const auto& o : j.at("thematic")) {
      e.thematic.push_back({o.at("surface").get<std::string>(), o.at("concept").get<std::string>(),
                            o.at("broader").get<std::vector<std::string>>()});
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("index entry: ") + ex.what());
  }
}

std::string IndexSummary::to_json() const {
  ordered_json j;
  j["documents"] = documents;
  ordered_json stages_json = ordered_json::object();
  for (const auto& s : stages) stages_json[s.stage] = s.seconds;
  j["stages"] = stages_json;
  j["totalSeconds"] = total_seconds;
  j["perDocumentSeconds"] = per_document_seconds();
  return j.dump(2);
}

IndexSummary IndexSummary::from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    IndexSummary s;
    s.documents = j.at("documents").get<std::size_t>();
    for (const auto& [k, v] : j.at("stages").items()) s.stages.push_back({k, v.get<double>()});
    s.total_seconds = j.at("totalSeconds").get<double>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("index summary: ") + ex.what());
  }
}

std::filesystem::path summary_path(const std::filesystem::path& index_file) {
  return std::filesystem::path(index_file.string() + ".summary.json");
}

std::string render_index(const std::vector<ModsTiRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(make_index_entry(r));
    out += '\n';
  }
  return out;
}

IndexSummary build_index(const std::vector<ModsTiRecord>& records, const std::filesystem::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string body = render_index(records);
  write_file(out, body);
  const double index_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  IndexSummary s;
  s.documents = records.size();
  for (const auto& name : kStageNames) s.stages.push_back({name, 0});
  for (const auto& r : records) {
    if (!r.provenance) continue;
    for (const auto& st : r.provenance->stages) {
      for (auto& agg : s.stages) {
        if (agg.stage == st.stage) agg.seconds += st.seconds;
      }
    }
  }
  s.stages.back().seconds += index_seconds;
  for (const auto& st : s.stages) s.total_seconds += st.seconds;
  write_file(summary_path(out), s.to_json() + "\n");
  return s;
}

std::vector<IndexEntry> parse_index(std::string_view ndjson) {
  std::vector<IndexEntry> out;
  std::istringstream in{std::string(ndjson)};
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    out.push_back(index_entry_from_json(line));
  }
  return out;
}

std::vector<IndexEntry> load_index(const std::filesystem::path& file) { return parse_index(read_file(file)); }

namespace {

std::set<std::string> text_terms(const IndexEntry& e) {
  std::set<std::string> terms;
  auto add = [&](const std::string& s) {
    for (const auto& t : tokenize(s, "en")) {
      if (t.kind != TokenKind::Punct) terms.insert(t.folded);
    }
  };
  add(e.title);
  for (const auto& p : e.spatial) add(p.surface);
  for (const auto& p : e.temporal) add(p.surface);
  for (const auto& p : e.thematic) add(p.surface);
  return terms;
}

}  // namespace

std::vector<QueryHit> query_index(const std::vector<IndexEntry>& index, const Query& q) {
  std::vector<std::string> query_terms;
  for (const auto& t : tokenize(q.text, "en")) {
    if (t.kind != TokenKind::Punct) query_terms.push_back(t.folded);
  }
  std::vector<QueryHit> hits;
  for (const auto& e : index) {
    std::size_t score = 0;
    bool ok = true;
    if (!q.places.empty()) {
      std::size_t n = 0;
      for (const auto& p : e.spatial) {
        if (p.gazetteer_id && std::find(q.places.begin(), q.places.end(), *p.gazetteer_id) != q.places.end()) ++n;
      }
      ok = ok && n > 0;
      score += n;
    }
    if (ok && q.bbox) {
      std::size_t n = 0;
      for (const auto& p : e.spatial) {
        if (p.lat && p.lon && q.bbox->contains(*p.lat, *p.lon)) ++n;
      }
      ok = n > 0;
      score += n;
    }
    if (ok && q.period) {
      const auto lo = q.period->first.first_day();
      const auto hi = q.period->second.last_day();
      std::size_t n = 0;
      for (const auto& p : e.temporal) {
        if (p.start.first_day() <= hi && lo <= p.end.last_day()) ++n;
      }
      ok = n > 0;
      score += n;
    }
    if (ok && !q.concepts.empty()) {
      std::size_t n = 0;
      for (const auto& p : e.thematic) {
        bool m = false;
        for (const auto& c : q.concepts) {
          m = m || p.concept_id == c || std::find(p.broader.begin(), p.broader.end(), c) != p.broader.end();
        }
        if (m) ++n;
      }
      ok = n > 0;
      score += n;
    }
    if (ok && !query_terms.empty()) {
      const auto terms = text_terms(e);
      for (const auto& t : query_terms) ok = ok && terms.count(t);
      score += query_terms.size();
    }
    if (ok) hits.push_back({e.doc_id, score});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const QueryHit& a, const QueryHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  return hits;
}

}  // namespace mti
