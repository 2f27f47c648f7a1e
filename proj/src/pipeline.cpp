#include "mti/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "mti/error.hpp"
#include "mti/ingest.hpp"

#ifndef MTI_SOURCE_RESOURCES
#define MTI_SOURCE_RESOURCES "resources"
#endif

namespace mti {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineConfig PipelineConfig::defaults(const fs::path& root) {
  PipelineConfig c;
  c.rules_dir = root / "rules";
  c.gazetteer = root / "gazetteer.tsv";
  c.feature_types = root / "feature_classes.tsv";
  c.temporal_dir = root / "temporal";
  c.skos = {root / "thesaurus.skos.xml"};
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file, const fs::path& root) {
  PipelineConfig c = defaults(root);
  const fs::path base = file.parent_path();
  auto path_of = [&](const json& v) {
    fs::path p = v.get<std::string>();
    return p.is_relative() ? base / p : p;
  };
  try {
    const json j = json::parse(read_file(file));
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
    static const std::set<std::string> known = {"rulesDir", "gazetteer", "featureTypes", "temporalDir", "skos",
                                                "weights", "broaderDepth", "defaultLanguage", "yearWindow", "workers"};
    for (const auto& [k, v] : j.items()) {
      if (!known.count(k)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + k + "'");
    }
    if (j.contains("rulesDir")) c.rules_dir = path_of(j["rulesDir"]);
    if (j.contains("gazetteer")) c.gazetteer = path_of(j["gazetteer"]);
    if (j.contains("featureTypes")) c.feature_types = path_of(j["featureTypes"]);
    if (j.contains("temporalDir")) c.temporal_dir = path_of(j["temporalDir"]);
    if (j.contains("skos")) {
      c.skos.clear();
      if (j["skos"].is_array()) {
        for (const auto& s : j["skos"]) c.skos.push_back(path_of(s));
      } else {
        c.skos.push_back(path_of(j["skos"]));
      }
    }
    if (j.contains("weights")) {
      c.weights.context = j["weights"].value("context", c.weights.context);
      c.weights.importance = j["weights"].value("importance", c.weights.importance);
      if (c.weights.context < 0 || c.weights.importance < 0) throw Error(ErrorCode::InvalidArgument, "weights must be non-negative");
    }
    if (j.contains("broaderDepth")) c.broader_depth = j["broaderDepth"].get<std::size_t>();
    if (j.contains("defaultLanguage")) c.default_language = j["defaultLanguage"].get<std::string>();
    if (j.contains("yearWindow")) {
      const auto w = j["yearWindow"].get<std::vector<int>>();
      if (w.size() != 2 || w[0] > w[1]) throw Error(ErrorCode::InvalidArgument, "yearWindow must be [min, max]");
      c.temporal.min_year = w[0];
      c.temporal.max_year = w[1];
    }
    if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, file.string() + ": " + ex.what());
  }
  return c;
}

std::string PipelineConfig::to_json() const {
  json j;
  j["rulesDir"] = rules_dir.string();
  j["gazetteer"] = gazetteer.string();
  j["featureTypes"] = feature_types.string();
  j["temporalDir"] = temporal_dir.string();
  j["skos"] = json::array();
  for (const auto& s : skos) j["skos"].push_back(s.string());
  j["weights"] = {{"context", weights.context}, {"importance", weights.importance}};
  j["broaderDepth"] = broader_depth;
  j["defaultLanguage"] = default_language;
  j["yearWindow"] = {temporal.min_year, temporal.max_year};
  j["workers"] = workers;
  return j.dump(2);
}

fs::path default_data_root() {
  if (const char* env = std::getenv(kDataRootEnv); env && *env) return env;
  return MTI_SOURCE_RESOURCES;
}

PipelineConfig resolve_config(const std::optional<fs::path>& file) {
  const fs::path root = default_data_root();
  if (file) return PipelineConfig::load(*file, root);
  if (const char* env = std::getenv(kConfigEnv); env && *env) return PipelineConfig::load(env, root);
  return PipelineConfig::defaults(root);
}

std::shared_ptr<const Resources> Resources::load(const PipelineConfig& config) {
  auto r = std::make_shared<Resources>();
  r->config = config;
  r->gazetteer = Gazetteer::load(config.gazetteer);
  r->feature_types = FeatureTypeMap::load(config.feature_types);
  r->rules = RuleLibrary::load(config.rules_dir, r->gazetteer);
  r->temporal = TemporalLibrary::load(config.temporal_dir);
  std::vector<std::string> skos_docs;
  for (const auto& p : config.skos) skos_docs.push_back(read_file(p));
  r->skos = SkosStore::parse_many(skos_docs);
  return r;
}

SpatialResources Resources::spatial() const { return {&rules, &gazetteer, &feature_types, config.weights}; }

ModsTiRecord annotate_document(const Document& doc, const Resources& res, double ingest_seconds,
                               const std::optional<CalendarDate>& dct) {
  using clock = std::chrono::steady_clock;
  ModsTiRecord r;
  r.document = doc;
  Provenance p;
  p.pipeline_version = std::string(kPipelineVersion);
  p.stages.push_back({"ingest", ingest_seconds});

  auto t = clock::now();
  auto lap = [&](const char* stage) {
    const auto now = clock::now();
    p.stages.push_back({stage, std::chrono::duration<double>(now - t).count()});
    t = now;
  };
  auto spatial = annotate_spatial(doc, res.spatial());
  r.spatial = std::move(spatial.spatial);
  r.organizations = std::move(spatial.organizations);
  lap("spatial");
  r.temporal = annotate_temporal(doc, TemporalResources{&res.temporal, res.config.temporal}, dct);
  lap("temporal");
  r.thematic = annotate_thematic(doc, res.skos, res.config.broader_depth);
  lap("thematic");

  for (const auto& s : p.stages) p.total_seconds += s.seconds;
  r.provenance = std::move(p);
  canonicalize(r);
  return r;
}

std::vector<DocumentOutcome> run_pipeline(const std::vector<InputDocument>& inputs, const Resources& res,
                                          const ProgressFn& progress) {
  std::vector<DocumentOutcome> out(inputs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      const auto& in = inputs[i];
      DocumentOutcome& o = out[i];
      o.name = in.name;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const SourceFormat fmt = in.format ? *in.format : detect_format(in.bytes);
        IngestOptions opts;
        opts.default_language = res.config.default_language;
        opts.source = in.source;
        opts.fallback_id = fs::path(in.name).stem().string();
        const Document doc = parse_document(in.bytes, fmt, opts);
        const double ingest = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.record = annotate_document(doc, res, ingest);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, inputs.size());
      }
    }
  };

  std::size_t workers = res.config.workers ? res.config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(inputs.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::set<std::string> seen;
  for (auto& o : out) {
    if (!o.record) continue;
    if (!seen.insert(o.record->document.id).second) {
      o.error = Error(ErrorCode::DuplicateId, "duplicate document id " + o.record->document.id).what();
      o.record.reset();
    }
  }
  return out;
}

std::vector<InputDocument> inputs_from_manifest(const fs::path& manifest) {
  std::vector<InputDocument> out;
  for (const auto& e : read_manifest(manifest)) {
    InputDocument in;
    in.name = e.path.filename().string();
    in.bytes = read_file(e.path);
    in.source = e.source;
    out.push_back(std::move(in));
  }
  return out;
}

std::string file_name_for(std::string_view id) {
  const bool safe = !id.empty() && id.size() <= 120 && id.front() != '.' &&
                    std::all_of(id.begin(), id.end(), [](char c) {
                      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                             c == '_' || c == '.';
                    });
  if (safe) return std::string(id);
  std::string s;
  for (const char c : id.substr(0, 80)) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    s += keep ? c : '_';
  }
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "-%016llx", static_cast<unsigned long long>(h));
  return s + buf;
}

}  // namespace mti
