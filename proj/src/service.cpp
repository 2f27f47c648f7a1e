#include "mti/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "mti/archive.hpp"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"

namespace mti {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(ReviewFlag f) {
  switch (f) {
    case ReviewFlag::Pending: return "Pending";
    case ReviewFlag::Accepted: return "Accepted";
    case ReviewFlag::Rejected: return "Rejected";
  }
  return "Pending";
}

ReviewFlag review_flag_from_string(std::string_view s) {
  for (const auto f : {ReviewFlag::Pending, ReviewFlag::Accepted, ReviewFlag::Rejected}) {
    if (to_string(f) == s) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown review decision '" + std::string(s) + "'");
}

std::string_view to_string(CorpusStatus s) {
  switch (s) {
    case CorpusStatus::Queued: return "Queued";
    case CorpusStatus::Running: return "Running";
    case CorpusStatus::Done: return "Done";
    case CorpusStatus::Failed: return "Failed";
  }
  return "Queued";
}

CorpusStatus corpus_status_from_string(std::string_view s) {
  for (const auto v : {CorpusStatus::Queued, CorpusStatus::Running, CorpusStatus::Done, CorpusStatus::Failed}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown corpus status '" + std::string(s) + "'");
}

std::string_view to_string(AnnotationCategory c) {
  switch (c) {
    case AnnotationCategory::Spatial: return "Spatial";
    case AnnotationCategory::Organization: return "Organization";
    case AnnotationCategory::Temporal: return "Temporal";
    case AnnotationCategory::Thematic: return "Thematic";
  }
  return "Spatial";
}

AnnotationCategory annotation_category_from_string(std::string_view s) {
  for (const auto c : {AnnotationCategory::Spatial, AnnotationCategory::Organization, AnnotationCategory::Temporal,
                       AnnotationCategory::Thematic}) {
    if (text::fold(to_string(c)) == text::fold(s)) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown annotation category '" + std::string(s) + "'");
}

struct ReviewService::Corpus {
  std::string id;
  std::string name;
  fs::path dir;

  mutable std::mutex m;
  CorpusStatus status = CorpusStatus::Queued;
  std::string stage = "queued";
  std::size_t total = 0;
  std::size_t processed = 0;
  std::string error;
  std::optional<SourceFormat> format;
  std::optional<Source> source;
  std::vector<std::string> originals;
  std::vector<CorpusDocument> docs;
  std::map<std::string, ModsTiRecord> records;
  std::map<std::string, std::map<std::string, ReviewFlag>> flags;
  ordered_json stats;

  CorpusSummary summary() const {
    CorpusSummary s;
    s.id = id;
    s.name = name;
    s.status = status;
    s.total = total;
    s.processed = processed;
    s.failed = static_cast<std::size_t>(std::count_if(docs.begin(), docs.end(), [](const auto& d) { return d.failed; }));
    s.stage = stage;
    s.error = error;
    return s;
  }
};

namespace {

void write_atomically(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

std::string original_name(std::size_t index, const std::string& name) {
  std::string safe;
  for (const char c : fs::path(name).filename().string()) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    safe += keep ? c : '_';
  }
  if (safe.empty() || safe.front() == '.') safe = "file" + safe;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%04zu-", index + 1);
  return prefix + safe;
}

bool has_annotation(const ModsTiRecord& r, const std::string& id) {
  auto match = [&](const auto& v) { return std::any_of(v.begin(), v.end(), [&](const auto& a) { return a.id == id; }); };
  return match(r.spatial) || match(r.organizations) || match(r.temporal) || match(r.thematic);
}

ordered_json span_json(const std::string& id, AnnotationCategory cat, std::size_t segment, const Span& span,
                       const std::string& surface) {
  ordered_json j;
  j["id"] = id;
  j["category"] = to_string(cat);
  j["segment"] = segment;
  j["start"] = span.start;
  j["end"] = span.end;
  j["surface"] = surface;
  return j;
}

}  // namespace

ReviewService::ReviewService(fs::path data_dir, std::shared_ptr<const Resources> resources)
    : data_dir_(std::move(data_dir)), resources_(std::move(resources)) {
  std::error_code ec;
  fs::create_directories(data_dir_ / "corpora", ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (data_dir_ / "corpora").string() + ": " + ec.message());
  load_existing();
}

ReviewService::~ReviewService() { wait_idle(); }

void ReviewService::wait_idle() {
  std::vector<std::jthread> jobs;
  {
    std::lock_guard lock(mutex_);
    jobs.swap(jobs_);
  }
  for (auto& j : jobs) {
    if (j.joinable()) j.join();
  }
}

void ReviewService::persist(const Corpus& c) const {
  ordered_json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  j["stage"] = c.stage;
  j["total"] = c.total;
  j["processed"] = c.processed;
  j["error"] = c.error;
  j["format"] = c.format ? ordered_json(to_string(*c.format)) : ordered_json(nullptr);
  j["source"] = c.source ? ordered_json(to_string(*c.source)) : ordered_json(nullptr);
  j["originals"] = c.originals;
  j["documents"] = ordered_json::array();
  for (const auto& d : c.docs) {
    j["documents"].push_back(
        {{"name", d.name}, {"docId", d.doc_id}, {"file", d.file}, {"failed", d.failed}, {"error", d.error}});
  }
  j["stats"] = c.stats;
  write_atomically(c.dir / "corpus.json", j.dump(2) + "\n");
}

void ReviewService::load_existing() {
  std::vector<std::shared_ptr<Corpus>> restart;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(data_dir_ / "corpora")) {
    if (entry.is_directory() && fs::exists(entry.path() / "corpus.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    auto c = std::make_shared<Corpus>();
    c->dir = dir;
    try {
      const auto j = ordered_json::parse(read_file(dir / "corpus.json"));
      c->id = j.at("id").get<std::string>();
      c->name = j.value("name", "");
      c->status = corpus_status_from_string(j.at("status").get<std::string>());
      c->stage = j.value("stage", "");
      c->total = j.value("total", std::size_t{0});
      c->processed = j.value("processed", std::size_t{0});
      c->error = j.value("error", "");
      if (!j.at("format").is_null()) c->format = format_from_string(j["format"].get<std::string>());
      if (!j.at("source").is_null()) c->source = source_from_string(j["source"].get<std::string>());
      c->originals = j.at("originals").get<std::vector<std::string>>();
      for (const auto& d : j.at("documents")) {
        c->docs.push_back({d.at("name").get<std::string>(), d.at("docId").get<std::string>(),
                           d.at("file").get<std::string>(), d.at("failed").get<bool>(), d.at("error").get<std::string>()});
      }
      c->stats = j.value("stats", ordered_json());
    } catch (const std::exception& e) {
      continue;  // unreadable corpus directory: skipped, left on disk
    }
    if (c->status == CorpusStatus::Done) {
      for (const auto& d : c->docs) {
        if (d.failed) continue;
        c->records[d.doc_id] = parse_mods_ti_xml(read_file(dir / "annotated" / d.file));
      }
      if (fs::exists(dir / "reviews.log")) {
        std::string journal = read_file(dir / "reviews.log");
        if (!journal.empty() && journal.back() != '\n') {
          // drop the torn tail so the next append starts on a fresh line
          const auto last = journal.rfind('\n');
          journal.erase(last == std::string::npos ? 0 : last + 1);
          write_file(dir / "reviews.log", journal);
        }
        std::istringstream in(journal);
        std::string line;
        while (std::getline(in, line)) {
          if (text::trim(line).empty()) continue;
          try {
            const auto r = ordered_json::parse(line);
            c->flags[r.at("doc").get<std::string>()][r.at("annotation").get<std::string>()] =
                review_flag_from_string(r.at("decision").get<std::string>());
          } catch (const std::exception&) {
            // an unparsable line carries no decision
          }
        }
      }
    } else if (c->status != CorpusStatus::Failed) {
      restart.push_back(c);
    }
    corpora_[c->id] = c;
    const auto dash = c->id.rfind('-');
    if (dash != std::string::npos) {
      try {
        next_id_ = std::max<std::size_t>(next_id_, static_cast<std::size_t>(text::parse_int(c->id.substr(dash + 1))) + 1);
      } catch (const Error&) {
      }
    }
  }
  for (const auto& c : restart) start_job(c);
}

std::string ReviewService::upload_corpus(const UploadRequest& req) {
  if (req.files.empty()) throw Error(ErrorCode::EmptyUpload, "upload contains no files");
  if (!req.format) {
    bool any = false;
    for (const auto& f : req.files) {
      try {
        detect_format(f.bytes);
        any = true;
        break;
      } catch (const Error&) {
      }
    }
    if (!any) throw Error(ErrorCode::UnrecognizedFormat, "no uploaded file matches a supported format");
  }

  auto c = std::make_shared<Corpus>();
  {
    std::lock_guard lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "corpus-%04zu", next_id_++);
    c->id = buf;
  }
  c->name = req.name.empty() ? c->id : req.name;
  c->dir = data_dir_ / "corpora" / c->id;
  c->format = req.format;
  c->source = req.source;
  c->total = req.files.size();
  fs::create_directories(c->dir / "originals");
  fs::create_directories(c->dir / "annotated");
  for (std::size_t i = 0; i < req.files.size(); ++i) {
    const std::string n = original_name(i, req.files[i].name);
    write_file(c->dir / "originals" / n, req.files[i].bytes);
    c->originals.push_back(n);
  }
  persist(*c);
  {
    std::lock_guard lock(mutex_);
    corpora_[c->id] = c;
  }
  start_job(c);
  return c->id;
}

void ReviewService::start_job(const std::shared_ptr<Corpus>& c) {
  std::lock_guard lock(mutex_);
  jobs_.emplace_back([this, c] { run_job(c); });
}

void ReviewService::run_job(const std::shared_ptr<Corpus>& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<InputDocument> inputs;
  {
    std::lock_guard lock(c->m);
    c->status = CorpusStatus::Running;
    c->stage = "annotate";
    c->processed = 0;
    c->docs.clear();
    c->records.clear();
    c->flags.clear();
    persist(*c);
  }
  try {
    for (const auto& n : c->originals) {
      InputDocument in;
      in.name = n.size() > 5 ? n.substr(5) : n;
      in.bytes = read_file(c->dir / "originals" / n);
      in.format = c->format;
      in.source = c->source;
      inputs.push_back(std::move(in));
    }
    auto outcomes = run_pipeline(inputs, *resources_, [&](std::size_t done, std::size_t) {
      std::lock_guard lock(c->m);
      c->processed = done;
    });

    std::vector<CorpusDocument> docs;
    std::map<std::string, ModsTiRecord> records;
    std::vector<ModsTiRecord> ordered;
    for (auto& o : outcomes) {
      CorpusDocument d;
      d.name = o.name;
      if (o.record) {
        d.doc_id = o.record->document.id;
        d.file = file_name_for(d.doc_id) + ".xml";
        write_file(c->dir / "annotated" / d.file, to_mods_ti_xml(*o.record));
        ordered.push_back(*o.record);
        records[d.doc_id] = std::move(*o.record);
      } else {
        d.failed = true;
        d.error = o.error;
      }
      docs.push_back(std::move(d));
    }
    {
      std::lock_guard lock(c->m);
      c->stage = "index";
    }
    const IndexSummary summary = build_index(ordered, c->dir / "index.ndjson");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ordered_json stats;
    stats["corpusId"] = c->id;
    stats["documents"] = summary.documents;
    ordered_json stages = ordered_json::object();
    for (const auto& s : summary.stages) stages[s.stage] = s.seconds;
    stats["stages"] = stages;
    stats["totalSeconds"] = summary.total_seconds;
    stats["perDocumentSeconds"] = summary.per_document_seconds();
    stats["wallSeconds"] = wall;
    stats["workers"] = resources_->config.workers;

    std::lock_guard lock(c->m);
    c->docs = std::move(docs);
    c->records = std::move(records);
    c->stats = std::move(stats);
    c->status = c->records.empty() ? CorpusStatus::Failed : CorpusStatus::Done;
    c->stage = c->records.empty() ? "failed" : "done";
    if (c->records.empty()) c->error = "no document could be processed";
    persist(*c);
  } catch (const std::exception& e) {
    std::lock_guard lock(c->m);
    c->status = CorpusStatus::Failed;
    c->stage = "failed";
    c->error = e.what();
    try {
      persist(*c);
    } catch (const std::exception&) {
    }
  }
}

std::shared_ptr<ReviewService::Corpus> ReviewService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = corpora_.find(id);
  if (it == corpora_.end()) throw Error(ErrorCode::NotFound, "no corpus " + id);
  return it->second;
}

std::shared_ptr<ReviewService::Corpus> ReviewService::find_done(const std::string& id) const {
  auto c = find(id);
  std::lock_guard lock(c->m);
  if (c->status != CorpusStatus::Done) {
    throw Error(ErrorCode::CorpusNotDone, "corpus " + id + " is " + std::string(to_string(c->status)));
  }
  return c;
}

std::vector<CorpusSummary> ReviewService::list_corpora() const {
  std::vector<std::shared_ptr<Corpus>> all;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, c] : corpora_) all.push_back(c);
  }
  std::vector<CorpusSummary> out;
  for (const auto& c : all) {
    std::lock_guard lock(c->m);
    out.push_back(c->summary());
  }
  return out;
}

CorpusSummary ReviewService::corpus(const std::string& id) const {
  auto c = find(id);
  std::lock_guard lock(c->m);
  return c->summary();
}

std::vector<CorpusDocument> ReviewService::documents(const std::string& id) const {
  auto c = find(id);
  std::lock_guard lock(c->m);
  return c->docs;
}

ordered_json ReviewService::get_document(const std::string& corpus_id, const std::string& doc_id,
                                         const std::optional<std::set<AnnotationCategory>>& categories) const {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  const auto it = c->records.find(doc_id);
  if (it == c->records.end()) throw Error(ErrorCode::NotFound, "no document " + doc_id + " in " + corpus_id);
  const ModsTiRecord& r = it->second;
  const auto fit = c->flags.find(doc_id);
  auto flag_of = [&](const std::string& aid) {
    if (fit == c->flags.end()) return ReviewFlag::Pending;
    const auto f = fit->second.find(aid);
    return f == fit->second.end() ? ReviewFlag::Pending : f->second;
  };
  auto wanted = [&](AnnotationCategory cat) { return !categories || categories->count(cat) > 0; };

  ordered_json j;
  j["corpusId"] = corpus_id;
  j["docId"] = doc_id;
  j["title"] = r.document.title;
  j["source"] = to_string(r.document.source);
  j["languages"] = r.document.languages;
  j["segments"] = ordered_json::array();
  for (std::size_t i = 0; i < r.document.abstracts.size(); ++i) {
    j["segments"].push_back({{"index", i}, {"lang", r.document.abstracts[i].lang}, {"text", r.document.abstracts[i].text}});
  }
  ordered_json anns = ordered_json::array();
  if (wanted(AnnotationCategory::Spatial)) {
    for (const auto& e : r.spatial) {
      auto a = span_json(e.id, AnnotationCategory::Spatial, e.segment, e.span, e.surface);
      a["confidence"] = e.confidence;
      a["flag"] = to_string(flag_of(e.id));
      ordered_json p;
      p["kind"] = to_string(e.kind);
      p["relation"] = e.relation ? ordered_json(to_string(*e.relation)) : ordered_json(nullptr);
      p["head"] = e.head;
      p["rule"] = e.rule;
      p["indicators"] = ordered_json::array();
      for (const auto& ind : e.indicators) {
        p["indicators"].push_back({{"surface", ind.surface},
                                   {"category", to_string(ind.category)},
                                   {"start", ind.span.start},
                                   {"end", ind.span.end}});
      }
      p["anchors"] = e.anchors;
      p["candidates"] = e.candidates;
      if (e.footprint) {
        p["footprint"] = {{"gazetteerId", e.footprint->gazetteer_id}, {"lat", e.footprint->lat}, {"lon", e.footprint->lon}};
      } else {
        p["footprint"] = nullptr;
      }
      a["payload"] = p;
      anns.push_back(std::move(a));
    }
  }
  if (wanted(AnnotationCategory::Organization)) {
    for (const auto& e : r.organizations) {
      auto a = span_json(e.id, AnnotationCategory::Organization, e.segment, e.span, e.surface);
      a["confidence"] = 1.0;
      a["flag"] = to_string(flag_of(e.id));
      a["payload"] = {{"trigger", e.trigger}};
      anns.push_back(std::move(a));
    }
  }
  if (wanted(AnnotationCategory::Temporal)) {
    for (const auto& e : r.temporal) {
      auto a = span_json(e.id, AnnotationCategory::Temporal, e.segment, e.span, e.surface);
      a["confidence"] = 1.0;
      a["flag"] = to_string(flag_of(e.id));
      a["payload"] = {{"category", to_string(e.category)}, {"value", e.value()}, {"start", e.begin.iso()}, {"end", e.end.iso()}};
      anns.push_back(std::move(a));
    }
  }
  if (wanted(AnnotationCategory::Thematic)) {
    for (const auto& e : r.thematic) {
      auto a = span_json(e.id, AnnotationCategory::Thematic, e.segment, e.span, e.surface);
      a["confidence"] = 1.0;
      a["flag"] = to_string(flag_of(e.id));
      a["payload"] = {{"concept", e.concept_id}, {"matchedVia", to_string(e.matched_via)}, {"broader", e.broader_chain}};
      anns.push_back(std::move(a));
    }
  }
  j["annotations"] = std::move(anns);
  return j;
}

ReviewFlag ReviewService::review_annotation(const std::string& corpus_id, const std::string& doc_id,
                                            const std::string& annotation_id, ReviewFlag decision) {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  const auto it = c->records.find(doc_id);
  if (it == c->records.end()) throw Error(ErrorCode::NotFound, "no document " + doc_id + " in " + corpus_id);
  if (!has_annotation(it->second, annotation_id)) {
    throw Error(ErrorCode::NotFound, "no annotation " + annotation_id + " in " + doc_id);
  }
  auto& doc_flags = c->flags[doc_id];
  const auto cur = doc_flags.find(annotation_id);
  const ReviewFlag current = cur == doc_flags.end() ? ReviewFlag::Pending : cur->second;
  if (current == decision) return decision;
  ordered_json line{{"doc", doc_id}, {"annotation", annotation_id}, {"decision", to_string(decision)}};
  std::ofstream log(c->dir / "reviews.log", std::ios::app | std::ios::binary);
  log << line.dump() << "\n";
  log.flush();
  if (!log) throw Error(ErrorCode::IoFailure, "cannot append to review journal of " + corpus_id);
  doc_flags[annotation_id] = decision;
  return decision;
}

ReviewFlag ReviewService::flag(const std::string& corpus_id, const std::string& doc_id,
                               const std::string& annotation_id) const {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  const auto it = c->records.find(doc_id);
  if (it == c->records.end() || !has_annotation(it->second, annotation_id)) {
    throw Error(ErrorCode::NotFound, "no annotation " + annotation_id + " in " + doc_id);
  }
  const auto fit = c->flags.find(doc_id);
  if (fit == c->flags.end()) return ReviewFlag::Pending;
  const auto f = fit->second.find(annotation_id);
  return f == fit->second.end() ? ReviewFlag::Pending : f->second;
}

namespace {

// Drops rejected annotations. A relative entity loses rejected anchors and
// is dropped with the last one.
ModsTiRecord apply_review(ModsTiRecord r, const std::map<std::string, ReviewFlag>* flags) {
  if (flags == nullptr) return r;
  auto rejected = [&](const std::string& id) {
    const auto it = flags->find(id);
    return it != flags->end() && it->second == ReviewFlag::Rejected;
  };
  std::erase_if(r.spatial, [&](const SpatialEntity& e) { return rejected(e.id); });
  for (auto& e : r.spatial) std::erase_if(e.anchors, rejected);
  std::erase_if(r.spatial, [](const SpatialEntity& e) { return e.kind == SpatialKind::Relative && e.anchors.empty(); });
  std::erase_if(r.organizations, [&](const OrganizationEntity& e) { return rejected(e.id); });
  std::erase_if(r.temporal, [&](const TemporalEntity& e) { return rejected(e.id); });
  std::erase_if(r.thematic, [&](const ThematicEntity& e) { return rejected(e.id); });
  return r;
}

}  // namespace

ModsTiRecord ReviewService::reviewed_record(const std::string& corpus_id, const std::string& doc_id) const {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  const auto it = c->records.find(doc_id);
  if (it == c->records.end()) throw Error(ErrorCode::NotFound, "no document " + doc_id + " in " + corpus_id);
  const auto fit = c->flags.find(doc_id);
  return apply_review(it->second, fit == c->flags.end() ? nullptr : &fit->second);
}

std::string ReviewService::export_corpus(const std::string& corpus_id,
                                         const std::optional<std::vector<std::string>>& selection) const {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  std::vector<std::string> ids;
  if (selection) {
    for (const auto& id : *selection) {
      if (!c->records.count(id)) throw Error(ErrorCode::NotFound, "no document " + id + " in " + corpus_id);
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
  } else {
    for (const auto& d : c->docs) {
      if (!d.failed) ids.push_back(d.doc_id);
    }
  }
  std::vector<tar::Entry> entries;
  ordered_json manifest;
  manifest["corpusId"] = corpus_id;
  manifest["name"] = c->name;
  manifest["schema"] = std::string(kModsTiSystemId);
  manifest["documents"] = ordered_json::array();
  std::vector<tar::Entry> docs;
  for (const auto& id : ids) {
    const auto fit = c->flags.find(id);
    const ModsTiRecord r = apply_review(c->records.at(id), fit == c->flags.end() ? nullptr : &fit->second);
    const std::string file = "docs/" + file_name_for(id) + ".xml";
    manifest["documents"].push_back({{"docId", id}, {"file", file}});
    docs.push_back({file, to_mods_ti_xml(r)});
  }
  entries.push_back({"manifest.json", manifest.dump(2) + "\n"});
  entries.push_back({std::string(kModsTiSystemId), std::string(mods_ti_dtd_text())});
  for (auto& d : docs) entries.push_back(std::move(d));
  return tar::write(entries);
}

ordered_json ReviewService::run_stats(const std::string& corpus_id) const {
  auto c = find_done(corpus_id);
  std::lock_guard lock(c->m);
  return c->stats;
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  ReviewService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(ReviewService& s) : service(s) {}
};

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownDocId: return 404;
    case ErrorCode::CorpusNotDone: return 409;
    case ErrorCode::UnrecognizedFormat: return 415;
    case ErrorCode::IoFailure: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, const ordered_json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(2), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"error", to_string(code)}, {"message", message}}, http_status(code));
}

template <typename F>
void guarded(httplib::Response& res, F f) {
  try {
    f();
  } catch (const Error& e) {
    send_error(res, e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, ErrorCode::InvalidArgument, e.what());
  } catch (const std::exception& e) {
    send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
  }
}

ordered_json summary_json(const CorpusSummary& s) {
  ordered_json j;
  j["corpusId"] = s.id;
  j["name"] = s.name;
  j["status"] = to_string(s.status);
  j["documents"] = s.total;
  j["failed"] = s.failed;
  j["progress"] = {{"stage", s.stage}, {"processed", s.processed}, {"total", s.total}};
  if (!s.error.empty()) j["message"] = s.error;
  return j;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& s : text::split(v, ',')) {
    auto t = text::trim(s);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

UploadRequest upload_from(const httplib::Request& req) {
  UploadRequest u;
  auto set_format = [&](const std::string& f) {
    if (!f.empty()) u.format = format_from_string(f);
  };
  auto set_source = [&](const std::string& s) {
    if (!s.empty()) u.source = source_from_string(s);
  };
  if (req.is_multipart_form_data()) {
    for (const auto& [key, part] : req.files) {
      if (!part.filename.empty()) {
        u.files.push_back({part.filename, part.content});
      } else if (key == "format") {
        set_format(text::trim(part.content));
      } else if (key == "source") {
        set_source(text::trim(part.content));
      } else if (key == "name") {
        u.name = text::trim(part.content);
      }
    }
    return u;
  }
  const auto j = ordered_json::parse(req.body);
  u.name = j.value("name", "");
  if (j.contains("format") && !j["format"].is_null()) set_format(j["format"].get<std::string>());
  if (j.contains("source") && !j["source"].is_null()) set_source(j["source"].get<std::string>());
  if (j.contains("files")) {
    for (const auto& f : j["files"]) u.files.push_back({f.value("name", "upload"), f.at("content").get<std::string>()});
  }
  return u;
}

}  // namespace

HttpServer::HttpServer(ReviewService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.set_payload_max_length(512ull * 1024 * 1024);

  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Post("/corpora", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = svc.upload_corpus(upload_from(req));
      send_json(res, summary_json(svc.corpus(id)), 201);
    });
  });

  srv.Get("/corpora", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      ordered_json out = ordered_json::array();
      for (const auto& s : svc.list_corpora()) out.push_back(summary_json(s));
      send_json(res, out);
    });
  });

  srv.Get(R"(/corpora/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      ordered_json j = summary_json(svc.corpus(id));
      j["documentList"] = ordered_json::array();
      for (const auto& d : svc.documents(id)) {
        ordered_json dj{{"name", d.name}, {"docId", d.doc_id}, {"status", d.failed ? "Failed" : "Done"}};
        if (d.failed) dj["message"] = d.error;
        j["documentList"].push_back(std::move(dj));
      }
      send_json(res, j);
    });
  });

  srv.Get(R"(/corpora/([^/]+)/documents/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::set<AnnotationCategory>> cats;
      if (req.has_param("categories")) {
        cats.emplace();
        for (const auto& s : split_list(req.get_param_value("categories"))) cats->insert(annotation_category_from_string(s));
      }
      send_json(res, svc.get_document(req.matches[1], req.matches[2], cats));
    });
  });

  srv.Post(R"(/corpora/([^/]+)/documents/([^/]+)/annotations/([^/]+)/review)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto j = ordered_json::parse(req.body);
               const auto decision = review_flag_from_string(j.at("decision").get<std::string>());
               if (decision == ReviewFlag::Pending) {
                 throw Error(ErrorCode::InvalidArgument, "decision must be Accepted or Rejected");
               }
               const auto flag = svc.review_annotation(req.matches[1], req.matches[2], req.matches[3], decision);
               send_json(res, {{"annotationId", std::string(req.matches[3])}, {"flag", to_string(flag)}});
             });
           });

  srv.Get(R"(/corpora/([^/]+)/export)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::vector<std::string>> selection;
      if (req.has_param("docs")) selection = split_list(req.get_param_value("docs"));
      const std::string id = req.matches[1];
      res.set_content(svc.export_corpus(id, selection), "application/x-tar");
      res.set_header("Content-Disposition", "attachment; filename=\"" + id + "-mods-ti.tar\"");
    });
  });

  srv.Get(R"(/corpora/([^/]+)/stats)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, svc.run_stats(req.matches[1])); });
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::IoFailure, "cannot bind to " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace mti
