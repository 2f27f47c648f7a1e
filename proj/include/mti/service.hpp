#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mti/document.hpp"
#include "mti/index.hpp"
#include "mti/modsti.hpp"
#include "mti/pipeline.hpp"

namespace mti {

enum class ReviewFlag { Pending, Accepted, Rejected };
enum class CorpusStatus { Queued, Running, Done, Failed };
enum class AnnotationCategory { Spatial, Organization, Temporal, Thematic };

std::string_view to_string(ReviewFlag f);
ReviewFlag review_flag_from_string(std::string_view s);  // throws Error(InvalidArgument)
std::string_view to_string(CorpusStatus s);
CorpusStatus corpus_status_from_string(std::string_view s);
std::string_view to_string(AnnotationCategory c);
AnnotationCategory annotation_category_from_string(std::string_view s);

struct UploadFile {
  std::string name;
  std::string bytes;
};

struct UploadRequest {
  std::string name;
  std::vector<UploadFile> files;
  std::optional<SourceFormat> format;  // declared; detected per file when absent
  std::optional<Source> source;
};

struct CorpusDocument {
  std::string name;   // upload name
  std::string doc_id;  // empty for failed documents without a parsed id
  std::string file;   // annotated file name under annotated/
  bool failed = false;
  std::string error;
};

struct CorpusSummary {
  std::string id;
  std::string name;
  CorpusStatus status = CorpusStatus::Queued;
  std::size_t total = 0;
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::string stage;  // "queued", "annotate", "index", "done", "failed"
  std::string error;
};

/// Backend of the review workflow. Each corpus lives in a flat directory
/// under `<data>/corpora/<id>/`: the uploaded originals, one MODS-TI file per
/// document, the NDJSON index, `corpus.json`, and `reviews.log` (append-only
/// review decisions, replayed on start).
class ReviewService {
 public:
  ReviewService(std::filesystem::path data_dir, std::shared_ptr<const Resources> resources);
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Persists the files and starts the annotation job. Throws
  /// Error(EmptyUpload) or Error(UnrecognizedFormat) when no file has a
  /// recognizable format.
  std::string upload_corpus(const UploadRequest& request);

  std::vector<CorpusSummary> list_corpora() const;
  CorpusSummary corpus(const std::string& corpus_id) const;
  std::vector<CorpusDocument> documents(const std::string& corpus_id) const;

  /// Text, annotations of the selected categories (all when absent) and
  /// review flags. Throws Error(NotFound) or Error(CorpusNotDone).
  nlohmann::ordered_json get_document(const std::string& corpus_id, const std::string& doc_id,
                                      const std::optional<std::set<AnnotationCategory>>& categories = std::nullopt) const;

  /// Last write wins; repeating a decision is a no-op.
  ReviewFlag review_annotation(const std::string& corpus_id, const std::string& doc_id,
                               const std::string& annotation_id, ReviewFlag decision);
  ReviewFlag flag(const std::string& corpus_id, const std::string& doc_id, const std::string& annotation_id) const;

  /// Tar archive: manifest.json, mods-ti.dtd and docs/<file>.xml holding the
  /// Pending and Accepted annotations of each selected document (all
  /// documents when `selection` is absent).
  std::string export_corpus(const std::string& corpus_id,
                            const std::optional<std::vector<std::string>>& selection = std::nullopt) const;

  /// Record after applying review decisions.
  ModsTiRecord reviewed_record(const std::string& corpus_id, const std::string& doc_id) const;

  /// Stage seconds (ingest, spatial, temporal, thematic, index), their
  /// total, per-document mean and wall-clock seconds of the job.
  nlohmann::ordered_json run_stats(const std::string& corpus_id) const;

  /// Blocks until every started job has finished.
  void wait_idle();

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct Corpus;
  std::shared_ptr<Corpus> find(const std::string& id) const;
  std::shared_ptr<Corpus> find_done(const std::string& id) const;
  void start_job(const std::shared_ptr<Corpus>& c);
  void run_job(const std::shared_ptr<Corpus>& c);
  void persist(const Corpus& c) const;
  void load_existing();

  std::filesystem::path data_dir_;
  std::shared_ptr<const Resources> resources_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Corpus>> corpora_;
  std::size_t next_id_ = 1;
  std::vector<std::jthread> jobs_;
};

/// HTTP+JSON front end:
///   POST /corpora                     JSON {name, format?, source?, files:[{name, content}]} or multipart
///   GET  /corpora
///   GET  /corpora/{id}
///   GET  /corpora/{id}/documents/{docId}?categories=Spatial,Temporal
///   POST /corpora/{id}/documents/{docId}/annotations/{aId}/review   {"decision": "Accepted"|"Rejected"}
///   GET  /corpora/{id}/export?docs=a,b
///   GET  /corpora/{id}/stats
class HttpServer {
 public:
  explicit HttpServer(ReviewService& service);
  ~HttpServer();

  /// Binds and serves until stop(); returns false when binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and serves on a background thread; returns the port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mti
