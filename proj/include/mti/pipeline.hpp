#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mti/document.hpp"
#include "mti/gazetteer.hpp"
#include "mti/modsti.hpp"
#include "mti/spatial.hpp"
#include "mti/temporal.hpp"
#include "mti/thematic.hpp"

namespace mti {

inline constexpr std::string_view kPipelineVersion = "mti 0.1.0";

/// Environment variables: MTI_DATA_ROOT (resource root holding rules/,
/// temporal/, gazetteer.tsv, ...) and MTI_CONFIG (path of a config file).
inline constexpr const char* kDataRootEnv = "MTI_DATA_ROOT";
inline constexpr const char* kConfigEnv = "MTI_CONFIG";

/// Config file keys (JSON object, all optional, paths relative to the file):
///   rulesDir, gazetteer, featureTypes, temporalDir, skos (string or list),
///   weights {context, importance}, broaderDepth, defaultLanguage,
///   yearWindow [min, max], workers.
struct PipelineConfig {
  std::filesystem::path rules_dir;
  std::filesystem::path gazetteer;
  std::filesystem::path feature_types;
  std::filesystem::path temporal_dir;
  std::vector<std::filesystem::path> skos;
  DisambiguationWeights weights;
  std::size_t broader_depth = 2;
  std::string default_language = "en";
  TemporalConfig temporal;
  std::size_t workers = 0;  // 0: hardware concurrency

  /// Standard layout under a resource root.
  static PipelineConfig defaults(const std::filesystem::path& root);
  /// Starts from defaults(root) and applies the keys present in the file.
  static PipelineConfig load(const std::filesystem::path& file, const std::filesystem::path& root);
  std::string to_json() const;
};

/// The resource root: MTI_DATA_ROOT if set, else the resources/ directory of
/// the source tree this binary was built from.
std::filesystem::path default_data_root();

/// Explicit file, else MTI_CONFIG, else defaults(default_data_root()).
PipelineConfig resolve_config(const std::optional<std::filesystem::path>& file = std::nullopt);

/// Loaded, immutable resources shared by all workers.
struct Resources {
  PipelineConfig config;
  Gazetteer gazetteer;
  FeatureTypeMap feature_types;
  RuleLibrary rules;
  TemporalLibrary temporal;
  SkosStore skos;

  static std::shared_ptr<const Resources> load(const PipelineConfig& config);
  SpatialResources spatial() const;
};

/// Annotates one ingested document. Provenance holds contiguous stage timings
/// (ingest as given, then spatial, temporal, thematic) and their sum.
ModsTiRecord annotate_document(const Document& doc, const Resources& resources, double ingest_seconds = 0,
                               const std::optional<CalendarDate>& dct = std::nullopt);

struct InputDocument {
  std::string name;  // file name or upload name, for messages
  std::string bytes;
  std::optional<Source> source;
  std::optional<SourceFormat> format;  // detected when absent
};

struct DocumentOutcome {
  std::string name;
  std::optional<ModsTiRecord> record;
  std::string error;  // set when record is absent

  bool ok() const { return record.has_value(); }
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Ingests and annotates every input on a bounded worker pool. Output order
/// equals input order; a failing document yields an error outcome and never
/// stops the others. Later documents repeating an id fail with DuplicateId.
std::vector<DocumentOutcome> run_pipeline(const std::vector<InputDocument>& inputs, const Resources& resources,
                                          const ProgressFn& progress = {});

/// Inputs named by a manifest file.
std::vector<InputDocument> inputs_from_manifest(const std::filesystem::path& manifest);

/// File name for a document id: the id itself when it is filesystem-safe,
/// else a sanitized form with a hash suffix.
std::string file_name_for(std::string_view doc_id);

}  // namespace mti
