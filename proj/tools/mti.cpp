#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mti/error.hpp"
#include "mti/eval.hpp"
#include "mti/index.hpp"
#include "mti/ingest.hpp"
#include "mti/modsti.hpp"
#include "mti/pipeline.hpp"
#include "mti/service.hpp"
#include "mti/text.hpp"

namespace fs = std::filesystem;
using namespace mti;

namespace {

struct ResourceFlags {
  std::optional<fs::path> config;
  std::optional<fs::path> rules;
  std::optional<fs::path> gazetteer;
  std::optional<fs::path> feature_types;
  std::optional<fs::path> temporal;
  std::vector<fs::path> skos;
  std::optional<std::size_t> workers;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file (default: $MTI_CONFIG)");
    cmd->add_option("--rules", rules, "directory of .rules files");
    cmd->add_option("--gazetteer", gazetteer, "gazetteer TSV");
    cmd->add_option("--feature-types", feature_types, "feature type to class TSV");
    cmd->add_option("--temporal", temporal, "directory of temporal lexicons");
    cmd->add_option("--skos", skos, "SKOS thesaurus (repeatable)");
    cmd->add_option("--workers", workers, "worker threads (0: all cores)");
  }

  std::shared_ptr<const Resources> load() const {
    PipelineConfig cfg = resolve_config(config);
    if (rules) cfg.rules_dir = *rules;
    if (gazetteer) cfg.gazetteer = *gazetteer;
    if (feature_types) cfg.feature_types = *feature_types;
    if (temporal) cfg.temporal_dir = *temporal;
    if (!skos.empty()) cfg.skos = skos;
    if (workers) cfg.workers = *workers;
    return Resources::load(cfg);
  }
};

std::vector<fs::path> xml_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".xml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ModsTiRecord> read_records(const fs::path& dir) {
  std::vector<ModsTiRecord> records;
  for (const auto& p : xml_files(dir)) {
    try {
      records.push_back(parse_mods_ti_xml(read_file(p)));
    } catch (const Error& e) {
      throw Error(e.code(), p.string() + ": " + e.what());
    }
  }
  return records;
}

int cmd_annotate(const fs::path& manifest, const fs::path& out, const ResourceFlags& flags) {
  const auto res = flags.load();
  const auto inputs = inputs_from_manifest(manifest);
  fs::create_directories(out);
  const auto outcomes = run_pipeline(inputs, *res);
  std::size_t ok = 0;
  for (const auto& o : outcomes) {
    if (!o.ok()) {
      std::cerr << "failed: " << o.name << ": " << o.error << "\n";
      continue;
    }
    write_file(out / (file_name_for(o.record->document.id) + ".xml"), to_mods_ti_xml(*o.record));
    ++ok;
  }
  std::cout << ok << " of " << outcomes.size() << " documents annotated into " << out.string() << "\n";
  return ok == outcomes.size() ? 0 : 1;
}

int cmd_index(const fs::path& dir, const fs::path& out) {
  const auto records = read_records(dir);
  const IndexSummary s = build_index(records, out);
  std::cout << s.to_json() << "\n";
  return 0;
}

int cmd_eval(const fs::path& gold_file, const std::optional<fs::path>& pred, const std::string& mode_name,
             const std::optional<fs::path>& json_out, const ResourceFlags& flags) {
  const MatchMode mode = match_mode_from_string(mode_name);
  const auto gold = load_gold(gold_file);
  std::map<std::string, std::vector<GoldSpan>> predicted;
  if (pred) {
    for (const auto& r : read_records(*pred)) predicted[r.document.id] = spans_from_record(r);
  } else {
    const auto res = flags.load();
    for (const auto& g : gold) predicted[g.id] = spans_from_record(annotate_document(document_from_gold(g), *res));
  }
  const EvalReport report = score(gold, predicted, mode);
  std::cout << report.to_table();
  if (json_out) write_file(*json_out, report.to_json() + "\n");
  return 0;
}

int cmd_query(const fs::path& index_file, const std::vector<std::int64_t>& places, const std::string& bbox,
              const std::string& from, const std::string& to, const std::vector<std::string>& concepts,
              const std::string& text_query) {
  Query q;
  q.places = places;
  if (!bbox.empty()) {
    const auto parts = text::split(bbox, ',');
    if (parts.size() != 4) throw Error(ErrorCode::InvalidArgument, "--bbox takes minLat,minLon,maxLat,maxLon");
    q.bbox = BoundingBox{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
  }
  if (!from.empty() || !to.empty()) {
    const auto a = CalendarDate::parse_iso(from.empty() ? to : from);
    const auto b = CalendarDate::parse_iso(to.empty() ? from : to);
    q.period = std::make_pair(a, b);
  }
  q.concepts = concepts;
  q.text = text_query;
  for (const auto& hit : query_index(load_index(index_file), q)) std::cout << hit.doc_id << "\t" << hit.score << "\n";
  return 0;
}

int cmd_validate(const std::vector<fs::path>& files) {
  int status = 0;
  for (const auto& f : files) {
    const auto problems = validate_mods_ti_xml(read_file(f));
    if (problems.empty()) {
      std::cout << f.string() << ": valid\n";
      continue;
    }
    status = 1;
    for (const auto& p : problems) std::cout << f.string() << ": " << p << "\n";
  }
  return status;
}

HttpServer* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const fs::path& data, const ResourceFlags& flags) {
  ReviewService service(data, flags.load());
  HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on http://" << host << ":" << port << " (data " << data.string() << ")" << std::endl;
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MODS-TI annotation pipeline"};
  app.set_version_flag("--version", std::string(kPipelineVersion));
  app.require_subcommand(1);

  ResourceFlags annotate_flags, eval_flags, serve_flags;

  auto* annotate = app.add_subcommand("annotate", "annotate the documents of a manifest into MODS-TI files");
  fs::path manifest, annotate_out;
  annotate->add_option("manifest", manifest, "manifest file (one path per line, optional tab and source)")
      ->required()
      ->check(CLI::ExistingFile);
  annotate->add_option("--out", annotate_out, "output directory")->required();
  annotate_flags.attach(annotate);

  auto* index = app.add_subcommand("index", "build the NDJSON index of a directory of MODS-TI files");
  fs::path index_dir, index_out;
  index->add_option("dir", index_dir, "directory of MODS-TI files")->required()->check(CLI::ExistingDirectory);
  index->add_option("--out", index_out, "index file")->required();

  auto* eval = app.add_subcommand("eval", "score annotations against a gold corpus");
  fs::path gold_file;
  std::optional<fs::path> pred_dir, eval_json;
  std::string mode = "exact";
  eval->add_option("--gold", gold_file, "gold JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", pred_dir, "directory of MODS-TI predictions (default: annotate the gold texts)");
  eval->add_option("--mode", mode, "exact|overlap")->check(CLI::IsMember({"exact", "overlap"}));
  eval->add_option("--json", eval_json, "also write the report as JSON");
  eval_flags.attach(eval);

  auto* query = app.add_subcommand("query", "search an index");
  fs::path index_file;
  std::vector<std::int64_t> places;
  std::string bbox, from, to, text_query;
  std::vector<std::string> concepts;
  query->add_option("index", index_file, "index file")->required()->check(CLI::ExistingFile);
  query->add_option("--place", places, "gazetteer id (repeatable)");
  query->add_option("--bbox", bbox, "minLat,minLon,maxLat,maxLon");
  query->add_option("--from", from, "period start (YYYY[-MM[-DD]])");
  query->add_option("--to", to, "period end (YYYY[-MM[-DD]])");
  query->add_option("--concept", concepts, "concept id (repeatable)");
  query->add_option("--text", text_query, "free-text terms");

  auto* validate = app.add_subcommand("validate", "validate MODS-TI files against the DTD");
  std::vector<fs::path> files;
  validate->add_option("files", files, "MODS-TI files")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "run the review HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  fs::path data = "data";
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--data", data, "data directory");
  serve_flags.attach(serve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*annotate) return cmd_annotate(manifest, annotate_out, annotate_flags);
    if (*index) return cmd_index(index_dir, index_out);
    if (*eval) return cmd_eval(gold_file, pred_dir, mode, eval_json, eval_flags);
    if (*query) return cmd_query(index_file, places, bbox, from, to, concepts, text_query);
    if (*validate) return cmd_validate(files);
    if (*serve) return cmd_serve(host, port, data, serve_flags);
  } catch (const Error& e) {
    std::cerr << "mti: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mti: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
