#include <fstream>
#include <thread>

#include "doctest.h"
#include "mti/archive.hpp"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/modsti.hpp"
#include "mti/service.hpp"
#include "service_fixtures.hpp"
#include "test_support.hpp"

using namespace mti;
using nlohmann::ordered_json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string first_annotation(const ordered_json& doc, const std::string& category) {
  for (const auto& a : doc["annotations"]) {
    if (a["category"] == category) return a["id"].get<std::string>();
  }
  return "";
}

struct Fixture {
  std::filesystem::path dir = testing::scratch_dir("service");
  ReviewService service{dir, testing::fixture_resources()};

  std::string done_corpus() {
    auto id = service.upload_corpus(testing::three_records());
    service.wait_idle();
    return id;
  }
};

}  // namespace

TEST_SUITE("service") {

TEST_CASE("three records are processed") {
  Fixture f;
  auto id = f.done_corpus();
  auto s = f.service.corpus(id);
  CHECK(s.status == CorpusStatus::Done);
  CHECK(s.total == 3);
  CHECK(s.processed == 3);
  CHECK(s.failed == 0);
  CHECK(s.name == "sahel");
  auto docs = f.service.documents(id);
  REQUIRE(docs.size() == 3);
  CHECK(docs[1].doc_id == "doc-2");
  CHECK(std::filesystem::exists(f.dir / "corpora" / id / "index.ndjson"));
}

TEST_CASE("empty and unrecognized uploads") {
  Fixture f;
  UploadRequest r;
  CHECK(code_of([&] { f.service.upload_corpus(r); }) == ErrorCode::EmptyUpload);
  r.files = {{"x.txt", "just text"}};
  CHECK(code_of([&] { f.service.upload_corpus(r); }) == ErrorCode::UnrecognizedFormat);
  CHECK(f.service.list_corpora().empty());
}

TEST_CASE("a malformed document is marked failed, the rest go through") {
  Fixture f;
  auto r = testing::three_records();
  r.files.push_back({"broken.xml", "<mods><abstract>cut"});
  auto id = f.service.upload_corpus(r);
  f.service.wait_idle();
  auto s = f.service.corpus(id);
  CHECK(s.status == CorpusStatus::Done);
  CHECK(s.failed == 1);
  auto docs = f.service.documents(id);
  REQUIRE(docs.size() == 4);
  CHECK(docs[3].failed);
  CHECK_FALSE(docs[3].error.empty());
  CHECK_NOTHROW(f.service.get_document(id, "doc-3"));
}

TEST_CASE("corpus where every document fails") {
  Fixture f;
  UploadRequest r;
  r.format = SourceFormat::ModsXml;
  r.files = {{"a.xml", "<mods>"}, {"b.xml", "<oops/>"}};
  auto id = f.service.upload_corpus(r);
  f.service.wait_idle();
  CHECK(f.service.corpus(id).status == CorpusStatus::Failed);
  CHECK(code_of([&] { f.service.get_document(id, "a"); }) == ErrorCode::CorpusNotDone);
}

TEST_CASE("unknown ids") {
  Fixture f;
  CHECK(code_of([&] { f.service.corpus("nope"); }) == ErrorCode::NotFound);
  auto id = f.done_corpus();
  CHECK(code_of([&] { f.service.get_document(id, "nope"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { f.service.review_annotation(id, "doc-1", "s99", ReviewFlag::Accepted); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { f.service.export_corpus(id, std::vector<std::string>{"ghost"}); }) == ErrorCode::NotFound);
}

TEST_CASE("document view and category filter") {
  Fixture f;
  auto id = f.done_corpus();
  auto doc = f.service.get_document(id, "doc-1");
  CHECK(doc["docId"] == "doc-1");
  CHECK(doc["segments"][0]["lang"] == "en");
  std::set<std::string> cats;
  for (const auto& a : doc["annotations"]) {
    cats.insert(a["category"].get<std::string>());
    CHECK(a["flag"] == "Pending");
  }
  CHECK(cats.count("Spatial"));
  CHECK(cats.count("Temporal"));
  auto spatial_only = f.service.get_document(id, "doc-1", std::set<AnnotationCategory>{AnnotationCategory::Spatial});
  for (const auto& a : spatial_only["annotations"]) CHECK(a["category"] == "Spatial");
  CHECK(first_annotation(spatial_only, "Temporal").empty());
  CHECK(f.service.get_document(id, "doc-1", std::set<AnnotationCategory>{})["annotations"].empty());
  CHECK(f.service.export_corpus(id) == f.service.export_corpus(id));
}

TEST_CASE("reviews are idempotent and the last one wins") {
  Fixture f;
  auto id = f.done_corpus();
  auto doc = f.service.get_document(id, "doc-1");
  auto a = first_annotation(doc, "Spatial");
  REQUIRE_FALSE(a.empty());
  const auto log = f.dir / "corpora" / id / "reviews.log";
  CHECK(f.service.review_annotation(id, "doc-1", a, ReviewFlag::Accepted) == ReviewFlag::Accepted);
  const auto size = std::filesystem::file_size(log);
  CHECK(f.service.review_annotation(id, "doc-1", a, ReviewFlag::Accepted) == ReviewFlag::Accepted);
  CHECK(std::filesystem::file_size(log) == size);
  f.service.review_annotation(id, "doc-1", a, ReviewFlag::Rejected);
  CHECK(f.service.flag(id, "doc-1", a) == ReviewFlag::Rejected);
  f.service.review_annotation(id, "doc-1", a, ReviewFlag::Accepted);
  CHECK(f.service.flag(id, "doc-1", a) == ReviewFlag::Accepted);
}

TEST_CASE("rejected entity is missing from a valid export") {
  Fixture f;
  auto id = f.done_corpus();
  const auto before = f.service.export_corpus(id);
  auto doc = f.service.get_document(id, "doc-3");
  auto a = first_annotation(doc, "Spatial");
  REQUIRE_FALSE(a.empty());
  f.service.review_annotation(id, "doc-3", a, ReviewFlag::Rejected);
  const auto entries = tar::read(f.service.export_corpus(id));
  const tar::Entry* xml = nullptr;
  for (const auto& e : entries) {
    if (e.name == "docs/doc-3.xml") xml = &e;
  }
  REQUIRE(xml != nullptr);
  CHECK(validate_mods_ti_xml(xml->data).empty());
  auto exported = parse_mods_ti_xml(xml->data);
  auto original = parse_mods_ti_xml(read_file(f.dir / "corpora" / id / "annotated" / "doc-3.xml"));
  CHECK(exported.spatial.size() + 1 == original.spatial.size());
  for (const auto& e : exported.spatial) CHECK(e.id != a);
  CHECK(exported.temporal == original.temporal);
  CHECK(exported.organizations == original.organizations);
  CHECK(before != f.service.export_corpus(id));
}

TEST_CASE("rejecting the anchor drops the relative entity") {
  Fixture f;
  auto id = f.done_corpus();
  auto rec = f.service.reviewed_record(id, "doc-1");
  const SpatialEntity* esr = nullptr;
  for (const auto& e : rec.spatial) {
    if (e.kind == SpatialKind::Relative) esr = &e;
  }
  REQUIRE(esr != nullptr);
  const auto anchor = esr->anchors.at(0);
  const auto esr_id = esr->id;
  f.service.review_annotation(id, "doc-1", anchor, ReviewFlag::Rejected);
  auto after = f.service.reviewed_record(id, "doc-1");
  for (const auto& e : after.spatial) {
    CHECK(e.id != anchor);
    CHECK(e.id != esr_id);
  }
}

TEST_CASE("without rejections the export equals the pipeline output") {
  Fixture f;
  auto id = f.done_corpus();
  auto doc = f.service.get_document(id, "doc-2");
  f.service.review_annotation(id, "doc-2", first_annotation(doc, "Spatial"), ReviewFlag::Accepted);
  const auto entries = tar::read(f.service.export_corpus(id));
  REQUIRE(entries.size() == 5);
  CHECK(entries[0].name == "manifest.json");
  CHECK(entries[1].name == "mods-ti.dtd");
  CHECK(entries[1].data == mods_ti_dtd_text());
  for (std::size_t i = 2; i < entries.size(); ++i) {
    const auto file = entries[i].name.substr(5);
    CHECK(entries[i].data == read_file(f.dir / "corpora" / id / "annotated" / file));
  }
  auto manifest = ordered_json::parse(entries[0].data);
  CHECK(manifest["documents"].size() == 3);
}

TEST_CASE("empty selection exports only the manifest and the DTD") {
  Fixture f;
  auto id = f.done_corpus();
  const auto entries = tar::read(f.service.export_corpus(id, std::vector<std::string>{}));
  REQUIRE(entries.size() == 2);
  CHECK(ordered_json::parse(entries[0].data)["documents"].empty());
  const auto some = tar::read(f.service.export_corpus(id, std::vector<std::string>{"doc-2", "doc-2"}));
  CHECK(some.size() == 3);
}

TEST_CASE("run stats add up") {
  Fixture f;
  auto id = f.done_corpus();
  auto s = f.service.run_stats(id);
  CHECK(s["documents"] == 3);
  double sum = 0;
  for (const auto& [k, v] : s["stages"].items()) sum += v.get<double>();
  const double total = s["totalSeconds"].get<double>();
  CHECK(std::abs(sum - total) <= 0.05 * total);
  CHECK(s["perDocumentSeconds"].get<double>() == doctest::Approx(total / 3));
  CHECK(s["stages"].contains("index"));
}

TEST_CASE("concurrent reviews on different annotations") {
  Fixture f;
  auto id = f.done_corpus();
  std::vector<std::pair<std::string, std::string>> targets;
  for (const auto* d : {"doc-1", "doc-2", "doc-3"}) {
    const auto doc = f.service.get_document(id, d);
    for (const auto& a : doc["annotations"]) targets.emplace_back(d, a["id"].get<std::string>());
  }
  REQUIRE(targets.size() > 6);
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t i = t; i < targets.size(); i += 4) {
          f.service.review_annotation(id, targets[i].first, targets[i].second,
                                      i % 2 ? ReviewFlag::Rejected : ReviewFlag::Accepted);
        }
      });
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    CHECK(f.service.flag(id, targets[i].first, targets[i].second) == (i % 2 ? ReviewFlag::Rejected : ReviewFlag::Accepted));
  }
}

TEST_CASE("state survives a restart") {
  auto dir = testing::scratch_dir("restart");
  std::string id;
  std::string a;
  std::string exported;
  {
    ReviewService s(dir, testing::fixture_resources());
    id = s.upload_corpus(testing::three_records());
    s.wait_idle();
    a = first_annotation(s.get_document(id, "doc-1"), "Temporal");
    s.review_annotation(id, "doc-1", a, ReviewFlag::Rejected);
    exported = s.export_corpus(id);
  }
  {
    std::ofstream(dir / "corpora" / id / "reviews.log", std::ios::app) << "{\"doc\":\"doc-1\",\"annot";
  }
  ReviewService s(dir, testing::fixture_resources());
  CHECK(s.list_corpora().size() == 1);
  CHECK(s.flag(id, "doc-1", a) == ReviewFlag::Rejected);
  CHECK(s.export_corpus(id) == exported);
  auto second = s.upload_corpus(testing::three_records());
  CHECK(second != id);
  s.wait_idle();
}

TEST_CASE("enum names") {
  CHECK(to_string(ReviewFlag::Rejected) == "Rejected");
  CHECK(review_flag_from_string("Accepted") == ReviewFlag::Accepted);
  CHECK_THROWS_AS(review_flag_from_string("maybe"), Error);
  CHECK(annotation_category_from_string("spatial") == AnnotationCategory::Spatial);
  CHECK(corpus_status_from_string("Done") == CorpusStatus::Done);
}

}
