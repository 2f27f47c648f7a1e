#include <cstdlib>

#include "doctest.h"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/pipeline.hpp"
#include "test_support.hpp"

using namespace mti;

namespace {

std::string mods(const std::string& id, const std::string& abstract, const std::string& lang = "en") {
  return "<mods xmlns=\"http://www.loc.gov/mods/v3\"><titleInfo><title>T " + id + "</title></titleInfo><abstract lang=\"" +
         lang + "\">" + abstract + "</abstract><recordInfo><recordIdentifier>" + id +
         "</recordIdentifier></recordInfo></mods>";
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("default layout under a resource root") {
  auto c = PipelineConfig::defaults("/data");
  CHECK(c.gazetteer == std::filesystem::path("/data/gazetteer.tsv"));
  CHECK(c.rules_dir == std::filesystem::path("/data/rules"));
  CHECK(c.broader_depth == 2);
  CHECK(c.weights.context == 0.7);
}

TEST_CASE("config file keys") {
  auto dir = testing::scratch_dir("config");
  write_file(dir / "c.json", R"({"skos": ["a.xml", "/abs/b.xml"], "weights": {"context": 0.5}, "broaderDepth": 4,
                                  "yearWindow": [1900, 2050], "workers": 3, "defaultLanguage": "fr"})");
  auto c = PipelineConfig::load(dir / "c.json", "/root-dir");
  CHECK(c.skos == std::vector<std::filesystem::path>{dir / "a.xml", "/abs/b.xml"});
  CHECK(c.weights.context == 0.5);
  CHECK(c.weights.importance == 0.3);
  CHECK(c.broader_depth == 4);
  CHECK(c.temporal.min_year == 1900);
  CHECK(c.workers == 3);
  CHECK(c.default_language == "fr");
  CHECK(c.gazetteer == std::filesystem::path("/root-dir/gazetteer.tsv"));
  write_file(dir / "bad.json", R"({"colour": "blue"})");
  CHECK_THROWS_AS(PipelineConfig::load(dir / "bad.json", "/r"), Error);
  write_file(dir / "bad2.json", R"({"yearWindow": [2000, 1900]})");
  CHECK_THROWS_AS(PipelineConfig::load(dir / "bad2.json", "/r"), Error);
}

TEST_CASE("environment variables select root and config") {
  auto dir = testing::scratch_dir("env");
  write_file(dir / "c.json", R"({"broaderDepth": 1})");
  ::setenv(kDataRootEnv, dir.c_str(), 1);
  CHECK(default_data_root() == dir);
  CHECK(resolve_config().gazetteer == dir / "gazetteer.tsv");
  ::setenv(kConfigEnv, (dir / "c.json").c_str(), 1);
  CHECK(resolve_config().broader_depth == 1);
  ::unsetenv(kConfigEnv);
  ::unsetenv(kDataRootEnv);
  CHECK(default_data_root() == testing::resources_dir());
}

TEST_CASE("annotate_document fills every layer with contiguous timings") {
  Document d;
  d.id = "x";
  d.abstracts = {{"en", "Drought hit the Senegal River valley from 1990 to 2000."}};
  d.languages = {"en"};
  auto r = annotate_document(d, *testing::fixture_resources(), 0.25);
  CHECK_FALSE(r.spatial.empty());
  CHECK(r.temporal.size() == 1);
  CHECK_FALSE(r.thematic.empty());
  REQUIRE(r.provenance.has_value());
  REQUIRE(r.provenance->stages.size() == 4);
  CHECK(r.provenance->stages[0].seconds == 0.25);
  double sum = 0;
  for (const auto& s : r.provenance->stages) sum += s.seconds;
  CHECK(sum == doctest::Approx(r.provenance->total_seconds));
}

TEST_CASE("a failing document does not stop the others") {
  std::vector<InputDocument> in = {
      {"a.xml", mods("a", "Rain near Dakar."), std::nullopt, std::nullopt},
      {"b.xml", "<mods><abstract>", std::nullopt, std::nullopt},
      {"c.xml", mods("c", "La pluie à Dakar.", "fr"), Source::Agritrop, std::nullopt},
      {"d.txt", "plain words", std::nullopt, std::nullopt},
      {"e.xml", mods("a", "Again."), std::nullopt, std::nullopt},
  };
  std::vector<std::size_t> ticks;
  auto out = run_pipeline(in, *testing::fixture_resources(), [&](std::size_t done, std::size_t total) {
    CHECK(total == 5);
    ticks.push_back(done);
  });
  REQUIRE(out.size() == 5);
  CHECK(out[0].ok());
  CHECK_FALSE(out[1].ok());
  CHECK(out[1].error.find("MalformedInput") != std::string::npos);
  CHECK(out[2].ok());
  CHECK(out[2].record->document.source == Source::Agritrop);
  CHECK(out[3].error.find("UnrecognizedFormat") != std::string::npos);
  CHECK(out[4].error.find("DuplicateId") != std::string::npos);
  CHECK(ticks == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(out[0].name == "a.xml");
}

TEST_CASE("output order equals input order on many workers") {
  std::vector<InputDocument> in;
  for (int i = 0; i < 40; ++i) in.push_back({"f" + std::to_string(i), mods("id" + std::to_string(i), "Rice in Mali."), {}, {}});
  auto out = run_pipeline(in, *testing::fixture_resources());
  for (int i = 0; i < 40; ++i) {
    REQUIRE(out[i].ok());
    CHECK(out[i].record->document.id == "id" + std::to_string(i));
  }
}

TEST_CASE("file names for ids") {
  CHECK(file_name_for("gold-fr-01") == "gold-fr-01");
  const auto f = file_name_for("https://example.org/doc/7");
  CHECK(f.find('/') == std::string::npos);
  CHECK(f.find(':') == std::string::npos);
  CHECK(f != file_name_for("https://example.org/doc/8"));
  CHECK(file_name_for("..") != "..");
}

TEST_CASE("manifest inputs") {
  auto inputs = inputs_from_manifest(testing::gold_dir() / "manifest.txt");
  CHECK(inputs.size() == 20);
  CHECK_FALSE(inputs[0].bytes.empty());
}

}
