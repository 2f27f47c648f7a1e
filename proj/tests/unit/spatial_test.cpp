#include "doctest.h"
#include "golden_phrases.hpp"
#include "mti/spatial.hpp"
#include "test_support.hpp"

using namespace mti;
using testing::single_segment;

namespace {

SpatialAnnotations run(const std::string& lang, const std::string& text) {
  return annotate_spatial(single_segment(lang, text), testing::fixture_resources()->spatial());
}

const SpatialEntity* by_surface(const SpatialAnnotations& a, const std::string& surface) {
  for (const auto& e : a.spatial) {
    if (e.surface == surface) return &e;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("spatial") {

TEST_CASE("example phrases on their own") {
  for (const auto& g : testing::golden_phrases()) {
    CAPTURE(g.phrase);
    CHECK(testing::check_golden(g, run(g.lang, g.phrase)) == "");
  }
}

TEST_CASE("example phrases inside running text") {
  for (const auto& g : testing::golden_phrases()) {
    CAPTURE(g.phrase);
    const std::string s = g.lang == "fr" ? "Les relevés effectués " + g.phrase + " montrent une hausse."
                                         : "Surveys carried out " + g.phrase + " show an increase.";
    CHECK(testing::check_golden(g, run(g.lang, s)) == "");
  }
}

TEST_CASE("feature type indicator is recorded") {
  auto a = run("fr", "golfe de Guinée");
  const auto* e = by_surface(a, "golfe de Guinée");
  REQUIRE(e != nullptr);
  REQUIRE_FALSE(e->indicators.empty());
  CHECK(e->indicators[0].surface == "golfe");
  CHECK(e->indicators[0].category == IndicatorCategory::FeatureType);
  CHECK(e->indicators[0].lang == "fr");
  REQUIRE(e->footprint.has_value());
  CHECK(e->footprint->gazetteer_id == 2363254);
}

TEST_CASE("organization before an action verb") {
  auto a = run("en", "CIRAD conducts research in Madagascar");
  REQUIRE(a.organizations.size() == 1);
  CHECK(a.organizations[0].surface == "CIRAD");
  CHECK(a.organizations[0].id == "o1");
  REQUIRE(a.spatial.size() == 1);
  CHECK(a.spatial[0].surface == "Madagascar");
  CHECK(a.spatial[0].kind == SpatialKind::Absolute);
  CHECK(a.spatial[0].id == "s1");
}

TEST_CASE("no organization without an action verb") {
  auto a = run("en", "Madagascar is an island");
  CHECK(a.organizations.empty());
  REQUIRE(by_surface(a, "Madagascar") != nullptr);
}

TEST_CASE("empty text") {
  auto a = run("en", "");
  CHECK(a.spatial.empty());
  CHECK(a.organizations.empty());
}

TEST_CASE("river indicator selects the stream over the country") {
  auto a = run("en", "Irrigated rice along the Senegal River has expanded.");
  const auto* e = by_surface(a, "Senegal River");
  REQUIRE(e != nullptr);
  REQUIRE(e->footprint.has_value());
  CHECK(e->footprint->gazetteer_id == 2246452);
  const auto* g = testing::fixture_resources()->gazetteer.find(e->footprint->gazetteer_id);
  CHECK(g->feature_class == FeatureClass::Stream);
}

TEST_CASE("french context resolves Bayonne to France") {
  auto a = run("fr", "Les crues de l'Adour à Bayonne et à Paris ont touché toute la France.");
  const auto* e = by_surface(a, "Bayonne");
  REQUIRE(e != nullptr);
  REQUIRE(e->footprint.has_value());
  CHECK(e->footprint->gazetteer_id == 3032797);
  CHECK(e->confidence > 0.5);
}

TEST_CASE("Bayonne alone follows importance") {
  auto a = run("en", "Bayonne");
  const auto* e = by_surface(a, "Bayonne");
  REQUIRE(e != nullptr);
  REQUIRE(e->candidates.size() == 2);
  CHECK(e->footprint->gazetteer_id == 5099133);
}

TEST_CASE("unknown toponym keeps no footprint and zero confidence") {
  SpatialEntity e;
  e.surface = "Atlantis";
  e.head = "Atlantis";
  const auto& r = *testing::fixture_resources();
  populate_candidates(e, r.gazetteer, r.feature_types);
  CHECK(e.candidates.empty());
  disambiguate(e, {"FR"}, r.gazetteer);
  CHECK_FALSE(e.footprint.has_value());
  CHECK(e.confidence == 0);
}

TEST_CASE("bilingual record uses each segment's rules") {
  Document d;
  d.id = "bi";
  d.languages = {"fr", "en"};
  d.abstracts = {{"fr", "Le lac Eyre est salé."}, {"en", "Rainfall near Paris rose."}};
  auto a = annotate_spatial(d, testing::fixture_resources()->spatial());
  const auto* lac = by_surface(a, "lac Eyre");
  const auto* near = by_surface(a, "near Paris");
  REQUIRE(lac != nullptr);
  REQUIRE(near != nullptr);
  CHECK(lac->segment == 0);
  CHECK(near->segment == 1);
  CHECK(near->span == Span{9, 19});
}

TEST_CASE("ESR inherits its anchor's footprint") {
  auto a = run("en", "near Paris");
  const auto* esr = by_surface(a, "near Paris");
  const auto* esa = by_surface(a, "Paris");
  REQUIRE(esr != nullptr);
  REQUIRE(esa != nullptr);
  CHECK(esr->footprint == esa->footprint);
  CHECK(esr->candidates == esa->candidates);
}

TEST_CASE("scaling both weights keeps the chosen footprint") {
  const auto& r = *testing::fixture_resources();
  const std::vector<std::vector<std::string>> contexts = {{}, {"FR"}, {"US"}, {"FR", "US", "US"}, {"SN", "FR"}};
  for (const auto* name : {"Bayonne", "Paris", "Senegal"}) {
    for (const auto& ctx : contexts) {
      SpatialEntity e;
      e.surface = e.head = name;
      populate_candidates(e, r.gazetteer, r.feature_types);
      SpatialEntity scaled = e;
      disambiguate(e, ctx, r.gazetteer, {0.7, 0.3});
      disambiguate(scaled, ctx, r.gazetteer, {7.0, 3.0});
      CHECK(e.footprint == scaled.footprint);
      CHECK(e.confidence == doctest::Approx(scaled.confidence));
    }
  }
}

TEST_CASE("feature type filter only removes candidates") {
  const auto& r = *testing::fixture_resources();
  for (const auto& name : r.gazetteer.names()) {
    SpatialEntity plain;
    plain.surface = plain.head = name;
    populate_candidates(plain, r.gazetteer, r.feature_types);
    for (const auto* word : {"river", "lac", "golfe", "region", "ocean"}) {
      SpatialEntity typed = plain;
      typed.indicators.push_back({word, IndicatorCategory::FeatureType, "en", {}});
      populate_candidates(typed, r.gazetteer, r.feature_types);
      for (auto id : typed.candidates) {
        CHECK(std::find(plain.candidates.begin(), plain.candidates.end(), id) != plain.candidates.end());
      }
    }
  }
}

TEST_CASE("ids are assigned in output order") {
  auto a = run("en", "From Dakar to Riyadh, the Indian Ocean and near Paris.");
  for (std::size_t i = 0; i < a.spatial.size(); ++i) CHECK(a.spatial[i].id == "s" + std::to_string(i + 1));
}

}
