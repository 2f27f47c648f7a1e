#include "doctest.h"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "test_support.hpp"

using namespace mti;

namespace {

const char* kMods = R"(<?xml version="1.0" encoding="UTF-8"?>
<mods xmlns="http://www.loc.gov/mods/v3" version="3.6">
  <titleInfo><title>Sécheresse et riziculture au Sénégal</title></titleInfo>
  <abstract lang="fre">Les rendements du riz dans la vallée du fleuve Sénégal ont baissé entre 1990 et 2000.</abstract>
  <abstract lang="eng">Rice yields in the Senegal River valley declined between 1990 and 2000.</abstract>
  <genre>article</genre>
  <recordInfo><recordIdentifier>istex-001</recordIdentifier><recordContentSource>ISTEX</recordContentSource></recordInfo>
</mods>)";

const char* kDc = R"(<record xmlns:dc="http://purl.org/dc/elements/1.1/">
  <dc:title>Irrigation in the Casamance</dc:title>
  <dc:description>Small-scale irrigation near Ziguinchor was surveyed in 2004.</dc:description>
  <dc:identifier>agritrop-42</dc:identifier>
  <dc:subject>irrigation</dc:subject>
</record>)";

const char* kRdf =
    "<https://example.org/doc/7> <http://purl.org/dc/terms/title> \"Rainfall in Mali\" .\n"
    "<https://example.org/doc/7> <http://purl.org/dc/terms/abstract> \"Rainfall in Mali fell during the 1980s.\"@en .\n"
    "<https://example.org/doc/7> <http://purl.org/dc/terms/subject> \"climate\" .\n";

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("format detection by structural signature") {
  CHECK(detect_format(kMods) == SourceFormat::ModsXml);
  CHECK(detect_format(kDc) == SourceFormat::DublinCoreXml);
  CHECK(detect_format(kRdf) == SourceFormat::RdfTriples);
  CHECK_THROWS_AS(detect_format("just some words"), Error);
  try {
    detect_format("   ");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnrecognizedFormat);
  }
}

TEST_CASE("MODS record with two abstracts") {
  Document d = parse_document(kMods, SourceFormat::ModsXml);
  CHECK(d.id == "istex-001");
  CHECK(d.source == Source::Istex);
  CHECK(d.title == "Sécheresse et riziculture au Sénégal");
  REQUIRE(d.abstracts.size() == 2);
  CHECK(d.abstracts[0].lang == "fr");
  CHECK(d.abstracts[1].lang == "en");
  CHECK(d.languages == std::vector<std::string>{"fr", "en"});
  CHECK_FALSE(d.has_flag(DocumentFlag::MissingAbstract));
  bool genre = false;
  for (const auto& [k, v] : d.extra) genre = genre || (k == "genre" && v == "article");
  CHECK(genre);
}

TEST_CASE("Dublin Core title and description") {
  Document d = parse_document(kDc, SourceFormat::DublinCoreXml);
  CHECK(d.id == "agritrop-42");
  CHECK(d.source == Source::Agritrop);
  CHECK(d.title == "Irrigation in the Casamance");
  REQUIRE(d.abstracts.size() == 1);
  CHECK(d.abstracts[0].text == "Small-scale irrigation near Ziguinchor was surveyed in 2004.");
  CHECK(d.abstracts[0].lang == "en");
}

TEST_CASE("N-Triples dcterms abstract") {
  Document d = parse_document(kRdf, SourceFormat::RdfTriples);
  CHECK(d.id == "https://example.org/doc/7");
  CHECK(d.title == "Rainfall in Mali");
  REQUIRE(d.abstracts.size() == 1);
  CHECK(d.abstracts[0].lang == "en");
  CHECK(d.abstracts[0].text == "Rainfall in Mali fell during the 1980s.");
}

TEST_CASE("source override and fallback id") {
  const char* no_id = R"(<mods xmlns="http://www.loc.gov/mods/v3"><titleInfo><title>T</title></titleInfo>
    <abstract>Le climat de la région.</abstract></mods>)";
  IngestOptions opts;
  opts.source = Source::Anrt;
  opts.fallback_id = "thesis-9";
  Document d = parse_document(no_id, SourceFormat::ModsXml, opts);
  CHECK(d.id == "thesis-9");
  CHECK(d.source == Source::Anrt);
  CHECK(d.abstracts.at(0).lang == "fr");
}

TEST_CASE("record without abstract is flagged, not rejected") {
  const char* bare = R"(<mods xmlns="http://www.loc.gov/mods/v3"><titleInfo><title>Climate of the Sahel</title></titleInfo></mods>)";
  Document d = parse_document(bare, SourceFormat::ModsXml);
  CHECK(d.has_flag(DocumentFlag::MissingAbstract));
  CHECK(d.abstracts.empty());
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_document("<mods><abstract>x</mods>", SourceFormat::ModsXml), Error);
  CHECK_THROWS_AS(parse_document("<other/>", SourceFormat::ModsXml), Error);
  CHECK_THROWS_AS(parse_document("not a triple\n", SourceFormat::RdfTriples), Error);
  try {
    parse_document("<mods><abstract>x</mods>", SourceFormat::ModsXml);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedInput);
  }
}

TEST_CASE("language detection") {
  CHECK(detect_language("changement climatique au Sénégal") == "fr");
  CHECK(detect_language("climate change in the Senegal River basin") == "en");
  CHECK(detect_language("Madagascar") == "en");
  CHECK(detect_language("Madagascar", "fr") == "fr");
}

TEST_CASE("bilingual text splits at the language change") {
  const std::string s =
      "Les pluies dans la vallée du fleuve ont baissé.\n\nRainfall in the river valley has declined over the period.";
  auto segs = split_bilingual(s, "en");
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].lang == "fr");
  CHECK(segs[1].lang == "en");
  CHECK(split_bilingual("One paragraph in English for the record.", "fr").size() == 1);
}

TEST_CASE("debug MODS dump parses back to the same document") {
  Document d = parse_document(kMods, SourceFormat::ModsXml);
  CHECK(parse_document(to_mods_xml(d), SourceFormat::ModsXml) == d);
  Document dc = parse_document(kDc, SourceFormat::DublinCoreXml);
  CHECK(parse_document(to_mods_xml(dc), SourceFormat::ModsXml) == dc);
}

TEST_CASE("manifest lines with source tags") {
  auto dir = testing::scratch_dir("manifest");
  write_file(dir / "a.xml", kMods);
  write_file(dir / "m.txt", "# corpus\na.xml AGRITROP\n\n" + (dir / "a.xml").string() + "\n");
  auto entries = read_manifest(dir / "m.txt");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].path == dir / "a.xml");
  CHECK(entries[0].source == Source::Agritrop);
  CHECK_FALSE(entries[1].source.has_value());
  write_file(dir / "bad.txt", "a.xml NOPE\n");
  CHECK_THROWS_AS(read_manifest(dir / "bad.txt"), Error);
  CHECK_THROWS_AS(read_file(dir / "missing.xml"), Error);
}

}
