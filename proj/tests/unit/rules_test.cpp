#include "doctest.h"
#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/rules.hpp"
#include "mti/spatial.hpp"
#include "mti/tokenizer.hpp"
#include "test_support.hpp"

using namespace mti;

namespace {

std::filesystem::path lexicon_dir() {
  static const auto dir = [] {
    auto d = testing::scratch_dir("rules");
    write_file(d / "ft.txt", "river\nlake\nriver basin\n");
    write_file(d / "adj.txt", "near\nclose to\n");
    write_file(d / "verbs.txt", "conducts\n");
    return d;
  }();
  return dir;
}

RuleSet parse_rules(const std::string& body) {
  return RuleSet::parse("lang en\n"
                        "lexicon ft FeatureType ft.txt\n"
                        "lexicon adj Adjacency adj.txt\n"
                        "lexicon verb - verbs.txt\n" +
                            body,
                        lexicon_dir());
}

std::vector<std::string> surfaces(const std::vector<SpatialEntity>& v) {
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(e.surface);
  return out;
}

}  // namespace

TEST_SUITE("rules") {

TEST_CASE("atoms parse with roles, conjunctions and quantifiers") {
  auto rs = parse_rules("rule a name=Cap&!@ft+ ind=@ft&Cap => ESA\n");
  REQUIRE(rs.rules().size() == 1);
  const auto& r = rs.rules()[0];
  REQUIRE(r.atoms.size() == 2);
  CHECK(r.atoms[0].role == "name");
  CHECK(r.atoms[0].quant == '+');
  REQUIRE(r.atoms[0].terms.size() == 2);
  CHECK(r.atoms[0].terms[1].negated);
  CHECK(r.atoms[0].terms[1].kind == PatternTerm::Kind::Lexicon);
  CHECK(r.atoms[1].terms[0].arg == "ft");
  CHECK(r.label == RuleLabel::Esa);
}

TEST_CASE("malformed rule files") {
  auto code_of = [](const std::string& body) {
    try {
      parse_rules(body);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of("rule x Cap\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x Cap => PLACE\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x bogus=Cap => ESA\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x Cap => ESA\nrule x Low => ESA\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x ind=@adj ESA => ESA\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x Cap => ESR\n") == ErrorCode::MalformedRule);
  CHECK(code_of("rule x ind=@adj anchor=ESA => ESR:FeatureType\n") == ErrorCode::MalformedRule);
  CHECK(code_of("frobnicate\n") == ErrorCode::MalformedRule);
  CHECK_THROWS_AS(RuleSet::parse("rule x Cap => ESA\n", lexicon_dir()), Error);
}

TEST_CASE("unknown lexicon reference fails validation") {
  auto rs = parse_rules("rule x @nowhere => ESA\n");
  CHECK_THROWS_AS(rs.validate(), Error);
}

TEST_CASE("multi-token lexicon entries match longest first") {
  auto rs = parse_rules("rule x Cap => ESA\n");
  const auto* ft = rs.lexicon("ft");
  REQUIRE(ft != nullptr);
  auto tokens = tokenize("Wujiang River Basin", "en");
  CHECK(ft->match_lengths(tokens, 1) == std::vector<std::size_t>{2, 1});
  CHECK(ft->match_lengths(tokens, 0).empty());
  CHECK(ft->contains_token("lake"));
}

TEST_CASE("longest match wins over an earlier shorter rule") {
  auto rs = parse_rules("rule short name=Cap => ESA\nrule long name=Cap+ ind=@ft&Cap+ => ESA\n");
  const std::string s = "the Willamette River flows.";
  auto esas = match_esa(s, tokenize(s, "en"), rs);
  REQUIRE(esas.size() == 1);
  CHECK(esas[0].surface == "Willamette River");
  CHECK(esas[0].span == Span{4, 20});
  CHECK(esas[0].rule == "long");
  CHECK(esas[0].head == "Willamette");
  REQUIRE(esas[0].indicators.size() == 1);
  CHECK(esas[0].indicators[0].category == IndicatorCategory::FeatureType);
}

TEST_CASE("equal length ties go to the rule listed first") {
  auto rs = parse_rules("rule first name=Cap => ESA\nrule second name=Cap&!@ft => ESA\n");
  const std::string s = "in Dakar";
  auto esas = match_esa(s, tokenize(s, "en"), rs);
  REQUIRE(esas.size() == 1);
  CHECK(esas[0].rule == "first");
}

TEST_CASE("matches never cross a sentence boundary") {
  auto rs = parse_rules("rule x name=Cap+ => ESA\n");
  const std::string s = "They met in Dakar. Rains came.";
  CHECK(surfaces(match_esa(s, tokenize(s, "en"), rs)) == std::vector<std::string>{"They", "Dakar", "Rains"});
}

TEST_CASE("context atoms stay outside the span and organizations block ESAs") {
  auto rs = parse_rules("rule o org=Cap+ ctx=@verb => ORG\nrule e name=Cap => ESA\n");
  const std::string s = "CIRAD conducts research in Madagascar";
  auto tokens = tokenize(s, "en");
  auto orgs = match_organizations(s, tokens, rs);
  REQUIRE(orgs.size() == 1);
  CHECK(orgs[0].surface == "CIRAD");
  CHECK(orgs[0].span == Span{0, 5});
  CHECK(orgs[0].trigger == "o");
  CHECK(surfaces(match_esa(s, tokens, rs, orgs)) == std::vector<std::string>{"Madagascar"});
}

TEST_CASE("ESR wraps earlier ESAs and takes the indicator category") {
  auto rs = parse_rules("rule e name=Cap => ESA\nrule r ind=@adj anchor=ESA => ESR\n");
  const std::string s = "farms close to Dakar";
  auto tokens = tokenize(s, "en");
  auto esas = match_esa(s, tokens, rs);
  auto esrs = match_esr(s, tokens, esas, rs);
  REQUIRE(esrs.size() == 1);
  CHECK(esrs[0].surface == "close to Dakar");
  CHECK(esrs[0].kind == SpatialKind::Relative);
  CHECK(esrs[0].relation == IndicatorCategory::Adjacency);
  CHECK(esrs[0].anchors == std::vector<std::string>{"0"});
}

TEST_CASE("explicit relation label overrides the indicator") {
  auto rs = parse_rules("rule e name=Cap => ESA\nrule r ind=@adj anchor=ESA => ESR:Inclusion\n");
  const std::string s = "near Dakar";
  auto tokens = tokenize(s, "en");
  auto esrs = match_esr(s, tokens, match_esa(s, tokens, rs), rs);
  REQUIRE(esrs.size() == 1);
  CHECK(esrs[0].relation == IndicatorCategory::Inclusion);
}

TEST_CASE("external toponym lexicon is filled from the gazetteer") {
  auto rs = RuleSet::parse("lang en\nlexicon toponym - @external\nrule t name=@toponym&Cap => ESA\n", lexicon_dir());
  CHECK(rs.missing_lexicons() == std::vector<std::string>{"toponym"});
  RuleLibrary lib;
  lib.add(std::move(rs), Gazetteer::parse("1\tSaint-Louis\tSaint Louis\tCity\t16\t-16.5\tSN\t10\n"));
  const RuleSet* en = lib.for_lang("en");
  REQUIRE(en != nullptr);
  CHECK(en->missing_lexicons().empty());
  const std::string s = "Trade in Saint Louis grew.";
  CHECK(surfaces(match_esa(s, tokenize(s, "en"), *en)) == std::vector<std::string>{"Saint Louis"});
  CHECK(lib.for_lang("de") == nullptr);
}

TEST_CASE("shipped rule files load for both languages") {
  const auto& r = testing::fixture_resources();
  CHECK(r->rules.languages() == std::vector<std::string>{"en", "fr"});
  for (const auto& lang : {"en", "fr"}) {
    const RuleSet* rs = r->rules.for_lang(lang);
    REQUIRE(rs != nullptr);
    CHECK_NOTHROW(rs->validate());
    CHECK(rs->lexicon("toponym")->size() > 50);
  }
}

}
