#include "doctest.h"
#include "mti/error.hpp"
#include "mti/temporal.hpp"
#include "mti/text.hpp"
#include "test_support.hpp"

using namespace mti;

namespace {

const TemporalLexicon& lex(const std::string& lang) {
  return *testing::fixture_resources()->temporal.for_lang(lang);
}

std::vector<TemporalEntity> run(const std::string& lang, const std::string& text,
                                 const std::optional<CalendarDate>& dct = std::nullopt) {
  return annotate_temporal(text, lex(lang), dct);
}

}  // namespace

TEST_SUITE("temporal") {

TEST_CASE("calendar dates") {
  CalendarDate d{2004, 3, 0};
  CHECK(d.granularity() == Granularity::Month);
  CHECK(d.iso() == "2004-03");
  CHECK(CalendarDate::parse_iso("2004-03") == d);
  CHECK(CalendarDate::parse_iso("2004-03-12").granularity() == Granularity::Day);
  CHECK(CalendarDate{1970, 1, 1}.first_day() == 0);
  CHECK(CalendarDate{1970, 0, 0}.last_day() == 364);
  CHECK(CalendarDate{2000, 2, 0}.last_day() - CalendarDate{2000, 2, 0}.first_day() == 28);
  CHECK(CalendarDate{1900, 2, 0}.last_day() - CalendarDate{1900, 2, 0}.first_day() == 27);
  CHECK_FALSE(CalendarDate{2001, 2, 29}.valid());
  CHECK_FALSE(CalendarDate{2001, 13, 0}.valid());
  CHECK_THROWS_AS(CalendarDate::parse_iso("2004/03"), Error);
}

TEST_CASE("year range becomes a period") {
  auto t = run("en", "Yields fell from 1990 to 2000 in the valley.");
  REQUIRE(t.size() == 1);
  CHECK(t[0].surface == "from 1990 to 2000");
  CHECK(t[0].category == TemporalCategory::Period);
  CHECK(t[0].begin == CalendarDate{1990, 0, 0});
  CHECK(t[0].end == CalendarDate{2000, 0, 0});
  CHECK(t[0].begin.granularity() == Granularity::Year);
  CHECK(t[0].value() == "1990/2000");
  CHECK(t[0].begin.first_day() == CalendarDate{1990, 1, 1}.first_day());
  CHECK(t[0].end.last_day() == CalendarDate{2000, 12, 31}.first_day());
}

TEST_CASE("month and year") {
  auto t = run("en", "The survey of March 2004 was repeated.");
  REQUIRE(t.size() == 1);
  CHECK(t[0].surface == "March 2004");
  CHECK(t[0].category == TemporalCategory::Date);
  CHECK(t[0].value() == "2004-03");
  CHECK(t[0].begin.granularity() == Granularity::Month);
  CHECK(t[0].end == t[0].begin);
}

TEST_CASE("words without a calendar value") {
  CHECK(run("en", "monthly rainfall").empty());
  CHECK(run("en", "").empty());
  CHECK(run("en", "The crop lost 1500 ha and 2010 km of canals.").empty());
}

TEST_CASE("french day month year") {
  auto t = run("fr", "Le 12 mars 2004, la crue a atteint Dakar.");
  REQUIRE(t.size() == 1);
  CHECK(t[0].surface == "12 mars 2004");
  CHECK(t[0].value() == "2004-03-12");
}

TEST_CASE("decades") {
  auto fr = run("fr", "Depuis les années 1990, la pluviométrie baisse.");
  REQUIRE(fr.size() == 1);
  CHECK(fr[0].surface == "années 1990");
  CHECK(fr[0].category == TemporalCategory::Period);
  CHECK(fr[0].value() == "1990/1999");
  auto en = run("en", "Droughts in the 1990s hit the Sahel.");
  REQUIRE(en.size() == 1);
  CHECK(en[0].surface == "1990s");
  CHECK(en[0].value() == "1990/1999");
}

TEST_CASE("french ranges") {
  auto t = run("fr", "entre 1990 et 2000 puis de 2001 à 2005");
  REQUIRE(t.size() == 2);
  CHECK(t[0].value() == "1990/2000");
  CHECK(t[1].value() == "2001/2005");
}

TEST_CASE("hyphenated year range") {
  auto t = run("en", "during 1990-2000");
  REQUIRE(t.size() == 1);
  CHECK(t[0].surface == "1990-2000");
  CHECK(t[0].category == TemporalCategory::Period);
}

TEST_CASE("relative expressions need a creation date") {
  CHECK(run("en", "Prices rose last year.").empty());
  auto t = run("en", "Prices rose last year.", CalendarDate{2015, 0, 0});
  REQUIRE(t.size() == 1);
  CHECK(t[0].surface == "last year");
  CHECK(t[0].value() == "2014");
}

TEST_CASE("years outside the window are not dates") {
  CHECK(run("en", "A sample of 3500 plots.").empty());
  TemporalConfig narrow{1950, 2030};
  CHECK(annotate_temporal("in 1900 and 1960", lex("en"), std::nullopt, narrow).size() == 1);
}

TEST_CASE("document ids follow output order") {
  Document d;
  d.abstracts = {{"fr", "En 1998 et en 2004."}, {"en", "In 2010."}};
  auto t = annotate_temporal(d, TemporalResources{&testing::fixture_resources()->temporal, {}});
  REQUIRE(t.size() == 3);
  CHECK(t[0].id == "t1");
  CHECK(t[2].id == "t3");
  CHECK(t[2].segment == 1);
}

TEST_CASE("spans never overlap and sit on the text") {
  const std::string s = "From 1990 to 2000, and in March 2004, then the 1990s, 12 May 2010 and 1995-1996.";
  auto t = run("en", s);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(text::scalar_substr(s, t[i].span.start, t[i].span.end) == t[i].surface);
    if (i) CHECK(t[i - 1].span.end <= t[i].span.start);
  }
}

TEST_CASE("lexicon file syntax") {
  auto l = TemporalLexicon::parse("month\tjanvier\t1\nrange\tentre\tet\n# c\nblock_after\tkm\n", "fr");
  CHECK(l.months.at("janvier") == 1);
  CHECK(l.ranges.size() == 1);
  CHECK(l.block_after.count("km"));
  CHECK_THROWS_AS(TemporalLexicon::parse("month\tjanvier\n", "fr"), Error);
  CHECK_THROWS_AS(TemporalLexicon::parse("weekday\tlundi\t1\n", "fr"), Error);
}

}
