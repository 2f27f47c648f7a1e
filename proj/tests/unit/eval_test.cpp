#include <random>

#include "doctest.h"
#include "eval_fixtures.hpp"
#include "mti/error.hpp"
#include "mti/eval.hpp"
#include "test_support.hpp"

using namespace mti;

namespace {

CategoryScore scored(const testing::Counts& c, MatchMode mode = MatchMode::ExactSpan) {
  auto [gold, pred] = testing::build_counts(c);
  return score(gold, pred, mode).categories.at(EvalCategory::Esa);
}

std::vector<GoldDocument> random_gold(std::mt19937& rng, std::map<std::string, std::vector<GoldSpan>>& pred) {
  std::vector<GoldDocument> gold;
  for (int d = 0; d < 5; ++d) {
    GoldDocument g;
    g.id = "d" + std::to_string(d);
    g.lang = "en";
    g.text = std::string(60, 'x');
    auto random_span = [&] {
      std::size_t s = rng() % 55;
      return GoldSpan{{s, s + 1 + rng() % 5}, kEvalCategories[rng() % kEvalCategories.size()]};
    };
    for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i) g.spans.push_back(random_span());
    auto& p = pred[g.id];
    for (const auto& s : g.spans) {
      if (rng() % 2) p.push_back(s);
    }
    for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) p.push_back(random_span());
    gold.push_back(g);
  }
  return gold;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("F-measure from precision and recall") {
  CHECK(std::abs(f_measure(0.62, 0.91) - 0.74) <= 0.005);
  CHECK(std::abs(f_measure(1.00, 0.90) - 0.947) <= 0.001);
  CHECK(std::abs(f_measure(0.90, 0.60) - 0.72) <= 0.005);
  CHECK(f_measure(0, 0) == 0);
  CHECK(f_measure(0.3, 0.8) == doctest::Approx(f_measure(0.8, 0.3)));
}

TEST_CASE("counts with the stated precision and recall") {
  auto a = scored({2821, 1729, 279});
  CHECK(*a.precision() == doctest::Approx(0.62));
  CHECK(*a.recall() == doctest::Approx(0.91));
  CHECK(std::abs(a.f1() - 0.74) <= 0.005);
  auto b = scored({9, 0, 1});
  CHECK(*b.precision() == 1.0);
  CHECK(std::abs(b.f1() - 0.947) <= 0.001);
  auto c = scored({9, 1, 6});
  CHECK(std::abs(c.f1() - 0.72) <= 0.005);
}

TEST_CASE("undefined precision and recall") {
  CategoryScore s;
  CHECK_FALSE(s.precision().has_value());
  CHECK_FALSE(s.recall().has_value());
  CHECK(s.f1() == 0);
  s.fn = 3;
  CHECK(*s.recall() == 0);
  CHECK_FALSE(s.precision().has_value());
}

TEST_CASE("identical gold and prediction") {
  auto gold = load_gold(testing::gold_dir() / "gold.json");
  std::map<std::string, std::vector<GoldSpan>> pred;
  for (const auto& g : gold) pred[g.id] = g.spans;
  for (auto mode : {MatchMode::ExactSpan, MatchMode::Overlap}) {
    auto r = score(gold, pred, mode);
    for (const auto& [cat, s] : r.categories) {
      CHECK(s.fp == 0);
      CHECK(s.fn == 0);
      CHECK(s.f1() == 1.0);
    }
    CHECK(r.overall().f1() == 1.0);
  }
}

TEST_CASE("count invariants and exact within overlap") {
  std::mt19937 rng(17);
  for (int round = 0; round < 100; ++round) {
    std::map<std::string, std::vector<GoldSpan>> pred;
    auto gold = random_gold(rng, pred);
    auto exact = score(gold, pred, MatchMode::ExactSpan);
    auto overlap = score(gold, pred, MatchMode::Overlap);
    for (auto cat : kEvalCategories) {
      std::size_t g = 0;
      std::size_t p = 0;
      for (const auto& d : gold) g += std::count_if(d.spans.begin(), d.spans.end(), [&](const GoldSpan& s) { return s.category == cat; });
      for (const auto& [id, v] : pred) p += std::count_if(v.begin(), v.end(), [&](const GoldSpan& s) { return s.category == cat; });
      for (const auto* r : {&exact, &overlap}) {
        const auto& s = r->categories.at(cat);
        CHECK(s.tp + s.fn == g);
        CHECK(s.tp + s.fp == p);
        CHECK(s.f1() >= 0);
        CHECK(s.f1() <= 1);
        CHECK((s.f1() == 0) == (s.tp == 0));
      }
      CHECK(exact.categories.at(cat).tp <= overlap.categories.at(cat).tp);
    }
  }
}

TEST_CASE("maximum pairing beats first-fit") {
  std::vector<Span> gold = {{0, 10}, {8, 12}};
  std::vector<Span> pred = {{9, 11}, {0, 2}};
  CHECK(matched_pairs(gold, pred, MatchMode::Overlap) == 2);
  CHECK(matched_pairs(gold, pred, MatchMode::ExactSpan) == 0);
  CHECK(matched_pairs({{0, 3}, {0, 3}}, {{0, 3}}, MatchMode::ExactSpan) == 1);
}

TEST_CASE("empty gold") {
  auto r = score({}, {}, MatchMode::ExactSpan);
  CHECK(r.overall() == CategoryScore{});
  auto stats = corpus_stats({});
  CHECK(stats.documents == 0);
  CHECK(stats.words == 0);
  CHECK(stats.mean_words() == 0);
}

TEST_CASE("prediction for an unknown document") {
  std::map<std::string, std::vector<GoldSpan>> pred = {{"ghost", {}}};
  try {
    score({}, pred, MatchMode::ExactSpan);
    FAIL("expected UnknownDocId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownDocId);
  }
}

TEST_CASE("gold documents without predictions are all misses") {
  auto [gold, pred] = testing::build_counts({2, 0, 1}, EvalCategory::Temporal);
  auto r = score(gold, {}, MatchMode::Overlap);
  CHECK(r.categories.at(EvalCategory::Temporal).fn == 3);
}

TEST_CASE("category must match too") {
  GoldDocument g{"d", "en", "xxxxxxxx", {{{0, 3}, EvalCategory::Esa}}};
  std::map<std::string, std::vector<GoldSpan>> pred = {{"d", {{{0, 3}, EvalCategory::Esr}}}};
  auto r = score({g}, pred, MatchMode::ExactSpan);
  CHECK(r.categories.at(EvalCategory::Esa).fn == 1);
  CHECK(r.categories.at(EvalCategory::Esr).fp == 1);
}

TEST_CASE("shipped French fixture counts") {
  auto gold = load_gold(testing::gold_dir() / "gold.json");
  std::vector<GoldDocument> fr;
  for (const auto& g : gold) {
    if (g.lang == "fr") fr.push_back(g);
  }
  auto s = corpus_stats(fr);
  CHECK(s.documents == 10);
  CHECK(s.words == 2351);
  CHECK(s.mean_words() == doctest::Approx(235.1));
  CHECK(s.spans[EvalCategory::Esa] == 35);
  CHECK(s.spans[EvalCategory::Esr] == 12);
  CHECK(s.spans[EvalCategory::Organization] == 9);
  CHECK(s.spans[EvalCategory::Temporal] == 26);
  CHECK(s.spans[EvalCategory::Thematic] == 83);
  auto all = corpus_stats(gold);
  CHECK(all.words == 2351 + 2055);
}

TEST_CASE("word count definition") {
  GoldDocument g{"d", "en", "Hello ,  world -- 1990 l'est\n(x)", {}};
  CHECK(corpus_stats({g}).words == 5);
}

TEST_CASE("gold file checks spans against the text") {
  CHECK_THROWS_AS(parse_gold(R"([{"id":"a","lang":"en","text":"abc","spans":[{"start":1,"end":9,"category":"ESA"}]}])"), Error);
  CHECK_THROWS_AS(parse_gold(R"([{"id":"a","lang":"en","text":"abc","spans":[{"start":0,"end":1,"category":"Place"}]}])"), Error);
  auto gold = load_gold(testing::gold_dir() / "gold.json");
  CHECK(parse_gold(gold_to_json(gold)) == gold);
}

TEST_CASE("report JSON and table") {
  auto [gold, pred] = testing::build_counts({9, 1, 6});
  auto r = score(gold, pred, MatchMode::Overlap);
  CHECK(EvalReport::from_json(r.to_json()) == r);
  const auto table = r.to_table();
  CHECK(table.find("ESA") != std::string::npos);
  CHECK(table.find("Thematic") != std::string::npos);
  CHECK(r.mode == MatchMode::Overlap);
}

}
