#pragma once

#include <random>
#include <string>
#include <vector>

#include "mti/ingest.hpp"
#include "mti/modsti.hpp"

namespace mti::testing {

/// Random but schema-consistent annotated records, in canonical order.
class RecordGenerator {
 public:
  explicit RecordGenerator(unsigned seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::string phrase(int min_words, int max_words) {
    static const std::vector<std::string> words = {
        "Sénégal", "rice", "crue", "l'est", "delta", "A&B", "<river>", "\"quoted\"", "Œuvre", "2004", "über",
        "niño", "région", "Dakar", "x<y", "d'eau", "ﬁne", "东", "'", "basin", "Ω", "a\tb"};
    std::string s;
    const int n = uniform(min_words, max_words);
    for (int i = 0; i < n; ++i) {
      if (i) s += uniform(0, 9) == 0 ? "\n" : " ";
      s += pick(words);
    }
    return s;
  }

  Span span(std::size_t limit) {
    const auto start = static_cast<std::size_t>(uniform(0, static_cast<int>(limit) - 1));
    const auto end = start + static_cast<std::size_t>(uniform(1, 20));
    return {start, end};
  }

  CalendarDate date() {
    CalendarDate d{uniform(1000, 2100), 0, 0};
    if (coin()) {
      d.month = uniform(1, 12);
      if (coin()) d.day = uniform(1, 28);
    }
    return d;
  }

  ModsTiRecord record(const std::string& id) {
    static const std::vector<std::string> langs = {"fr", "en"};
    static const std::vector<IndicatorCategory> relations = {IndicatorCategory::Orientation, IndicatorCategory::Distance,
                                                             IndicatorCategory::Adjacency, IndicatorCategory::Inclusion,
                                                             IndicatorCategory::GeometricFigure};
    static const std::vector<Source> sources = {Source::Istex, Source::Agritrop, Source::Anrt, Source::Other};
    ModsTiRecord r;
    Document& d = r.document;
    d.id = id;
    d.source = pick(sources);
    d.title = phrase(1, 8);
    const int segments = uniform(1, 3);
    for (int i = 0; i < segments; ++i) d.abstracts.push_back({pick(langs), phrase(3, 40)});
    for (const auto& a : d.abstracts) {
      if (std::find(d.languages.begin(), d.languages.end(), a.lang) == d.languages.end()) d.languages.push_back(a.lang);
    }
    const int extras = uniform(0, 3);
    for (int i = 0; i < extras; ++i) d.extra.emplace_back("subject/topic" + std::to_string(i), phrase(1, 3));

    const auto seg = [&] { return static_cast<std::size_t>(uniform(0, segments - 1)); };
    std::size_t next = 1;
    const auto fresh = [&](char prefix) { return std::string(1, prefix) + std::to_string(next++); };

    std::vector<std::string> absolute;
    const int esas = uniform(0, 6);
    for (int i = 0; i < esas; ++i) {
      SpatialEntity e;
      e.id = fresh('s');
      e.segment = seg();
      e.span = span(300);
      e.surface = phrase(1, 3);
      e.kind = SpatialKind::Absolute;
      if (coin()) e.head = phrase(1, 2);
      if (coin()) e.rule = "esa." + pick(langs) + "." + std::to_string(uniform(1, 9));
      if (coin()) e.indicators.push_back({phrase(1, 1), IndicatorCategory::FeatureType, pick(langs), span(300)});
      const int cands = uniform(0, 3);
      for (int k = 0; k < cands; ++k) e.candidates.push_back(uniform(1, 9000000));
      if (!e.candidates.empty() && coin()) {
        e.footprint = Footprint{pick(e.candidates), real(-90, 90), real(-180, 180)};
        e.confidence = real(0, 1);
      }
      absolute.push_back(e.id);
      r.spatial.push_back(std::move(e));
    }
    const int esrs = absolute.empty() ? 0 : uniform(0, 3);
    for (int i = 0; i < esrs; ++i) {
      SpatialEntity e;
      e.id = fresh('s');
      e.segment = seg();
      e.span = span(300);
      e.surface = phrase(2, 5);
      e.kind = SpatialKind::Relative;
      e.relation = pick(relations);
      e.indicators.push_back({phrase(1, 2), *e.relation, pick(langs), span(300)});
      const int anchors = uniform(1, 2);
      for (int k = 0; k < anchors; ++k) e.anchors.push_back(pick(absolute));
      e.confidence = real(0, 1);
      r.spatial.push_back(std::move(e));
    }
    const int orgs = uniform(0, 2);
    for (int i = 0; i < orgs; ++i) r.organizations.push_back({fresh('o'), seg(), phrase(1, 3), span(300), "org.en.1"});
    const int tes = uniform(0, 5);
    for (int i = 0; i < tes; ++i) {
      TemporalEntity t;
      t.id = fresh('t');
      t.segment = seg();
      t.span = span(300);
      t.surface = phrase(1, 4);
      t.begin = date();
      if (coin()) {
        t.category = TemporalCategory::Period;
        t.end = date();
        if (t.end.first_day() < t.begin.first_day()) std::swap(t.begin, t.end);
      } else {
        t.end = t.begin;
      }
      r.temporal.push_back(std::move(t));
    }
    const int ths = uniform(0, 6);
    for (int i = 0; i < ths; ++i) {
      ThematicEntity t;
      t.id = fresh('c');
      t.segment = seg();
      t.span = span(300);
      t.surface = phrase(1, 3);
      t.concept_id = "https://example.org/thesaurus/c" + std::to_string(uniform(1, 40));
      t.matched_via = coin() ? MatchedVia::AltLabel : MatchedVia::PrefLabel;
      const int depth = uniform(0, 3);
      for (int k = 0; k < depth; ++k) t.broader_chain.push_back("https://example.org/thesaurus/c" + std::to_string(uniform(1, 40)));
      r.thematic.push_back(std::move(t));
    }
    if (coin()) {
      Provenance p;
      p.pipeline_version = "mti 0.1.0";
      for (const auto* s : {"ingest", "spatial", "temporal", "thematic"}) {
        p.stages.push_back({s, real(0, 0.01)});
        p.total_seconds += p.stages.back().seconds;
      }
      r.provenance = p;
    }
    canonicalize(r);
    return r;
  }

 private:
  std::mt19937 rng_;
};

}  // namespace mti::testing
