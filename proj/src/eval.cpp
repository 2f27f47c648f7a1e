#include "mti/eval.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

using nlohmann::ordered_json;

std::string_view to_string(EvalCategory c) {
  switch (c) {
    case EvalCategory::Esa: return "ESA";
    case EvalCategory::Esr: return "ESR";
    case EvalCategory::Organization: return "Organization";
    case EvalCategory::Temporal: return "Temporal";
    case EvalCategory::Thematic: return "Thematic";
  }
  return "ESA";
}

EvalCategory eval_category_from_string(std::string_view s) {
  for (const auto c : kEvalCategories) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown category '" + std::string(s) + "'");
}

std::string_view to_string(MatchMode m) { return m == MatchMode::ExactSpan ? "exact" : "overlap"; }

MatchMode match_mode_from_string(std::string_view s) {
  if (s == "exact") return MatchMode::ExactSpan;
  if (s == "overlap") return MatchMode::Overlap;
  throw Error(ErrorCode::InvalidArgument, "unknown match mode '" + std::string(s) + "' (exact|overlap)");
}

std::vector<GoldDocument> parse_gold(std::string_view json) {
  try {
    const auto j = ordered_json::parse(json);
    std::vector<GoldDocument> out;
    for (const auto& d : j) {
      GoldDocument g;
      g.id = d.at("id").get<std::string>();
      g.lang = d.at("lang").get<std::string>();
      g.text = d.at("text").get<std::string>();
      const std::size_t length = text::scalar_length(g.text);
      for (const auto& s : d.at("spans")) {
        GoldSpan gs{{s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>()},
                    eval_category_from_string(s.at("category").get<std::string>())};
        if (gs.span.start >= gs.span.end || gs.span.end > length) {
          throw Error(ErrorCode::MalformedInput, "gold span out of bounds in " + g.id);
        }
        g.spans.push_back(gs);
      }
      out.push_back(std::move(g));
    }
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("gold file: ") + ex.what());
  }
}

std::vector<GoldDocument> load_gold(const std::filesystem::path& file) { return parse_gold(read_file(file)); }

std::string gold_to_json(const std::vector<GoldDocument>& gold) {
  ordered_json j = ordered_json::array();
  for (const auto& g : gold) {
    ordered_json d;
    d["id"] = g.id;
    d["lang"] = g.lang;
    d["text"] = g.text;
    d["spans"] = ordered_json::array();
    for (const auto& s : g.spans) {
      d["spans"].push_back({{"start", s.span.start}, {"end", s.span.end}, {"category", to_string(s.category)}});
    }
    j.push_back(std::move(d));
  }
  return j.dump(2);
}

Document document_from_gold(const GoldDocument& gold) {
  Document d;
  d.id = gold.id;
  d.source = Source::Other;
  d.abstracts.push_back({gold.lang, gold.text});
  d.languages.push_back(gold.lang);
  return d;
}

std::vector<GoldSpan> spans_from_record(const ModsTiRecord& r) {
  std::vector<GoldSpan> out;
  for (const auto& e : r.spatial) {
    if (e.segment == 0) out.push_back({e.span, e.kind == SpatialKind::Absolute ? EvalCategory::Esa : EvalCategory::Esr});
  }
  for (const auto& e : r.organizations) {
    if (e.segment == 0) out.push_back({e.span, EvalCategory::Organization});
  }
  for (const auto& e : r.temporal) {
    if (e.segment == 0) out.push_back({e.span, EvalCategory::Temporal});
  }
  for (const auto& e : r.thematic) {
    if (e.segment == 0) out.push_back({e.span, EvalCategory::Thematic});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<double> CategoryScore::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> CategoryScore::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double CategoryScore::f1() const {
  const auto p = precision();
  const auto r = recall();
  if (!p || !r) return 0;
  return f_measure(*p, *r);
}

CategoryScore& CategoryScore::operator+=(const CategoryScore& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

double f_measure(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0; }

CategoryScore EvalReport::spatial() const {
  CategoryScore s;
  for (const auto c : {EvalCategory::Esa, EvalCategory::Esr}) {
    if (const auto it = categories.find(c); it != categories.end()) s += it->second;
  }
  return s;
}

CategoryScore EvalReport::overall() const {
  CategoryScore s;
  for (const auto& [c, v] : categories) s += v;
  return s;
}

namespace {

ordered_json score_json(const CategoryScore& s) {
  ordered_json j;
  j["tp"] = s.tp;
  j["fp"] = s.fp;
  j["fn"] = s.fn;
  const auto p = s.precision();
  const auto r = s.recall();
  j["precision"] = p ? ordered_json(*p) : ordered_json(nullptr);
  j["recall"] = r ? ordered_json(*r) : ordered_json(nullptr);
  j["f1"] = s.f1();
  return j;
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream o;
  o << std::fixed << std::setprecision(1) << *v * 100 << "%";
  return o.str();
}

}  // namespace

std::string EvalReport::to_json() const {
  ordered_json j;
  j["mode"] = to_string(mode);
  ordered_json cats = ordered_json::object();
  for (const auto c : kEvalCategories) {
    const auto it = categories.find(c);
    cats[std::string(to_string(c))] = score_json(it == categories.end() ? CategoryScore{} : it->second);
  }
  j["categories"] = cats;
  j["spatial"] = score_json(spatial());
  j["overall"] = score_json(overall());
  return j.dump(2);
}

EvalReport EvalReport::from_json(std::string_view json) {
  try {
    const auto j = ordered_json::parse(json);
    EvalReport r;
    r.mode = match_mode_from_string(j.at("mode").get<std::string>());
    for (const auto& [k, v] : j.at("categories").items()) {
      r.categories[eval_category_from_string(k)] = {v.at("tp").get<std::size_t>(), v.at("fp").get<std::size_t>(),
                                                    v.at("fn").get<std::size_t>()};
    }
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("eval report: ") + ex.what());
  }
}

std::string EvalReport::to_table() const {
  std::ostringstream o;
  o << "match mode: " << to_string(mode) << "\n";
  o << std::left << std::setw(14) << "Category" << std::right << std::setw(6) << "TP" << std::setw(6) << "FP"
    << std::setw(6) << "FN" << std::setw(11) << "Precision" << std::setw(9) << "Recall" << std::setw(11)
    << "F-measure" << "\n";
  auto row = [&](std::string_view name, const CategoryScore& s) {
    std::ostringstream f;
    f << std::fixed << std::setprecision(3) << s.f1();
    o << std::left << std::setw(14) << name << std::right << std::setw(6) << s.tp << std::setw(6) << s.fp
      << std::setw(6) << s.fn << std::setw(11) << pct(s.precision()) << std::setw(9) << pct(s.recall())
      << std::setw(11) << f.str() << "\n";
  };
  for (const auto c : kEvalCategories) {
    const auto it = categories.find(c);
    row(to_string(c), it == categories.end() ? CategoryScore{} : it->second);
  }
  row("Spatial", spatial());
  row("Overall", overall());
  return o.str();
}

std::size_t matched_pairs(const std::vector<Span>& gold, const std::vector<Span>& predicted, MatchMode mode) {
  auto compatible = [&](const Span& g, const Span& p) { return mode == MatchMode::ExactSpan ? g == p : g.overlaps(p); };
  std::vector<std::size_t> g_order(gold.size());
  std::vector<std::size_t> p_order(predicted.size());
  for (std::size_t i = 0; i < gold.size(); ++i) g_order[i] = i;
  for (std::size_t i = 0; i < predicted.size(); ++i) p_order[i] = i;
  std::stable_sort(g_order.begin(), g_order.end(), [&](auto a, auto b) { return gold[a] < gold[b]; });
  std::stable_sort(p_order.begin(), p_order.end(), [&](auto a, auto b) { return predicted[a] < predicted[b]; });

  // Augmenting paths (Kuhn); the greedy left-to-right pass is its first step
  // and later gold spans may re-route earlier pairs to reach a maximum pairing.
  std::vector<std::optional<std::size_t>> owner(predicted.size());
  std::vector<char> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t g) {
    for (const auto p : p_order) {
      if (visited[p] || !compatible(gold[g], predicted[p])) continue;
      visited[p] = 1;
      if (!owner[p] || augment(*owner[p])) {
        owner[p] = g;
        return true;
      }
    }
    return false;
  };
  std::size_t pairs = 0;
  for (const auto g : g_order) {
    visited.assign(predicted.size(), 0);
    if (augment(g)) ++pairs;
  }
  return pairs;
}

EvalReport score(const std::vector<GoldDocument>& gold, const std::map<std::string, std::vector<GoldSpan>>& predicted,
                 MatchMode mode) {
  std::map<std::string, const GoldDocument*> by_id;
  for (const auto& g : gold) by_id[g.id] = &g;
  for (const auto& [id, spans] : predicted) {
    if (!by_id.count(id)) throw Error(ErrorCode::UnknownDocId, "prediction for unknown document " + id);
  }
  EvalReport report;
  report.mode = mode;
  for (const auto c : kEvalCategories) report.categories[c] = {};
  static const std::vector<GoldSpan> none;
  for (const auto& g : gold) {
    const auto it = predicted.find(g.id);
    const auto& preds = it == predicted.end() ? none : it->second;
    for (const auto c : kEvalCategories) {
      std::vector<Span> gs;
      std::vector<Span> ps;
      for (const auto& s : g.spans) {
        if (s.category == c) gs.push_back(s.span);
      }
      for (const auto& s : preds) {
        if (s.category == c) ps.push_back(s.span);
      }
      const std::size_t tp = matched_pairs(gs, ps, mode);
      auto& cs = report.categories[c];
      cs.tp += tp;
      cs.fp += ps.size() - tp;
      cs.fn += gs.size() - tp;
    }
  }
  return report;
}

std::string CorpusStats::to_json() const {
  ordered_json j;
  j["documents"] = documents;
  j["words"] = words;
  j["meanWords"] = mean_words();
  ordered_json s = ordered_json::object();
  for (const auto c : kEvalCategories) {
    const auto it = spans.find(c);
    s[std::string(to_string(c))] = it == spans.end() ? 0 : it->second;
  }
  j["spans"] = s;
  return j.dump(2);
}

CorpusStats corpus_stats(const std::vector<GoldDocument>& gold) {
  CorpusStats st;
  for (const auto c : kEvalCategories) st.spans[c] = 0;
  for (const auto& g : gold) {
    ++st.documents;
    bool in_word = false;
    bool has_alnum = false;
    for (const auto& sc : text::decode(g.text)) {
      if (text::is_space(sc.value)) {
        if (in_word && has_alnum) ++st.words;
        in_word = has_alnum = false;
        continue;
      }
      in_word = true;
      has_alnum = has_alnum || text::is_letter(sc.value) || text::is_digit(sc.value);
    }
    if (in_word && has_alnum) ++st.words;
    for (const auto& s : g.spans) ++st.spans[s.category];
  }
  return st;
}

}  // namespace mti
