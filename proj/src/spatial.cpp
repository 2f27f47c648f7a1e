#include "mti/spatial.hpp"

#include <algorithm>
#include <set>

#include "mti/error.hpp"
#include "mti/text.hpp"

namespace mti {

RuleLibrary RuleLibrary::load(const std::filesystem::path& dir, const Gazetteer& gazetteer) {
  RuleLibrary lib;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::IoFailure, "rules directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rules") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) lib.add(RuleSet::load(f), gazetteer);
  return lib;
}

void RuleLibrary::add(RuleSet rules, const Gazetteer& gazetteer) {
  for (const auto& name : rules.missing_lexicons()) {
    if (name != "toponym") throw Error(ErrorCode::MalformedRule, "no provider for external lexicon @" + name);
    Lexicon lex(name, std::nullopt);
    for (const auto& n : gazetteer.names()) lex.add(n, rules.lang());
    rules.set_lexicon(std::move(lex));
  }
  rules.validate();
  std::string lang = rules.lang();
  sets_[lang] = std::move(rules);
}

const RuleSet* RuleLibrary::for_lang(std::string_view lang) const {
  const auto it = sets_.find(lang);
  return it == sets_.end() ? nullptr : &it->second;
}

std::vector<std::string> RuleLibrary::languages() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : sets_) out.push_back(k);
  return out;
}

namespace {

Span token_span(const std::vector<Token>& tokens, std::size_t b, std::size_t e) {
  return {tokens[b].start, tokens[e - 1].end};
}

std::string surface(std::string_view text, const std::vector<Token>& tokens, std::size_t b, std::size_t e) {
  return std::string(text.substr(tokens[b].byte_begin, tokens[e - 1].byte_end - tokens[b].byte_begin));
}

std::pair<std::size_t, std::size_t> tokens_of(const std::vector<Token>& tokens, const Span& span) {
  std::size_t b = 0;
  while (b < tokens.size() && tokens[b].start < span.start) ++b;
  std::size_t e = b;
  while (e < tokens.size() && tokens[e].end <= span.end) ++e;
  return {b, e};
}

std::vector<SpatialIndicator> indicators_of(std::string_view text, const std::vector<Token>& tokens,
                                            const RuleMatch& m, const std::string& lang) {
  std::vector<SpatialIndicator> out;
  for (const auto& c : m.captures) {
    if (c.role == "ctx" || c.lexicon == nullptr || !c.lexicon->category()) continue;
    out.push_back({surface(text, tokens, c.begin, c.end), *c.lexicon->category(), lang, token_span(tokens, c.begin, c.end)});
  }
  return out;
}

}  // namespace

std::vector<OrganizationEntity> match_organizations(std::string_view text, const std::vector<Token>& tokens,
                                                    const RuleSet& rules) {
  std::vector<OrganizationEntity> out;
  for (const auto& m : resolve_overlaps(find_matches(rules, RuleLabel::Organization, tokens))) {
    OrganizationEntity o;
    o.surface = surface(text, tokens, m.begin, m.end);
    o.span = token_span(tokens, m.begin, m.end);
    o.trigger = m.rule->id;
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<SpatialEntity> match_esa(std::string_view text, const std::vector<Token>& tokens, const RuleSet& rules,
                                     const std::vector<OrganizationEntity>& organizations) {
  std::vector<std::pair<std::size_t, std::size_t>> blocked;
  for (const auto& o : organizations) blocked.push_back(tokens_of(tokens, o.span));
  std::vector<SpatialEntity> out;
  for (const auto& m : resolve_overlaps(find_matches(rules, RuleLabel::Esa, tokens), blocked)) {
    SpatialEntity e;
    e.kind = SpatialKind::Absolute;
    e.surface = surface(text, tokens, m.begin, m.end);
    e.span = token_span(tokens, m.begin, m.end);
    e.rule = m.rule->id;
    e.indicators = indicators_of(text, tokens, m, rules.lang());
    std::optional<std::size_t> hb;
    std::size_t he = 0;
    for (const auto& c : m.captures) {
      if (c.role != "name") continue;
      if (!hb) hb = c.begin;
      he = std::max(he, c.end);
    }
    e.head = hb ? surface(text, tokens, *hb, he) : e.surface;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<SpatialEntity> match_esr(std::string_view text, const std::vector<Token>& tokens,
                                     const std::vector<SpatialEntity>& esas, const RuleSet& rules) {
  EsaTokenSpans spans;
  for (const auto& e : esas) spans.push_back(tokens_of(tokens, e.span));
  std::vector<SpatialEntity> out;
  for (const auto& m : resolve_overlaps(find_matches(rules, RuleLabel::Esr, tokens, spans))) {
    SpatialEntity e;
    e.kind = SpatialKind::Relative;
    e.surface = surface(text, tokens, m.begin, m.end);
    e.span = token_span(tokens, m.begin, m.end);
    e.rule = m.rule->id;
    e.indicators = indicators_of(text, tokens, m, rules.lang());
    for (const auto& c : m.captures) {
      if (c.esa) e.anchors.push_back(std::to_string(*c.esa));
    }
    e.relation = m.rule->relation;
    if (!e.relation) {
      for (const auto& ind : e.indicators) {
        if (ind.category != IndicatorCategory::FeatureType) {
          e.relation = ind.category;
          break;
        }
      }
    }
    const auto& first = esas[std::stoul(e.anchors.front())];
    e.head = first.head;
    out.push_back(std::move(e));
  }
  return out;
}

void populate_candidates(SpatialEntity& entity, const Gazetteer& gazetteer, const FeatureTypeMap& feature_types) {
  std::optional<std::set<FeatureClass>> filter;
  for (const auto& ind : entity.indicators) {
    if (ind.category != IndicatorCategory::FeatureType) continue;
    const auto classes = feature_types.classes_for(text::fold(ind.surface));
    if (classes.empty()) continue;
    if (!filter) filter.emplace();
    filter->insert(classes.begin(), classes.end());
  }
  std::vector<GazetteerEntry> found = gazetteer.lookup(entity.surface, filter);
  if (text::fold(entity.head) != text::fold(entity.surface)) {
    for (auto& g : gazetteer.lookup(entity.head, filter)) {
      if (std::none_of(found.begin(), found.end(), [&](const GazetteerEntry& f) { return f.id == g.id; })) {
        found.push_back(std::move(g));
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const GazetteerEntry& a, const GazetteerEntry& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.id < b.id;
  });
  entity.candidates.clear();
  for (const auto& g : found) entity.candidates.push_back(g.id);
}

void disambiguate(SpatialEntity& entity, const std::vector<std::string>& context_countries, const Gazetteer& gazetteer,
                  const DisambiguationWeights& weights) {
  entity.footprint.reset();
  entity.confidence = 0;
  std::vector<const GazetteerEntry*> cands;
  for (const auto id : entity.candidates) {
    if (const auto* g = gazetteer.find(id)) cands.push_back(g);
  }
  if (cands.empty()) return;
  std::int64_t max_importance = 0;
  for (const auto* g : cands) max_importance = std::max(max_importance, g->importance);
  std::vector<double> scores;
  for (const auto* g : cands) {
    double share = 0;
    if (!context_countries.empty()) {
      const auto n = std::count(context_countries.begin(), context_countries.end(), g->country);
      share = static_cast<double>(n) / static_cast<double>(context_countries.size());
    }
    const double prior = max_importance > 0 ? static_cast<double>(g->importance) / static_cast<double>(max_importance) : 0;
    scores.push_back(weights.context * share + weights.importance * prior);
  }
  std::size_t best = 0;
  double sum = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum += scores[i];
    if (scores[i] > scores[best]) best = i;
  }
  entity.footprint = Footprint{cands[best]->id, cands[best]->lat, cands[best]->lon};
  entity.confidence = sum > 0 ? scores[best] / sum : 1.0 / static_cast<double>(cands.size());
}

SpatialAnnotations annotate_spatial(const Document& doc, const SpatialResources& res) {
  SpatialAnnotations out;
  struct Pending {
    SpatialEntity entity;
    std::vector<std::size_t> anchors;  // indices into the document-wide list
  };
  std::vector<Pending> all;
  for (std::size_t seg = 0; seg < doc.abstracts.size(); ++seg) {
    const auto& a = doc.abstracts[seg];
    const RuleSet* rules = res.rules ? res.rules->for_lang(a.lang) : nullptr;
    if (rules == nullptr) continue;
    const auto tokens = tokenize(a.text, a.lang);
    auto orgs = match_organizations(a.text, tokens, *rules);
    auto esas = match_esa(a.text, tokens, *rules, orgs);
    auto esrs = match_esr(a.text, tokens, esas, *rules);
    const std::size_t base = all.size();
    for (auto& e : esas) {
      e.segment = seg;
      all.push_back({std::move(e), {}});
    }
    for (auto& e : esrs) {
      e.segment = seg;
      Pending p{std::move(e), {}};
      for (const auto& idx : p.entity.anchors) p.anchors.push_back(base + std::stoul(idx));
      all.push_back(std::move(p));
    }
    for (auto& o : orgs) {
      o.segment = seg;
      out.organizations.push_back(std::move(o));
    }
  }

  // Absolute entities: candidates, then two rounds of context scoring. The
  // first round only trusts unambiguous entities as context.
  if (res.gazetteer && res.feature_types) {
    for (auto& p : all) {
      if (p.entity.kind == SpatialKind::Absolute) populate_candidates(p.entity, *res.gazetteer, *res.feature_types);
    }
    auto countries_except = [&](std::size_t skip, bool only_unambiguous) {
      std::vector<std::string> c;
      for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& e = all[i].entity;
        if (i == skip || e.kind != SpatialKind::Absolute) continue;
        if (only_unambiguous) {
          if (e.candidates.size() != 1) continue;
          if (const auto* g = res.gazetteer->find(e.candidates.front())) c.push_back(g->country);
        } else if (e.footprint) {
          if (const auto* g = res.gazetteer->find(e.footprint->gazetteer_id)) c.push_back(g->country);
        }
      }
      return c;
    };
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].entity.kind == SpatialKind::Absolute) {
        disambiguate(all[i].entity, countries_except(i, true), *res.gazetteer, res.weights);
      }
    }
    std::vector<std::vector<std::string>> contexts;
    for (std::size_t i = 0; i < all.size(); ++i) contexts.push_back(countries_except(i, false));
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].entity.kind == SpatialKind::Absolute) disambiguate(all[i].entity, contexts[i], *res.gazetteer, res.weights);
    }
  }
  for (auto& p : all) {
    if (p.entity.kind != SpatialKind::Relative) continue;
    const auto& anchor = all[p.anchors.front()].entity;
    p.entity.candidates = anchor.candidates;
    p.entity.footprint = anchor.footprint;
    p.entity.confidence = anchor.confidence;
  }

  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = all[x].entity;
    const auto& b = all[y].entity;
    if (a.segment != b.segment) return a.segment < b.segment;
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.span.end > b.span.end;
  });
  std::vector<std::string> ids(all.size());
  for (std::size_t k = 0; k < order.size(); ++k) ids[order[k]] = "s" + std::to_string(k + 1);
  for (const auto i : order) {
    SpatialEntity e = std::move(all[i].entity);
    e.id = ids[i];
    e.anchors.clear();
    for (const auto a : all[i].anchors) e.anchors.push_back(ids[a]);
    out.spatial.push_back(std::move(e));
  }
  std::stable_sort(out.organizations.begin(), out.organizations.end(), [](const auto& a, const auto& b) {
    if (a.segment != b.segment) return a.segment < b.segment;
    return a.span.start < b.span.start;
  });
  for (std::size_t k = 0; k < out.organizations.size(); ++k) out.organizations[k].id = "o" + std::to_string(k + 1);
  return out;
}

}  // namespace mti
