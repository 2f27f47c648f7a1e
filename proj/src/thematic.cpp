#include "mti/thematic.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"
#include "mti/tokenizer.hpp"
#include "mti/xml.hpp"

namespace mti {

namespace {

constexpr std::string_view kSkosConcept = "http://www.w3.org/2004/02/skos/core#Concept";

std::string label_key(std::string_view label, std::string_view lang) {
  std::string key;
  for (const auto& t : tokenize(label, lang.empty() ? "en" : lang)) {
    if (!key.empty()) key += ' ';
    key += t.folded;
  }
  return key;
}

bool is_concept(const xml::Element& e) {
  if (e.local_name() == "Concept") return true;
  if (e.local_name() != "Description") return false;
  for (const auto* type : e.children_named("type")) {
    if (type->attribute_local("resource").value_or("") == kSkosConcept) return true;
  }
  return false;
}

void collect(const xml::Element& e, std::vector<SkosConcept>& out) {
  if (is_concept(e)) {
    SkosConcept c;
    c.id = e.attribute_local("about").value_or("");
    if (c.id.empty()) throw Error(ErrorCode::MalformedSkos, "concept without rdf:about");
    for (const auto& child : e.children) {
      const auto name = child.local_name();
      const std::string lang = child.attribute("xml:lang").value_or("");
      const std::string label = text::trim(child.text);
      if (name == "prefLabel") {
        if (label.empty()) throw Error(ErrorCode::MalformedSkos, "empty prefLabel on " + c.id);
        if (!c.pref_labels.emplace(lang, label).second) {
          throw Error(ErrorCode::MalformedSkos, "two prefLabels for language '" + lang + "' on " + c.id);
        }
      } else if (name == "altLabel") {
        if (label.empty()) throw Error(ErrorCode::MalformedSkos, "empty altLabel on " + c.id);
        c.alt_labels[lang].push_back(label);
      } else if (name == "broader") {
        const auto ref = child.attribute_local("resource");
        if (!ref || ref->empty()) throw Error(ErrorCode::MalformedSkos, "broader without rdf:resource on " + c.id);
        if (std::find(c.broader.begin(), c.broader.end(), *ref) == c.broader.end()) c.broader.push_back(*ref);
      }
    }
    out.push_back(std::move(c));
    return;
  }
  for (const auto& child : e.children) collect(child, out);
}

}  // namespace

SkosStore SkosStore::parse(std::string_view xml_bytes) { return parse_many({std::string(xml_bytes)}); }

SkosStore SkosStore::parse_many(const std::vector<std::string>& documents) {
  SkosStore store;
  for (const auto& bytes : documents) {
    xml::Element root;
    try {
      root = xml::parse(bytes);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedSkos, e.what());
    }
    std::vector<SkosConcept> found;
    collect(root, found);
    for (auto& c : found) {
      std::string id = c.id;
      if (!store.concepts_.emplace(id, std::move(c)).second) {
        throw Error(ErrorCode::MalformedSkos, "duplicate concept " + id);
      }
    }
  }
  std::vector<std::string> dangling;
  for (const auto& [id, c] : store.concepts_) {
    for (const auto& b : c.broader) {
      if (!store.concepts_.count(b)) dangling.push_back(id + " -> " + b);
    }
  }
  if (!dangling.empty()) {
    std::string msg = "broader references to unknown concepts:";
    for (const auto& d : dangling) msg += " " + d;
    throw Error(ErrorCode::DanglingBroaderRef, msg);
  }
  store.index();
  return store;
}

SkosStore SkosStore::load(const std::filesystem::path& file) { return parse(read_file(file)); }

void SkosStore::index() {
  labels_.clear();
  for (const auto& [id, c] : concepts_) {
    for (const auto& [lang, label] : c.pref_labels) {
      labels_[lang][label_key(label, lang)].push_back({id, MatchedVia::PrefLabel});
    }
    for (const auto& [lang, alts] : c.alt_labels) {
      for (const auto& label : alts) labels_[lang][label_key(label, lang)].push_back({id, MatchedVia::AltLabel});
    }
  }
  for (auto& [lang, keys] : labels_) {
    for (auto& [key, hits] : keys) {
      std::sort(hits.begin(), hits.end(), [](const LabelHit& a, const LabelHit& b) {
        if (a.via != b.via) return a.via == MatchedVia::PrefLabel;
        return a.concept_id < b.concept_id;
      });
    }
  }
}

const SkosConcept* SkosStore::find(std::string_view id) const {
  const auto it = concepts_.find(id);
  return it == concepts_.end() ? nullptr : &it->second;
}

std::optional<LabelHit> SkosStore::lookup_key(const std::string& key, std::string_view lang) const {
  std::optional<LabelHit> best;
  for (const std::string& l : {std::string(lang), std::string()}) {
    const auto li = labels_.find(l);
    if (li == labels_.end()) continue;
    const auto ki = li->second.find(key);
    if (ki == li->second.end()) continue;
    const LabelHit& h = ki->second.front();
    if (!best || (h.via == MatchedVia::PrefLabel && best->via == MatchedVia::AltLabel) ||
        (h.via == best->via && h.concept_id < best->concept_id)) {
      best = h;
    }
    if (l.empty()) break;
  }
  return best;
}

std::optional<LabelHit> SkosStore::lookup(std::string_view label, std::string_view lang) const {
  return lookup_key(label_key(label, lang), lang);
}

std::vector<std::string> SkosStore::broader_chain(std::string_view id, std::size_t depth) const {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> visited{std::string(id)};
  std::deque<std::pair<std::string, std::size_t>> queue{{std::string(id), 0}};
  while (!queue.empty()) {
    auto [cur, level] = queue.front();
    queue.pop_front();
    if (level >= depth) continue;
    const SkosConcept* c = find(cur);
    if (c == nullptr) continue;
    for (const auto& b : c->broader) {
      if (!visited.insert(b).second) continue;
      out.push_back(b);
      queue.emplace_back(b, level + 1);
    }
  }
  return out;
}

std::vector<ThematicEntity> annotate_thematic(std::string_view text, std::string_view lang, const SkosStore& store,
                                              std::size_t broader_depth) {
  const auto tokens = tokenize(text, lang);
  std::vector<ThematicEntity> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    if (tokens[i].kind != TokenKind::Punct) {
      const std::size_t max_n = std::min(kMaxThematicNgram, tokens.size() - i);
      for (std::size_t n = max_n; n >= 1 && !matched; --n) {
        const Token& last = tokens[i + n - 1];
        if (last.kind == TokenKind::Punct) continue;
        std::string key;
        for (std::size_t k = i; k < i + n; ++k) {
          if (k > i) key += ' ';
          key += tokens[k].folded;
        }
        const auto hit = store.lookup_key(key, lang);
        if (!hit) continue;
        ThematicEntity e;
        e.surface = std::string(text.substr(tokens[i].byte_begin, last.byte_end - tokens[i].byte_begin));
        e.span = {tokens[i].start, last.end};
        e.concept_id = hit->concept_id;
        e.matched_via = hit->via;
        e.broader_chain = store.broader_chain(hit->concept_id, broader_depth);
        out.push_back(std::move(e));
        i += n;
        matched = true;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::vector<ThematicEntity> annotate_thematic(const Document& doc, const SkosStore& store, std::size_t broader_depth) {
  std::vector<ThematicEntity> out;
  for (std::size_t seg = 0; seg < doc.abstracts.size(); ++seg) {
    const auto& a = doc.abstracts[seg];
    for (auto& e : annotate_thematic(a.text, a.lang, store, broader_depth)) {
      e.segment = seg;
      out.push_back(std::move(e));
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = "c" + std::to_string(k + 1);
  return out;
}

}  // namespace mti
