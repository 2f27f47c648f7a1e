#include "mti/rules.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"

namespace mti {

Lexicon::Lexicon(std::string name, std::optional<IndicatorCategory> category)
    : name_(std::move(name)), category_(category) {}

void Lexicon::add(std::string_view phrase, std::string_view lang) {
  std::vector<std::string> key;
  for (const auto& t : tokenize(phrase, lang)) key.push_back(t.folded);
  if (key.empty()) return;
  auto& bucket = by_first_[key.front()];
  if (std::find(bucket.begin(), bucket.end(), key) != bucket.end()) return;
  bucket.push_back(std::move(key));
  std::sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  ++size_;
}

std::vector<std::size_t> Lexicon::match_lengths(const std::vector<Token>& tokens, std::size_t pos) const {
  std::vector<std::size_t> out;
  if (pos >= tokens.size()) return out;
  const auto it = by_first_.find(tokens[pos].folded);
  if (it == by_first_.end()) return out;
  for (const auto& entry : it->second) {
    if (pos + entry.size() > tokens.size()) continue;
    bool ok = true;
    for (std::size_t k = 1; k < entry.size() && ok; ++k) {
      const Token& t = tokens[pos + k];
      ok = t.folded == entry[k] && t.sentence == tokens[pos].sentence;
      // multi-token entries only match tokens that are adjacent or space separated
    }
    if (ok && (out.empty() || out.back() != entry.size())) out.push_back(entry.size());
  }
  return out;
}

bool Lexicon::contains_token(std::string_view folded) const {
  const auto it = by_first_.find(std::string(folded));
  if (it == by_first_.end()) return false;
  for (const auto& entry : it->second) {
    if (entry.size() == 1) return true;
  }
  return false;
}

namespace {

PatternTerm parse_term(std::string_view s, const std::string& where) {
  PatternTerm t;
  if (!s.empty() && s.front() == '!') {
    t.negated = true;
    s.remove_prefix(1);
  }
  auto bad = [&](const std::string& why) { return Error(ErrorCode::MalformedRule, where + ": " + why); };
  if (s.empty()) throw bad("empty pattern term");
  if (s.front() == '@') {
    t.kind = PatternTerm::Kind::Lexicon;
    t.arg = std::string(s.substr(1));
    if (t.arg.empty()) throw bad("lexicon reference without a name");
  } else if (s.front() == '"') {
    if (s.size() < 3 || s.back() != '"') throw bad("unterminated literal " + std::string(s));
    t.kind = PatternTerm::Kind::Literal;
    t.arg = text::fold(s.substr(1, s.size() - 2));
  } else if (s == "Cap") {
    t.kind = PatternTerm::Kind::Cap;
  } else if (s == "Low") {
    t.kind = PatternTerm::Kind::Low;
  } else if (s == "Num") {
    t.kind = PatternTerm::Kind::Num;
  } else if (s == "Punct") {
    t.kind = PatternTerm::Kind::Punct;
  } else if (s == "Word") {
    t.kind = PatternTerm::Kind::Word;
  } else if (s == "Any") {
    t.kind = PatternTerm::Kind::Any;
  } else if (s == "ESA") {
    t.kind = PatternTerm::Kind::Esa;
  } else {
    throw bad("unknown pattern term '" + std::string(s) + "'");
  }
  return t;
}

PatternAtom parse_atom(std::string_view s, const std::string& where) {
  PatternAtom a;
  const auto eq = s.find('=');
  const auto quote = s.find('"');
  if (eq != std::string_view::npos && (quote == std::string_view::npos || eq < quote)) {
    a.role = std::string(s.substr(0, eq));
    s.remove_prefix(eq + 1);
    static const std::set<std::string> roles = {"name", "ind", "anchor", "org", "ctx"};
    if (!roles.count(a.role)) throw Error(ErrorCode::MalformedRule, where + ": unknown role '" + a.role + "'");
  }
  if (!s.empty() && (s.back() == '?' || s.back() == '*' || s.back() == '+')) {
    a.quant = s.back();
    s.remove_suffix(1);
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    // '&' inside a literal is part of the literal
    std::size_t amp = start;
    bool in_quote = false;
    for (; amp < s.size(); ++amp) {
      if (s[amp] == '"') in_quote = !in_quote;
      if (s[amp] == '&' && !in_quote) break;
    }
    a.terms.push_back(parse_term(s.substr(start, amp - start), where));
    if (amp >= s.size()) break;
    start = amp + 1;
  }
  return a;
}

bool positive(const PatternTerm& t, PatternTerm::Kind kind) { return t.kind == kind && !t.negated; }

}  // namespace

RuleSet RuleSet::load(const std::filesystem::path& file) { return parse(read_file(file), file.parent_path()); }

RuleSet RuleSet::parse(std::string_view content, const std::filesystem::path& base_dir) {
  RuleSet rs;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> ids;
  std::vector<std::tuple<std::string, std::optional<IndicatorCategory>, std::string>> pending_lexicons;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "rule line " + std::to_string(lineno);
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields(t);
    std::string keyword;
    fields >> keyword;
    if (keyword == "lang") {
      fields >> rs.lang_;
    } else if (keyword == "lexicon") {
      std::string name;
      std::string category;
      std::string path;
      fields >> name >> category >> path;
      if (name.empty() || category.empty() || path.empty()) throw Error(ErrorCode::MalformedRule, where + ": lexicon needs name, category and source");
      std::optional<IndicatorCategory> cat;
      if (category != "-") {
        try {
          cat = indicator_category_from_string(category);
        } catch (const Error&) {
          throw Error(ErrorCode::MalformedRule, where + ": unknown category " + category);
        }
      }
      pending_lexicons.emplace_back(name, cat, path);
    } else if (keyword == "rule") {
      Rule r;
      fields >> r.id;
      if (r.id.empty()) throw Error(ErrorCode::MalformedRule, where + ": rule without id");
      if (!ids.insert(r.id).second) throw Error(ErrorCode::MalformedRule, where + ": duplicate rule id " + r.id);
      std::string tok;
      bool arrow = false;
      std::string label;
      while (fields >> tok) {
        if (tok == "=>") {
          arrow = true;
          fields >> label;
          break;
        }
        r.atoms.push_back(parse_atom(tok, where));
      }
      if (!arrow || label.empty()) throw Error(ErrorCode::MalformedRule, where + ": missing '=> LABEL'");
      if (r.atoms.empty()) throw Error(ErrorCode::MalformedRule, where + ": empty pattern");
      const auto colon = label.find(':');
      const std::string base = label.substr(0, colon);
      if (base == "ESA") r.label = RuleLabel::Esa;
      else if (base == "ESR") r.label = RuleLabel::Esr;
      else if (base == "ORG") r.label = RuleLabel::Organization;
      else throw Error(ErrorCode::MalformedRule, where + ": unknown label " + label);
      if (colon != std::string::npos) {
        if (r.label != RuleLabel::Esr) throw Error(ErrorCode::MalformedRule, where + ": only ESR rules take a relation");
        try {
          r.relation = indicator_category_from_string(label.substr(colon + 1));
        } catch (const Error&) {
          throw Error(ErrorCode::MalformedRule, where + ": unknown relation " + label.substr(colon + 1));
        }
        if (*r.relation == IndicatorCategory::FeatureType) throw Error(ErrorCode::MalformedRule, where + ": FeatureType is not a relation");
      }
      bool has_span_atom = false;
      bool has_esa = false;
      for (const auto& a : r.atoms) {
        has_span_atom = has_span_atom || a.role != "ctx";
        for (const auto& term : a.terms) has_esa = has_esa || positive(term, PatternTerm::Kind::Esa);
      }
      if (!has_span_atom) throw Error(ErrorCode::MalformedRule, where + ": every atom is context");
      if (r.label == RuleLabel::Esr && !has_esa) throw Error(ErrorCode::MalformedRule, where + ": ESR rule needs an ESA anchor");
      if (r.label != RuleLabel::Esr && has_esa) throw Error(ErrorCode::MalformedRule, where + ": ESA atoms only allowed in ESR rules");
      r.order = rs.rules_.size();
      r.source = t;
      rs.rules_.push_back(std::move(r));
    } else {
      throw Error(ErrorCode::MalformedRule, where + ": unknown directive '" + keyword + "'");
    }
  }
  if (rs.lang_.empty()) throw Error(ErrorCode::MalformedRule, "rule file does not declare 'lang'");
  for (const auto& [name, cat, path] : pending_lexicons) {
    if (path == "@external") {
      rs.external_.push_back(name);
      continue;
    }
    Lexicon lex(name, cat);
    const std::string content = read_file(base_dir / path);
    std::istringstream lin(content);
    std::string entry;
    while (std::getline(lin, entry)) {
      const std::string e = text::trim(entry);
      if (e.empty() || e.front() == '#') continue;
      lex.add(e, rs.lang_);
    }
    rs.lexicons_[name] = std::move(lex);
  }
  // ESR rules without an explicit relation must name one through an indicator lexicon.
  for (const auto& r : rs.rules_) {
    if (r.label != RuleLabel::Esr || r.relation) continue;
    bool ok = false;
    for (const auto& a : r.atoms) {
      if (a.role != "ind") continue;
      for (const auto& term : a.terms) {
        if (!positive(term, PatternTerm::Kind::Lexicon)) continue;
        const auto it = rs.lexicons_.find(term.arg);
        ok = ok || (it != rs.lexicons_.end() && it->second.category() &&
                    *it->second.category() != IndicatorCategory::FeatureType);
      }
    }
    if (!ok) throw Error(ErrorCode::MalformedRule, "rule " + r.id + ": ESR has no relation (explicit or via an ind lexicon)");
  }
  return rs;
}

const Lexicon* RuleSet::lexicon(std::string_view name) const {
  const auto it = lexicons_.find(name);
  return it == lexicons_.end() ? nullptr : &it->second;
}

std::vector<std::string> RuleSet::missing_lexicons() const {
  std::vector<std::string> out;
  for (const auto& name : external_) {
    if (!lexicons_.count(name)) out.push_back(name);
  }
  return out;
}

void RuleSet::set_lexicon(Lexicon lexicon) {
  std::string name = lexicon.name();
  lexicons_[name] = std::move(lexicon);
}

void RuleSet::validate() const {
  for (const auto& r : rules_) {
    for (const auto& a : r.atoms) {
      for (const auto& t : a.terms) {
        if (t.kind == PatternTerm::Kind::Lexicon && !lexicons_.count(t.arg)) {
          throw Error(ErrorCode::MalformedRule, "rule " + r.id + " references unknown lexicon @" + t.arg);
        }
      }
    }
  }
}

namespace {

class Matcher {
 public:
  Matcher(const RuleSet& rules, const std::vector<Token>& tokens, const EsaTokenSpans& esas)
      : rules_(rules), tokens_(tokens) {
    for (std::size_t i = 0; i < esas.size(); ++i) esa_at_[esas[i].first] = i;
    esas_ = &esas;
  }

  std::optional<RuleMatch> best(const Rule& rule, std::size_t start) {
    rule_ = &rule;
    sentence_ = tokens_[start].sentence;
    best_.reset();
    captures_.clear();
    step(0, start, 0);
    return best_;
  }

 private:
  // Candidate token lengths for one iteration of `atom` at `pos`, longest first.
  std::vector<std::pair<std::size_t, std::optional<std::size_t>>> lengths(const PatternAtom& atom, std::size_t pos) {
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> out;
    if (pos >= tokens_.size() || tokens_[pos].sentence != sentence_) return out;
    const Token& tok = tokens_[pos];
    const PatternTerm* driver = nullptr;
    for (const auto& t : atom.terms) {
      if ((t.kind == PatternTerm::Kind::Lexicon || t.kind == PatternTerm::Kind::Esa) && !t.negated) {
        driver = &t;
        break;
      }
    }
    for (const auto& t : atom.terms) {
      if (&t == driver) continue;
      if (test(t, tok, pos) == t.negated) return out;
    }
    if (driver == nullptr) {
      out.emplace_back(1, std::nullopt);
    } else if (driver->kind == PatternTerm::Kind::Esa) {
      const auto it = esa_at_.find(pos);
      if (it != esa_at_.end()) out.emplace_back((*esas_)[it->second].second - pos, it->second);
    } else {
      const Lexicon* lex = rules_.lexicon(driver->arg);
      if (lex) {
        for (const auto n : lex->match_lengths(tokens_, pos)) out.emplace_back(n, std::nullopt);
      }
    }
    std::erase_if(out, [&](const auto& entry) { return tokens_[pos + entry.first - 1].sentence != sentence_; });
    return out;
  }

  bool test(const PatternTerm& t, const Token& tok, std::size_t pos) const {
    switch (t.kind) {
      case PatternTerm::Kind::Cap: return tok.is_word() && tok.capitalized();
      case PatternTerm::Kind::Low: return tok.is_word() && tok.shape == TokenShape::Lower;
      case PatternTerm::Kind::Num: return tok.kind == TokenKind::Number;
      case PatternTerm::Kind::Punct: return tok.kind == TokenKind::Punct;
      case PatternTerm::Kind::Word: return tok.is_word();
      case PatternTerm::Kind::Any: return true;
      case PatternTerm::Kind::Literal: return tok.folded == t.arg;
      case PatternTerm::Kind::Lexicon: {
        const Lexicon* lex = rules_.lexicon(t.arg);
        return lex != nullptr && lex->contains_token(tok.folded);
      }
      case PatternTerm::Kind::Esa: return esa_at_.count(pos) > 0;
    }
    return false;
  }

  void step(std::size_t atom_index, std::size_t pos, std::size_t repeats) {
    const auto& atoms = rule_->atoms;
    if (atom_index == atoms.size()) {
      record();
      return;
    }
    const PatternAtom& atom = atoms[atom_index];
    const bool repeating = atom.quant == '*' || atom.quant == '+';
    const std::size_t min = (atom.quant == '1' || atom.quant == '+') ? 1 : 0;
    const bool can_take_more = repeating || repeats == 0;
    if (can_take_more) {
      for (const auto& [len, esa] : lengths(atom, pos)) {
        captures_.push_back({atom.role, atom_index, pos, pos + len, driver_lexicon(atom), esa});
        step(atom_index, pos + len, repeats + 1);
        captures_.pop_back();
      }
    }
    if (repeats >= min) step(atom_index + 1, pos, 0);
  }

  const Lexicon* driver_lexicon(const PatternAtom& atom) const {
    for (const auto& t : atom.terms) {
      if (t.kind == PatternTerm::Kind::Lexicon && !t.negated) return rules_.lexicon(t.arg);
    }
    return nullptr;
  }

  void record() {
    std::optional<std::size_t> b;
    std::size_t e = 0;
    for (const auto& c : captures_) {
      if (c.role == "ctx") continue;
      if (!b) b = c.begin;
      e = std::max(e, c.end);
    }
    if (!b) return;
    const std::size_t length = e - *b;
    if (best_ && best_->length() >= length) return;
    RuleMatch m;
    m.rule = rule_;
    m.begin = *b;
    m.end = e;
    m.captures = captures_;
    best_ = std::move(m);
  }

  const RuleSet& rules_;
  const std::vector<Token>& tokens_;
  const EsaTokenSpans* esas_ = nullptr;
  std::map<std::size_t, std::size_t> esa_at_;
  const Rule* rule_ = nullptr;
  std::size_t sentence_ = 0;
  std::vector<Capture> captures_;
  std::optional<RuleMatch> best_;
};

}  // namespace

std::vector<RuleMatch> find_matches(const RuleSet& rules, RuleLabel label, const std::vector<Token>& tokens,
                                    const EsaTokenSpans& esas) {
  std::vector<RuleMatch> out;
  Matcher matcher(rules, tokens, esas);
  for (const auto& rule : rules.rules()) {
    if (rule.label != label) continue;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
      if (auto m = matcher.best(rule, start)) out.push_back(std::move(*m));
    }
  }
  return out;
}

std::vector<RuleMatch> resolve_overlaps(std::vector<RuleMatch> candidates,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& blocked) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const RuleMatch& a, const RuleMatch& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.rule->order < b.rule->order;
  });
  auto overlaps = [](std::size_t b1, std::size_t e1, std::size_t b2, std::size_t e2) { return b1 < e2 && b2 < e1; };
  std::vector<RuleMatch> accepted;
  for (auto& m : candidates) {
    bool clash = false;
    for (const auto& [b, e] : blocked) clash = clash || overlaps(m.begin, m.end, b, e);
    for (const auto& a : accepted) clash = clash || overlaps(m.begin, m.end, a.begin, a.end);
    if (!clash) accepted.push_back(std::move(m));
  }
  std::sort(accepted.begin(), accepted.end(), [](const RuleMatch& a, const RuleMatch& b) { return a.begin < b.begin; });
  return accepted;
}

}  // namespace mti
