#include "mti/temporal.hpp"

#include <algorithm>
#include <sstream>

#include "mti/error.hpp"
#include "mti/ingest.hpp"
#include "mti/text.hpp"

namespace mti {

namespace {

std::vector<std::string> folded_tokens(std::string_view phrase, std::string_view lang) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(phrase, lang)) out.push_back(t.folded);
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

TemporalLexicon TemporalLexicon::parse(std::string_view tsv, std::string_view lang) {
  TemporalLexicon lex;
  lex.lang = std::string(lang);
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> cols;
    for (auto& c : text::split(t, '\t')) {
      auto trimmed = text::trim(c);
      if (!trimmed.empty()) cols.push_back(std::move(trimmed));
    }
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRow, "temporal lexicon row " + std::to_string(lineno) + ": " + why);
    };
    if (cols.size() < 2) throw bad("expected at least two columns");
    const std::string& kind = cols[0];
    if (kind == "month") {
      if (cols.size() != 3) throw bad("month needs a number");
      const auto n = text::parse_int(cols[2]);
      if (n < 1 || n > 12) throw bad("month out of range");
      lex.months[text::fold(cols[1])] = static_cast<int>(n);
    } else if (kind == "range") {
      if (cols.size() != 3) throw bad("range needs opener and closer");
      lex.ranges.emplace_back(text::fold(cols[1]), text::fold(cols[2]));
    } else if (kind == "decade") {
      lex.decade_prefixes.push_back(folded_tokens(cols[1], lang));
    } else if (kind == "relative") {
      if (cols.size() != 3) throw bad("relative needs a year offset");
      lex.relatives.emplace_back(folded_tokens(cols[1], lang), static_cast<int>(text::parse_int(cols[2])));
    } else if (kind == "block_before") {
      lex.block_before.insert(text::fold(cols[1]));
    } else if (kind == "block_after") {
      lex.block_after.insert(text::fold(cols[1]));
    } else {
      throw bad("unknown kind '" + kind + "'");
    }
  }
  auto longest_first = [](const auto& a, const auto& b) { return a.size() > b.size(); };
  std::stable_sort(lex.decade_prefixes.begin(), lex.decade_prefixes.end(), longest_first);
  std::stable_sort(lex.relatives.begin(), lex.relatives.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return lex;
}

TemporalLexicon TemporalLexicon::load(const std::filesystem::path& file, std::string_view lang) {
  return parse(read_file(file), lang);
}

TemporalLibrary TemporalLibrary::load(const std::filesystem::path& dir) {
  TemporalLibrary lib;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::IoFailure, "temporal lexicon directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") {
      lib.add(TemporalLexicon::load(entry.path(), entry.path().stem().string()));
    }
  }
  return lib;
}

void TemporalLibrary::add(TemporalLexicon lexicon) {
  std::string lang = lexicon.lang;
  lexicons_[lang] = std::move(lexicon);
}

const TemporalLexicon* TemporalLibrary::for_lang(std::string_view lang) const {
  const auto it = lexicons_.find(lang);
  return it == lexicons_.end() ? nullptr : &it->second;
}

namespace {

struct Hit {
  TemporalCategory category = TemporalCategory::Date;
  CalendarDate begin;
  CalendarDate end;
  std::size_t length = 0;
};

class Grammar {
 public:
  Grammar(const std::vector<Token>& tokens, const TemporalLexicon& lex, const std::optional<CalendarDate>& dct,
          const TemporalConfig& config)
      : t_(tokens), lex_(lex), dct_(dct), config_(config) {}

  std::optional<Hit> at(std::size_t i) const {
    std::optional<Hit> best;
    auto consider = [&](std::optional<Hit> h) {
      if (h && (!best || h->length > best->length)) best = h;
    };
    consider(interval(i));
    consider(decade(i));
    consider(relative(i));
    if (auto d = date(i, false)) consider(Hit{TemporalCategory::Date, d->first, d->first, d->second});
    return best;
  }

 private:
  bool is(std::size_t i, std::string_view folded) const { return i < t_.size() && t_[i].folded == folded; }

  std::optional<int> year(std::size_t i) const {
    if (i >= t_.size() || t_[i].kind != TokenKind::Number || t_[i].text.size() != 4 || !all_digits(t_[i].text)) {
      return std::nullopt;
    }
    const int y = static_cast<int>(text::parse_int(t_[i].text));
    if (y < config_.min_year || y > config_.max_year) return std::nullopt;
    return y;
  }

  // A free-standing year, unless a unit or page marker sits next to it.
  std::optional<int> free_year(std::size_t i) const {
    const auto y = year(i);
    if (!y) return std::nullopt;
    if (i > 0 && lex_.block_before.count(t_[i - 1].folded)) return std::nullopt;
    if (i > 1 && t_[i - 1].text == "." && lex_.block_before.count(t_[i - 2].folded)) return std::nullopt;
    if (i + 1 < t_.size() && lex_.block_after.count(t_[i + 1].folded)) return std::nullopt;
    return y;
  }

  std::optional<int> day(std::size_t i) const {
    if (i >= t_.size()) return std::nullopt;
    if (t_[i].folded == "1er" || t_[i].folded == "1st") return 1;
    if (t_[i].kind != TokenKind::Number || t_[i].text.size() > 2 || !all_digits(t_[i].text)) return std::nullopt;
    const int d = static_cast<int>(text::parse_int(t_[i].text));
    if (d < 1 || d > 31) return std::nullopt;
    return d;
  }

  // Month token plus an optional abbreviation period; returns month and tokens used.
  std::optional<std::pair<int, std::size_t>> month(std::size_t i) const {
    if (i >= t_.size()) return std::nullopt;
    const auto it = lex_.months.find(t_[i].folded);
    if (it == lex_.months.end()) return std::nullopt;
    std::size_t used = 1;
    if (i + 1 < t_.size() && t_[i + 1].text == "." && t_[i + 1].start == t_[i].end) used = 2;
    return std::make_pair(it->second, used);
  }

  // Year may be 0 when `partial` is set and the surface has no year.
  std::optional<std::pair<CalendarDate, std::size_t>> date(std::size_t i, bool partial) const {
    std::optional<std::pair<CalendarDate, std::size_t>> best;
    auto keep = [&](CalendarDate d, std::size_t len) {
      const bool ok = d.year == 0 ? partial && CalendarDate{2000, d.month, d.day}.valid() : d.valid();
      if (ok && (!best || len > best->second)) best = std::make_pair(d, len);
    };
    if (const auto d = day(i)) {
      if (const auto m = month(i + 1)) {
        const std::size_t j = i + 1 + m->second;
        if (const auto y = year(j)) keep({*y, m->first, *d}, j + 1 - i);
        else keep({0, m->first, *d}, j - i);
      }
    }
    if (const auto m = month(i)) {
      const std::size_t j = i + m->second;
      if (const auto d = day(j)) {
        std::size_t k = j + 1;
        if (is(k, ",")) ++k;
        if (const auto y = year(k)) keep({*y, m->first, *d}, k + 1 - i);
        else if (!is(j + 1, ",")) keep({0, m->first, *d}, j + 1 - i);
      }
      if (const auto y = year(j)) keep({*y, m->first, 0}, j + 1 - i);
      keep({0, m->first, 0}, j - i);
    }
    if (const auto y = free_year(i)) keep({*y, 0, 0}, 1);
    return best;
  }

  std::optional<Hit> period(CalendarDate a, CalendarDate b, std::size_t length) const {
    if (b.year == 0) return std::nullopt;
    if (a.year == 0) a.year = b.year;
    if (!a.valid() || !b.valid() || a.first_day() > b.last_day()) return std::nullopt;
    return Hit{TemporalCategory::Period, a, b, length};
  }

  std::optional<Hit> interval(std::size_t i) const {
    if (i >= t_.size()) return std::nullopt;
    std::optional<Hit> best;
    for (const auto& [open, close] : lex_.ranges) {
      if (!is(i, open)) continue;
      const auto a = date(i + 1, true);
      if (!a) continue;
      const std::size_t c = i + 1 + a->second;
      if (!is(c, close)) continue;
      const auto b = date(c + 1, false);
      if (!b) continue;
      auto h = period(a->first, b->first, c + 1 + b->second - i);
      if (h && (!best || h->length > best->length)) best = h;
    }
    // "1990-2000", "1990–2000"
    if (const auto a = year(i)) {
      const std::size_t c = i + 1;
      if (c + 1 < t_.size() && (t_[c].text == "-" || t_[c].text == "–" || t_[c].text == "/") &&
          t_[c].start == t_[i].end && t_[c + 1].start == t_[c].end) {
        if (const auto b = year(c + 1)) {
          auto h = period({*a, 0, 0}, {*b, 0, 0}, 3);
          if (h && (!best || h->length > best->length)) best = h;
        }
      }
    }
    return best;
  }

  std::optional<Hit> decade(std::size_t i) const {
    if (i >= t_.size()) return std::nullopt;
    auto starts_decade = [&](int y) { return y % 10 == 0 && y >= config_.min_year && y + 9 <= config_.max_year; };
    auto hit = [](int y, std::size_t len) { return Hit{TemporalCategory::Period, {y, 0, 0}, {y + 9, 0, 0}, len}; };
    // "les années 1990"
    for (const auto& prefix : lex_.decade_prefixes) {
      bool ok = i + prefix.size() < t_.size();
      for (std::size_t k = 0; ok && k < prefix.size(); ++k) ok = t_[i + k].folded == prefix[k];
      if (!ok) continue;
      if (const auto y = year(i + prefix.size()); y && starts_decade(*y)) return hit(*y, prefix.size() + 1);
    }
    // "1990s", "1990's"
    const std::string& f = t_[i].folded;
    if (f.size() == 5 && f.back() == 's' && all_digits(f.substr(0, 4))) {
      const int y = static_cast<int>(text::parse_int(f.substr(0, 4)));
      if (starts_decade(y)) return hit(y, 1);
    }
    if (t_[i].kind == TokenKind::Number && f.size() == 4 && all_digits(f) && is(i + 1, "'s") &&
        t_[i + 1].start == t_[i].end) {
      const int y = static_cast<int>(text::parse_int(f));
      if (starts_decade(y)) return hit(y, 2);
    }
    return std::nullopt;
  }

  std::optional<Hit> relative(std::size_t i) const {
    if (!dct_) return std::nullopt;
    for (const auto& [phrase, offset] : lex_.relatives) {
      bool ok = i + phrase.size() <= t_.size();
      for (std::size_t k = 0; ok && k < phrase.size(); ++k) ok = t_[i + k].folded == phrase[k];
      if (!ok) continue;
      const CalendarDate d{dct_->year + offset, 0, 0};
      return Hit{TemporalCategory::Date, d, d, phrase.size()};
    }
    return std::nullopt;
  }

  const std::vector<Token>& t_;
  const TemporalLexicon& lex_;
  const std::optional<CalendarDate>& dct_;
  const TemporalConfig& config_;
};

}  // namespace

std::vector<TemporalEntity> annotate_temporal(std::string_view text, const TemporalLexicon& lexicon,
                                              const std::optional<CalendarDate>& dct, const TemporalConfig& config) {
  const auto tokens = tokenize(text, lexicon.lang);
  Grammar g(tokens, lexicon, dct, config);
  std::vector<TemporalEntity> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto h = g.at(i);
    if (!h) {
      ++i;
      continue;
    }
    const Token& first = tokens[i];
    const Token& last = tokens[i + h->length - 1];
    TemporalEntity e;
    e.surface = std::string(text.substr(first.byte_begin, last.byte_end - first.byte_begin));
    e.span = {first.start, last.end};
    e.category = h->category;
    e.begin = h->begin;
    e.end = h->end;
    out.push_back(std::move(e));
    i += h->length;
  }
  return out;
}

std::vector<TemporalEntity> annotate_temporal(const Document& doc, const TemporalResources& resources,
                                              const std::optional<CalendarDate>& dct) {
  std::vector<TemporalEntity> out;
  for (std::size_t seg = 0; seg < doc.abstracts.size(); ++seg) {
    const auto& a = doc.abstracts[seg];
    const TemporalLexicon* lex = resources.lexicons ? resources.lexicons->for_lang(a.lang) : nullptr;
    if (lex == nullptr) continue;
    for (auto& e : annotate_temporal(a.text, *lex, dct, resources.config)) {
      e.segment = seg;
      out.push_back(std::move(e));
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = "t" + std::to_string(k + 1);
  return out;
}

}  // namespace mti
