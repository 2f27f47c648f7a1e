#include "mti/ingest.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "mti/error.hpp"
#include "mti/text.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

namespace {

constexpr std::string_view kModsNamespace = "http://www.loc.gov/mods/v3";

std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF && static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF) {
    s.remove_prefix(3);
  }
  return s;
}

const std::regex& triple_regex() {
  static const std::regex re(
      R"(^\s*(<[^<>\s]*>|_:[A-Za-z0-9_.\-]+)\s+(<[^<>\s]*>)\s+(<[^<>\s]*>|_:[A-Za-z0-9_.\-]+|"(?:[^"\\]|\\.)*"(?:@[A-Za-z][A-Za-z0-9\-]*|\^\^<[^<>\s]*>)?)\s*\.\s*$)");
  return re;
}

// Name of the first element in an XML document, skipping prolog markup.
std::string root_element_name(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    i = s.find('<', i);
    if (i == std::string_view::npos) return {};
    if (s.compare(i, 4, "<!--") == 0) {
      const auto e = s.find("-->", i);
      if (e == std::string_view::npos) return {};
      i = e + 3;
    } else if (s.compare(i, 2, "<?") == 0 || s.compare(i, 2, "<!") == 0) {
      const auto e = s.find('>', i);
      if (e == std::string_view::npos) return {};
      i = e + 1;
    } else {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '>' && s[j] != '/' && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      return std::string(s.substr(i + 1, j - i - 1));
    }
  }
  return {};
}

std::string local_part(std::string_view name) {
  const auto colon = name.find(':');
  return std::string(colon == std::string_view::npos ? name : name.substr(colon + 1));
}

std::string hash_id(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "doc-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string normalize_lang(std::string_view code) {
  std::string lower = text::fold(text::trim(code));
  const auto dash = lower.find_first_of("-_");
  if (dash != std::string::npos) lower = lower.substr(0, dash);
  if (lower == "eng") return "en";
  if (lower == "fre" || lower == "fra") return "fr";
  if (lower.size() > 2) lower = lower.substr(0, 2);
  return lower;
}

void finish(Document& doc, std::string_view default_language) {
  doc.languages.clear();
  for (const auto& seg : doc.abstracts) {
    if (std::find(doc.languages.begin(), doc.languages.end(), seg.lang) == doc.languages.end()) {
      doc.languages.push_back(seg.lang);
    }
  }
  if (doc.abstracts.empty()) {
    doc.flags.push_back(DocumentFlag::MissingAbstract);
    if (!text::trim(doc.title).empty()) doc.languages.push_back(detect_language(doc.title, default_language));
  }
}

void add_abstract(Document& doc, const std::string& text, const std::optional<std::string>& lang,
                  std::string_view default_language) {
  if (text::trim(text).empty()) return;
  if (lang && !lang->empty()) {
    doc.abstracts.push_back({normalize_lang(*lang), text});
    return;
  }
  for (auto& seg : split_bilingual(text, default_language)) doc.abstracts.push_back(std::move(seg));
}

void flatten(const xml::Element& e, const std::string& path, Document& doc) {
  for (const auto& [k, v] : e.attributes) {
    if (k == "xmlns" || k.rfind("xmlns:", 0) == 0) continue;
    doc.extra.emplace_back(path + "/@" + k, v);
  }
  if (!e.has_element_children()) {
    doc.extra.emplace_back(path, e.text);
    return;
  }
  for (const auto& c : e.children) flatten(c, path + "/" + std::string(c.local_name()), doc);
}

Document parse_mods(std::string_view bytes, const IngestOptions& options) {
  const xml::Element root = xml::parse(bytes);
  const xml::Element* mods = &root;
  if (root.local_name() == "modsCollection") {
    mods = root.child("mods");
    if (mods == nullptr) throw Error(ErrorCode::MalformedInput, "modsCollection without a mods record");
  } else if (root.local_name() != "mods") {
    throw Error(ErrorCode::MalformedInput, "root element <" + root.name + "> is not a MODS record");
  }
  static const std::set<std::string> annotation_trees = {"spatialAnnotations", "temporalAnnotations",
                                                         "thematicAnnotations", "provenance"};
  return mods_core::read(*mods, options, annotation_trees);
}

const xml::Element* find_dc_container(const xml::Element& e) {
  for (const auto& c : e.children) {
    if (c.prefix() == "dc" || c.prefix() == "dcterms") return &e;
  }
  for (const auto& c : e.children) {
    if (const auto* found = find_dc_container(c)) return found;
  }
  return nullptr;
}

Document parse_dublin_core(std::string_view bytes, const IngestOptions& options) {
  const xml::Element root = xml::parse(bytes);
  const xml::Element* container = find_dc_container(root);
  if (container == nullptr) throw Error(ErrorCode::MalformedInput, "no Dublin Core elements found");
  Document doc;
  doc.source = options.source.value_or(Source::Agritrop);
  bool have_title = false;
  for (const auto& c : container->children) {
    const auto local = c.local_name();
    const bool dc = c.prefix() == "dc" || c.prefix() == "dcterms";
    if (dc && local == "title" && !have_title) {
      doc.title = c.text;
      have_title = true;
      continue;
    }
    if (dc && (local == "description" || local == "abstract")) {
      add_abstract(doc, c.text, c.attribute_local("lang"), options.default_language);
      continue;
    }
    if (dc && local == "identifier" && doc.id.empty()) doc.id = text::trim(c.text);
    flatten(c, c.name, doc);
  }
  if (doc.id.empty()) doc.id = options.fallback_id.empty() ? hash_id(bytes) : options.fallback_id;
  finish(doc, options.default_language);
  return doc;
}

std::string unescape_literal(std::string_view s, std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i >= s.size()) throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": dangling escape");
    switch (s[i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case '"': out += '"'; break;
      case '\'': out += '\''; break;
      case '\\': out += '\\'; break;
      case 'u':
      case 'U': {
        const std::size_t width = s[i] == 'u' ? 4 : 8;
        const auto hex = std::string(s.substr(i + 1, width));
        if (hex.size() != width || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
          throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": bad unicode escape");
        }
        out += text::encode(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
        i += width;
        break;
      }
      default: throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": unknown escape");
    }
  }
  return out;
}

bool is_predicate(std::string_view iri, std::initializer_list<std::string_view> candidates) {
  for (const auto c : candidates) {
    if (iri == c) return true;
  }
  return false;
}

Document parse_rdf(std::string_view bytes, const IngestOptions& options) {
  Document doc;
  doc.source = options.source.value_or(Source::Anrt);
  std::string subject;
  std::string first_subject;
  bool have_title = false;
  std::istringstream in{std::string(bytes)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::smatch m;
    if (!std::regex_match(trimmed, m, triple_regex())) {
      throw Error(ErrorCode::MalformedInput, "line " + std::to_string(lineno) + ": not an N-Triples statement");
    }
    const std::string subj = m[1].str();
    const std::string pred = m[2].str().substr(1, m[2].length() - 2);
    const std::string obj = m[3].str();
    if (first_subject.empty()) first_subject = subj;
    const bool main = subj == first_subject;

    std::string literal;
    std::optional<std::string> lang;
    const bool is_literal = obj.front() == '"';
    if (is_literal) {
      const auto close = obj.rfind('"');
      literal = unescape_literal(std::string_view(obj).substr(1, close - 1), lineno);
      if (close + 1 < obj.size() && obj[close + 1] == '@') lang = obj.substr(close + 2);
    }
    if (main && is_literal && !have_title &&
        is_predicate(pred, {"http://purl.org/dc/elements/1.1/title", "http://purl.org/dc/terms/title"})) {
      doc.title = literal;
      have_title = true;
      continue;
    }
    if (main && is_literal &&
        is_predicate(pred, {"http://purl.org/dc/terms/abstract", "http://purl.org/dc/elements/1.1/description",
                            "http://purl.org/dc/terms/description", "http://purl.org/ontology/bibo/abstract"})) {
      add_abstract(doc, literal, lang, options.default_language);
      continue;
    }
    if (main && is_literal && doc.id.empty() &&
        is_predicate(pred, {"http://purl.org/dc/elements/1.1/identifier", "http://purl.org/dc/terms/identifier"})) {
      doc.id = text::trim(literal);
    }
    doc.extra.emplace_back(main ? pred : subj + " " + pred, obj);
  }
  if (first_subject.empty()) throw Error(ErrorCode::MalformedInput, "no triples");
  if (doc.id.empty()) {
    if (!options.fallback_id.empty()) {
      doc.id = options.fallback_id;
    } else if (first_subject.front() == '<') {
      doc.id = first_subject.substr(1, first_subject.size() - 2);
    } else {
      doc.id = hash_id(bytes);
    }
  }
  finish(doc, options.default_language);
  return doc;
}

const std::unordered_set<std::string>& english_closed_class() {
  static const std::unordered_set<std::string> words = {
      "the",   "of",    "and",   "in",   "to",    "is",    "are",     "was",    "were",  "for",  "on",
      "with",  "by",    "this",  "that", "from",  "as",    "at",      "be",     "which", "these", "an",
      "it",    "its",   "or",    "we",   "our",   "has",   "have",    "been",   "into",  "than", "their",
      "during", "over", "under", "such", "those", "there", "between", "within", "while", "both", "also"};
  return words;
}

const std::unordered_set<std::string> &french_closed_class() {
  static const std::unordered_set<std::string> words = {
      "le",   "la",    "les",  "de",   "des",   "du",    "et",    "en",   "un",    "une",  "au",   "aux",
      "dans", "pour",  "par",  "sur",  "est",   "sont",  "que",   "qui",  "ce",    "cette", "ces", "avec",
      "entre", "nous", "ont",  "ete",  "plus",  "leur",  "leurs", "ou",   "se",    "sa",   "son",  "ses",
      "l'",   "d'",    "qu'",  "n'",   "s'",    "c'",    "j'",    "ainsi", "selon", "sont", "mais", "donc"};
  return words;
}

}  // namespace

std::string detect_language(std::string_view text, std::string_view fallback) {
  std::size_t en = 0;
  std::size_t fr = 0;
  for (const auto& t : tokenize(text, "fr")) {
    if (t.kind == TokenKind::Punct || t.kind == TokenKind::Number) continue;
    if (english_closed_class().count(t.folded)) ++en;
    if (french_closed_class().count(t.folded)) ++fr;
  }
  if (fr > en) return "fr";
  if (en > fr) return "en";
  return std::string(fallback);
}

std::vector<AbstractSegment> split_bilingual(std::string_view source, std::string_view fallback) {
  static const std::regex blank_line(R"(\n[ \t\r]*\n)");
  const std::string s(source);
  std::vector<std::pair<std::size_t, std::size_t>> paragraphs;
  std::size_t begin = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), blank_line); it != std::sregex_iterator(); ++it) {
    paragraphs.emplace_back(begin, static_cast<std::size_t>(it->position()));
    begin = static_cast<std::size_t>(it->position() + it->length());
  }
  paragraphs.emplace_back(begin, s.size());

  // Assign each paragraph a confident language, or inherit the previous one.
  std::vector<AbstractSegment> groups;
  std::vector<std::size_t> group_begin;
  std::string current;
  for (const auto& [b, e] : paragraphs) {
    const std::string para = s.substr(b, e - b);
    if (text::trim(para).empty()) continue;
    std::string lang = detect_language(para, "");
    if (lang.empty()) lang = current;
    if (groups.empty() || (!lang.empty() && lang != current)) {
      groups.push_back({lang, {}});
      group_begin.push_back(b);
      current = lang;
    }
    groups.back().text = s.substr(group_begin.back(), e - group_begin.back());
  }
  if (groups.size() <= 1) {
    std::string lang = groups.empty() || groups.front().lang.empty() ? detect_language(source, fallback) : groups.front().lang;
    return {{lang, std::string(source)}};
  }
  for (auto& g : groups) {
    if (g.lang.empty()) g.lang = std::string(fallback);
  }
  return groups;
}

SourceFormat detect_format(std::string_view bytes) {
  const std::string_view s = strip_bom(bytes);
  if (text::trim(s).empty()) throw Error(ErrorCode::UnrecognizedFormat, "empty input");
  {
    std::istringstream in{std::string(s)};
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (std::regex_match(t, triple_regex())) return SourceFormat::RdfTriples;
      break;
    }
  }
  const std::string trimmed = text::trim(s);
  if (trimmed.front() == '<') {
    const std::string root = local_part(root_element_name(trimmed));
    if (root == "mods" || root == "modsCollection") return SourceFormat::ModsXml;
    if (trimmed.find("<dc:") != std::string::npos || trimmed.find("<dcterms:") != std::string::npos ||
        trimmed.find("http://purl.org/dc/elements/1.1/") != std::string::npos) {
      return SourceFormat::DublinCoreXml;
    }
  }
  throw Error(ErrorCode::UnrecognizedFormat, "no MODS, Dublin Core or N-Triples signature");
}

Document parse_document(std::string_view bytes, SourceFormat format, const IngestOptions& options) {
  const std::string_view s = strip_bom(bytes);
  switch (format) {
    case SourceFormat::ModsXml: return parse_mods(s, options);
    case SourceFormat::DublinCoreXml: return parse_dublin_core(s, options);
    case SourceFormat::RdfTriples: return parse_rdf(s, options);
  }
  throw Error(ErrorCode::UnrecognizedFormat, "unknown source format");
}

namespace mods_core {

void write(xml::Writer& w, const Document& doc) {
  w.open("titleInfo");
  w.leaf("title", doc.title);
  w.close();
  for (const auto& a : doc.abstracts) w.leaf("abstract", a.text, {{"lang", a.lang}});
  w.open("recordInfo");
  w.leaf("recordIdentifier", doc.id);
  w.leaf("recordContentSource", to_string(doc.source));
  w.close();
  if (!doc.extra.empty()) {
    w.open("extension");
    for (const auto& [k, v] : doc.extra) w.leaf("field", v, {{"name", k}});
    w.close();
  }
}

Document read(const xml::Element& mods, const IngestOptions& options, const std::set<std::string>& skip) {
  Document doc;
  bool source_set = false;

  const xml::Element* title_info = nullptr;
  for (const auto* ti : mods.children_named("titleInfo")) {
    if (ti->child("title") == nullptr) continue;
    if (title_info == nullptr || (title_info->attribute("type") && !ti->attribute("type"))) title_info = ti;
  }
  const xml::Element* title_el = title_info ? title_info->child("title") : nullptr;
  if (title_el) doc.title = title_el->text;

  std::string identifier;
  for (const auto& [k, v] : mods.attributes) {
    if (k == "xmlns" || k.rfind("xmlns:", 0) == 0 || k == "version" || local_part(k) == "schemaLocation") continue;
    doc.extra.emplace_back("@" + k, v);
  }

  for (const auto& c : mods.children) {
    const std::string local(c.local_name());
    if (skip.count(local)) continue;
    if (local == "abstract") {
      for (const auto& [k, v] : c.attributes) {
        if (local_part(k) != "lang") doc.extra.emplace_back("abstract/@" + k, v);
      }
      add_abstract(doc, c.text, c.attribute_local("lang"), options.default_language);
      continue;
    }
    if (&c == title_info) {
      for (const auto& [k, v] : c.attributes) doc.extra.emplace_back("titleInfo/@" + k, v);
      for (const auto& g : c.children) {
        if (&g != title_el) flatten(g, "titleInfo/" + std::string(g.local_name()), doc);
      }
      continue;
    }
    if (local == "recordInfo") {
      for (const auto& g : c.children) {
        const auto gl = g.local_name();
        if (gl == "recordIdentifier" && doc.id.empty()) {
          doc.id = text::trim(g.text);
          continue;
        }
        Source parsed;
        if (gl == "recordContentSource" && !source_set && try_source_from_string(text::trim(g.text), parsed)) {
          doc.source = parsed;
          source_set = true;
          continue;
        }
        flatten(g, "recordInfo/" + std::string(gl), doc);
      }
      continue;
    }
    if (local == "extension") {
      for (const auto& g : c.children) {
        const auto name = g.attribute("name");
        if (g.local_name() == "field" && name && !g.has_element_children()) {
          doc.extra.emplace_back(*name, g.text);
        } else {
          flatten(g, "extension/" + std::string(g.local_name()), doc);
        }
      }
      continue;
    }
    if (local == "identifier" && identifier.empty()) identifier = text::trim(c.text);
    flatten(c, local, doc);
  }

  if (doc.id.empty()) doc.id = identifier;
  if (doc.id.empty()) {
    if (const auto id = mods.attribute("ID")) doc.id = *id;
  }
  if (doc.id.empty()) doc.id = options.fallback_id;
  if (doc.id.empty()) doc.id = hash_id(doc.title + "\x1f" + (doc.abstracts.empty() ? "" : doc.abstracts[0].text));
  if (options.source) {
    doc.source = *options.source;
  } else if (!source_set) {
    doc.source = Source::Istex;
  }
  finish(doc, options.default_language);
  return doc;
}

}  // namespace mods_core

std::string to_mods_xml(const Document& doc) {
  xml::Writer w;
  w.declaration();
  w.open("mods", {{"xmlns", std::string(kModsNamespace)}, {"version", "3.7"}});
  mods_core::write(w, doc);
  w.close();
  return w.str();
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  const std::string content = read_file(manifest);
  std::vector<ManifestEntry> out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = text::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    ManifestEntry e;
    std::istringstream fields(t);
    std::string path;
    std::string tag;
    fields >> path >> tag;
    e.path = path;
    if (e.path.is_relative()) e.path = manifest.parent_path() / e.path;
    if (!tag.empty()) {
      Source s;
      if (!try_source_from_string(tag, s)) {
        throw Error(ErrorCode::MalformedInput, manifest.string() + ":" + std::to_string(lineno) + ": unknown source tag '" + tag + "'");
      }
      e.source = s;
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace mti
