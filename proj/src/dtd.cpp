#include "mti/dtd.hpp"

#include <cctype>
#include <set>

#include "mti/error.hpp"
#include "mti/text.hpp"

namespace mti::xml {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '.' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::string regex_quote(std::string_view name) {
  std::string out;
  for (const char c : name) {
    if (std::string_view(".^$|()[]{}*+?\\").find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= s.size();
  }
  char peek() {
    skip_space();
    return pos < s.size() ? s[pos] : '\0';
  }
  std::string name() {
    skip_space();
    const std::size_t b = pos;
    if (pos < s.size() && s[pos] == '#') ++pos;
    while (pos < s.size() && is_name_char(s[pos])) ++pos;
    if (b == pos) throw Error(ErrorCode::SchemaViolation, "DTD: expected a name near offset " + std::to_string(b));
    return std::string(s.substr(b, pos - b));
  }
  std::string quoted() {
    skip_space();
    const char q = s[pos];
    if (q != '"' && q != '\'') throw Error(ErrorCode::SchemaViolation, "DTD: expected quoted literal");
    const auto end = s.find(q, pos + 1);
    if (end == std::string_view::npos) throw Error(ErrorCode::SchemaViolation, "DTD: unterminated literal");
    std::string v(s.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    return v;
  }
  void expect(char c) {
    if (peek() != c) throw Error(ErrorCode::SchemaViolation, std::string("DTD: expected '") + c + "'");
    ++pos;
  }
};

// Translates a children content particle into a regex over "<name>" tokens.
std::string particle_regex(Cursor& c) {
  std::string out;
  if (c.peek() == '(') {
    ++c.pos;
    std::vector<std::string> items;
    char sep = 0;
    while (true) {
      items.push_back(particle_regex(c));
      const char next = c.peek();
      if (next == ')') {
        ++c.pos;
        break;
      }
      if (next != ',' && next != '|') throw Error(ErrorCode::SchemaViolation, "DTD: bad content model separator");
      if (sep != 0 && sep != next) throw Error(ErrorCode::SchemaViolation, "DTD: mixed separators in group");
      sep = next;
      ++c.pos;
    }
    out = "(?:";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0 && sep == '|') out += '|';
      out += items[i];
    }
    out += ')';
  } else {
    out = "(?:<" + regex_quote(c.name()) + ">)";
  }
  if (c.pos < c.s.size() && (c.s[c.pos] == '?' || c.s[c.pos] == '*' || c.s[c.pos] == '+')) {
    out += c.s[c.pos];
    ++c.pos;
  }
  return out;
}

bool is_nmtoken(std::string_view v) {
  if (v.empty()) return false;
  for (const char c : v) {
    if (!is_name_char(c)) return false;
  }
  return true;
}

}  // namespace

Dtd Dtd::parse(std::string_view text) {
  Dtd dtd;
  std::size_t i = 0;
  while (true) {
    i = text.find('<', i);
    if (i == std::string_view::npos) break;
    if (text.compare(i, 4, "<!--") == 0) {
      const auto end = text.find("-->", i);
      if (end == std::string_view::npos) throw Error(ErrorCode::SchemaViolation, "DTD: unterminated comment");
      i = end + 3;
      continue;
    }
    const auto end = text.find('>', i);
    if (end == std::string_view::npos) throw Error(ErrorCode::SchemaViolation, "DTD: unterminated declaration");
    // '>' never appears inside quoted defaults in the shipped DTDs, but guard anyway.
    std::size_t close = i;
    char quote = 0;
    for (; close < text.size(); ++close) {
      const char ch = text[close];
      if (quote) {
        if (ch == quote) quote = 0;
      } else if (ch == '"' || ch == '\'') {
        quote = ch;
      } else if (ch == '>') {
        break;
      }
    }
    const std::string_view decl = text.substr(i, close - i);
    i = close + 1;
    if (decl.rfind("<!ELEMENT", 0) == 0) {
      Cursor c{decl, 9};
      const std::string name = c.name();
      ElementDecl ed;
      const std::size_t model_begin = c.pos;
      if (c.peek() == '(') {
        Cursor probe = c;
        ++probe.pos;
        if (probe.peek() == '#') {
          ed.kind = ContentKind::Mixed;
          ++c.pos;
          std::string alternatives;
          c.name();  // #PCDATA
          while (c.peek() == '|') {
            ++c.pos;
            if (!alternatives.empty()) alternatives += '|';
            alternatives += "(?:<" + regex_quote(c.name()) + ">)";
          }
          c.expect(')');
          ed.model = std::regex(alternatives.empty() ? std::string() : "(?:" + alternatives + ")*");
        } else {
          ed.kind = ContentKind::Children;
          ed.model = std::regex(particle_regex(c));
        }
      } else {
        const std::string keyword = c.name();
        if (keyword == "EMPTY") {
          ed.kind = ContentKind::Empty;
        } else if (keyword == "ANY") {
          ed.kind = ContentKind::Any;
        } else {
          throw Error(ErrorCode::SchemaViolation, "DTD: unknown content keyword " + keyword);
        }
      }
      ed.source = text::trim(decl.substr(model_begin));
      dtd.elements_[name] = std::move(ed);
    } else if (decl.rfind("<!ATTLIST", 0) == 0) {
      Cursor c{decl, 9};
      const std::string element = c.name();
      auto& attrs = dtd.attributes_[element];
      while (!c.done()) {
        const std::string attr = c.name();
        AttrDecl ad;
        if (c.peek() == '(') {
          ++c.pos;
          ad.type = AttrType::Enumerated;
          ad.values.push_back(c.name());
          while (c.peek() == '|') {
            ++c.pos;
            ad.values.push_back(c.name());
          }
          c.expect(')');
        } else {
          const std::string type = c.name();
          if (type == "CDATA") ad.type = AttrType::Cdata;
          else if (type == "ID") ad.type = AttrType::Id;
          else if (type == "IDREF") ad.type = AttrType::IdRef;
          else if (type == "IDREFS") ad.type = AttrType::IdRefs;
          else if (type == "NMTOKEN") ad.type = AttrType::NmToken;
          else if (type == "NMTOKENS") ad.type = AttrType::NmTokens;
          else throw Error(ErrorCode::SchemaViolation, "DTD: unsupported attribute type " + type);
        }
        const char next = c.peek();
        if (next == '#') {
          const std::string keyword = c.name();
          if (keyword == "#REQUIRED") {
            ad.presence = AttrDefault::Required;
          } else if (keyword == "#IMPLIED") {
            ad.presence = AttrDefault::Implied;
          } else if (keyword == "#FIXED") {
            ad.presence = AttrDefault::Fixed;
            ad.default_value = c.quoted();
          } else {
            throw Error(ErrorCode::SchemaViolation, "DTD: unknown default " + keyword);
          }
        } else {
          ad.presence = AttrDefault::Value;
          ad.default_value = c.quoted();
        }
        attrs[attr] = std::move(ad);
      }
    } else if (decl.rfind("<!ENTITY", 0) == 0) {
      throw Error(ErrorCode::SchemaViolation, "DTD: entity declarations are not supported");
    }
  }
  return dtd;
}

std::vector<std::string> Dtd::validate(const Element& root, std::string_view expected_root) const {
  std::vector<std::string> errors;
  if (!expected_root.empty() && root.name != expected_root) {
    errors.push_back("/" + root.name + ": root element must be <" + std::string(expected_root) + ">");
  }
  std::map<std::string, std::string> ids;
  std::vector<std::pair<std::string, std::string>> refs;
  validate_element(root, "/" + root.name + "[1]", errors, ids, refs);
  for (const auto& [path, ref] : refs) {
    if (!ids.count(ref)) errors.push_back(path + ": IDREF '" + ref + "' does not match any ID");
  }
  return errors;
}

void Dtd::validate_element(const Element& e, const std::string& path, std::vector<std::string>& errors,
                           std::map<std::string, std::string>& ids,
                           std::vector<std::pair<std::string, std::string>>& refs) const {
  const auto decl = elements_.find(e.name);
  if (decl == elements_.end()) {
    errors.push_back(path + ": element <" + e.name + "> is not declared");
    return;
  }

  const auto attr_decls = attributes_.find(e.name);
  static const std::map<std::string, AttrDecl> no_attrs;
  const auto& declared = attr_decls == attributes_.end() ? no_attrs : attr_decls->second;
  for (const auto& [name, value] : e.attributes) {
    const auto it = declared.find(name);
    if (it == declared.end()) {
      errors.push_back(path + ": attribute '" + name + "' is not declared");
      continue;
    }
    const AttrDecl& ad = it->second;
    switch (ad.type) {
      case AttrType::Cdata: break;
      case AttrType::Id:
        if (!is_nmtoken(value) || std::isdigit(static_cast<unsigned char>(value.front())) || value.front() == '-' ||
            value.front() == '.') {
          errors.push_back(path + ": '" + value + "' is not a valid ID");
        } else if (!ids.emplace(value, path).second) {
          errors.push_back(path + ": duplicate ID '" + value + "'");
        }
        break;
      case AttrType::IdRef: refs.emplace_back(path, value); break;
      case AttrType::IdRefs:
        for (const auto& token : text::split(value, ' ')) {
          if (!token.empty()) refs.emplace_back(path, token);
        }
        break;
      case AttrType::NmToken:
        if (!is_nmtoken(value)) errors.push_back(path + ": '" + value + "' is not an NMTOKEN");
        break;
      case AttrType::NmTokens:
        for (const auto& token : text::split(value, ' ')) {
          if (!is_nmtoken(token)) errors.push_back(path + ": '" + value + "' is not NMTOKENS");
        }
        break;
      case AttrType::Enumerated: {
        bool found = false;
        for (const auto& v : ad.values) found = found || v == value;
        if (!found) errors.push_back(path + ": attribute '" + name + "' has value '" + value + "' outside its enumeration");
        break;
      }
    }
    if (ad.presence == AttrDefault::Fixed && value != ad.default_value) {
      errors.push_back(path + ": attribute '" + name + "' must be '" + ad.default_value + "'");
    }
  }
  for (const auto& [name, ad] : declared) {
    if (ad.presence == AttrDefault::Required && !e.attribute(name)) {
      errors.push_back(path + ": required attribute '" + name + "' missing");
    }
  }

  const bool has_text = e.text.find_first_not_of(" \t\r\n") != std::string::npos;
  std::string sequence;
  for (const auto& c : e.children) sequence += "<" + c.name + ">";
  switch (decl->second.kind) {
    case ContentKind::Empty:
      if (!e.children.empty() || !e.text.empty()) errors.push_back(path + ": declared EMPTY but has content");
      break;
    case ContentKind::Any: break;
    case ContentKind::Mixed:
      if (!std::regex_match(sequence, decl->second.model)) {
        errors.push_back(path + ": children do not match " + decl->second.source);
      }
      break;
    case ContentKind::Children:
      if (has_text) errors.push_back(path + ": character data not allowed by " + decl->second.source);
      if (!std::regex_match(sequence, decl->second.model)) {
        errors.push_back(path + ": children " + (sequence.empty() ? "(none)" : sequence) + " do not match " +
                         decl->second.source);
      }
      break;
  }

  std::map<std::string, int> seen;
  for (const auto& c : e.children) {
    const int n = seen[c.name]++;
    validate_element(c, path + "/" + c.name + "[" + std::to_string(n + 1) + "]", errors, ids, refs);
  }
}

}  // namespace mti::xml
