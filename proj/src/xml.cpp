#include "mti/xml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>

#include "mti/error.hpp"

namespace mti::xml {

namespace pt = boost::property_tree;

namespace {

std::string_view local_of(std::string_view name) {
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

Element convert(const std::string& name, const pt::ptree& node) {
  Element e;
  e.name = name;
  e.text = node.data();
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>") {
      for (const auto& [attr, value] : child) e.attributes.emplace_back(attr, value.data());
    } else if (key == "<xmlcomment>" || key == "<xmltext>") {
      continue;
    } else {
      e.children.push_back(convert(key, child));
    }
  }
  return e;
}

// The bundled rapidxml does not verify closing tag names; check nesting here
// so mismatched tags are reported with their line.
void check_tag_balance(std::string_view s) {
  std::vector<std::string_view> stack;
  std::size_t line = 1;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": " + what);
  };
  auto skip_to = [&](std::string_view terminator) {
    const auto end = s.find(terminator, i);
    if (end == std::string_view::npos) fail("unterminated markup");
    for (std::size_t k = i; k < end; ++k) line += s[k] == '\n';
    i = end + terminator.size();
  };
  while (i < s.size()) {
    if (s[i] == '\n') ++line;
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      skip_to("-->");
    } else if (s.compare(i, 9, "<![CDATA[") == 0) {
      skip_to("]]>");
    } else if (s.compare(i, 2, "<?") == 0) {
      skip_to("?>");
    } else if (s.compare(i, 2, "<!") == 0) {
      // DOCTYPE, possibly with an internal subset
      int depth = 0;
      for (; i < s.size(); ++i) {
        if (s[i] == '\n') ++line;
        if (s[i] == '[') ++depth;
        if (s[i] == ']') --depth;
        if (s[i] == '>' && depth <= 0) break;
      }
      ++i;
    } else {
      const bool closing = i + 1 < s.size() && s[i + 1] == '/';
      std::size_t j = i + (closing ? 2 : 1);
      const std::size_t name_begin = j;
      while (j < s.size() && s[j] != '>' && s[j] != '/' && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      const auto name = s.substr(name_begin, j - name_begin);
      char quote = 0;
      for (; j < s.size(); ++j) {
        if (s[j] == '\n') ++line;
        if (quote) {
          if (s[j] == quote) quote = 0;
        } else if (s[j] == '"' || s[j] == '\'') {
          quote = s[j];
        } else if (s[j] == '>') {
          break;
        }
      }
      if (j >= s.size()) fail("unterminated tag <" + std::string(name) + ">");
      const bool self_closing = s[j - 1] == '/';
      if (closing) {
        if (stack.empty() || stack.back() != name) {
          fail("closing tag </" + std::string(name) + "> does not match " +
               (stack.empty() ? std::string("anything") : "<" + std::string(stack.back()) + ">"));
        }
        stack.pop_back();
      } else if (!self_closing) {
        stack.push_back(name);
      }
      i = j + 1;
    }
  }
  if (!stack.empty()) fail("unclosed element <" + std::string(stack.back()) + ">");
}

}  // namespace

std::string_view Element::local_name() const { return local_of(name); }

std::string_view Element::prefix() const {
  const auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view{} : std::string_view(name).substr(0, colon);
}

std::optional<std::string> Element::attribute(std::string_view qualified) const {
  for (const auto& [k, v] : attributes) {
    if (k == qualified) return v;
  }
  return std::nullopt;
}

std::optional<std::string> Element::attribute_local(std::string_view local) const {
  for (const auto& [k, v] : attributes) {
    if (local_of(k) == local) return v;
  }
  return std::nullopt;
}

const Element* Element::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c.local_name() == local) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.local_name() == local) out.push_back(&c);
  }
  return out;
}

Element parse(std::string_view bytes) {
  check_tag_balance(bytes);
  pt::ptree tree;
  std::istringstream in{std::string(bytes)};
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedInput, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  const Element* root = nullptr;
  Element holder;
  for (const auto& [key, child] : tree) {
    if (!key.empty() && key.front() == '<') continue;
    if (root != nullptr) throw Error(ErrorCode::MalformedInput, "more than one root element");
    holder = convert(key, child);
    root = &holder;
  }
  if (root == nullptr) throw Error(ErrorCode::MalformedInput, "no root element");
  return holder;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

Writer::Writer() = default;

void Writer::declaration() { out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::doctype(std::string_view root, std::string_view system_id) {
  out_ << "<!DOCTYPE " << root << " SYSTEM \"" << system_id << "\">\n";
}

void Writer::indent() {
  for (std::size_t i = 0; i < stack_.size(); ++i) out_ << "  ";
}

void Writer::attributes(const std::vector<std::pair<std::string, std::string>>& attrs) {
  for (const auto& [k, v] : attrs) out_ << ' ' << k << "=\"" << escape_attribute(v) << '"';
}

void Writer::open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ << '<' << name;
  attributes(attrs);
  out_ << ">\n";
  stack_.emplace_back(name);
}

void Writer::close() {
  const std::string name = std::move(stack_.back());
  stack_.pop_back();
  indent();
  out_ << "</" << name << ">\n";
}

void Writer::leaf(std::string_view name, std::string_view text,
                  const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ << '<' << name;
  attributes(attrs);
  out_ << '>' << escape_text(text) << "</" << name << ">\n";
}

void Writer::empty(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ << '<' << name;
  attributes(attrs);
  out_ << "/>\n";
}

}  // namespace mti::xml
