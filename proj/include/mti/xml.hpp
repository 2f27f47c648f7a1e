#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mti::xml {

/// Minimal owning DOM. Mixed content is not modelled: `text` holds the
/// concatenated character data of the element.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;
  std::vector<Element> children;

  std::string_view local_name() const;
  std::string_view prefix() const;

  std::optional<std::string> attribute(std::string_view qualified) const;
  /// Attribute lookup by local name, ignoring any namespace prefix.
  std::optional<std::string> attribute_local(std::string_view local) const;

  const Element* child(std::string_view local) const;
  std::vector<const Element*> children_named(std::string_view local) const;
  bool has_element_children() const { return !children.empty(); }
};

/// Parses a complete XML document and returns its root element.
/// Throws Error(MalformedInput) with the line number on syntax errors.
Element parse(std::string_view bytes);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

/// Streaming pretty-printer with a fixed two-space indent. Elements that
/// carry text are written on one line so character data is never padded.
class Writer {
 public:
  Writer();

  void declaration();
  void doctype(std::string_view root, std::string_view system_id);

  void open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs = {});
  void close();
  void leaf(std::string_view name, std::string_view text,
            const std::vector<std::pair<std::string, std::string>>& attrs = {});
  void empty(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs = {});

  std::string str() const { return out_.str(); }

 private:
  void indent();
  void attributes(const std::vector<std::pair<std::string, std::string>>& attrs);

  std::ostringstream out_;
  std::vector<std::string> stack_;
};

}  // namespace mti::xml
