#pragma once

#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "mti/xml.hpp"

namespace mti::xml {

/// Validator for the subset of DTD syntax the shipped schemas use:
/// ELEMENT declarations (EMPTY, ANY, mixed, and children content models with
/// `,` `|` `?` `*` `+`) and ATTLIST declarations (CDATA, ID, IDREF, IDREFS,
/// NMTOKEN, NMTOKENS, enumerations; #REQUIRED, #IMPLIED, #FIXED, defaults).
/// Parameter entities and conditional sections are not supported.
class Dtd {
 public:
  static Dtd parse(std::string_view text);

  /// Returns one message per violation, prefixed with the element path.
  /// An empty result means the tree is valid.
  std::vector<std::string> validate(const Element& root, std::string_view expected_root = {}) const;

  bool declares(std::string_view element) const { return elements_.count(std::string(element)) > 0; }

 private:
  enum class ContentKind { Empty, Any, Mixed, Children };
  struct ElementDecl {
    ContentKind kind = ContentKind::Any;
    std::string source;
    std::regex model;
  };
  enum class AttrType { Cdata, Id, IdRef, IdRefs, NmToken, NmTokens, Enumerated };
  enum class AttrDefault { Required, Implied, Fixed, Value };
  struct AttrDecl {
    AttrType type = AttrType::Cdata;
    std::vector<std::string> values;
    AttrDefault presence = AttrDefault::Implied;
    std::string default_value;
  };

  void validate_element(const Element& e, const std::string& path, std::vector<std::string>& errors,
                        std::map<std::string, std::string>& ids,
                        std::vector<std::pair<std::string, std::string>>& refs) const;

  std::map<std::string, ElementDecl> elements_;
  std::map<std::string, std::map<std::string, AttrDecl>> attributes_;
};

}  // namespace mti::xml
