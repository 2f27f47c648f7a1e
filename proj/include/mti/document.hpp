#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mti {

enum class Source { Istex, Agritrop, Anrt, Other };
enum class SourceFormat { ModsXml, DublinCoreXml, RdfTriples };
enum class DocumentFlag { MissingAbstract };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);  // throws Error(InvalidArgument)
bool try_source_from_string(std::string_view s, Source& out);
std::string_view to_string(SourceFormat f);
SourceFormat format_from_string(std::string_view s);  // throws Error(UnrecognizedFormat)

struct AbstractSegment {
  std::string lang;  // ISO 639-1
  std::string text;

  bool operator==(const AbstractSegment&) const = default;
};

/// One normalized bibliographic record.
struct Document {
  std::string id;
  Source source = Source::Other;
  std::vector<std::string> languages;  // distinct segment languages, first-seen order
  std::string title;
  std::vector<AbstractSegment> abstracts;
  std::vector<std::pair<std::string, std::string>> extra;  // source order
  std::vector<DocumentFlag> flags;

  bool has_flag(DocumentFlag f) const;
  bool operator==(const Document&) const = default;
};

}  // namespace mti
