#include "mti/document.hpp"

#include <algorithm>

#include "mti/error.hpp"
#include "mti/text.hpp"

namespace mti {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Istex: return "ISTEX";
    case Source::Agritrop: return "AGRITROP";
    case Source::Anrt: return "ANRT";
    case Source::Other: return "OTHER";
  }
  return "OTHER";
}

bool try_source_from_string(std::string_view s, Source& out) {
  for (const Source candidate : {Source::Istex, Source::Agritrop, Source::Anrt, Source::Other}) {
    const auto name = to_string(candidate);
    if (s.size() == name.size() && text::starts_with_ci(s, name)) {
      out = candidate;
      return true;
    }
  }
  return false;
}

Source source_from_string(std::string_view s) {
  Source out;
  if (!try_source_from_string(s, out)) throw Error(ErrorCode::InvalidArgument, "unknown source '" + std::string(s) + "'");
  return out;
}

std::string_view to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::ModsXml: return "mods";
    case SourceFormat::DublinCoreXml: return "dc";
    case SourceFormat::RdfTriples: return "rdf";
  }
  return "mods";
}

SourceFormat format_from_string(std::string_view s) {
  const std::string lower = text::fold(s);
  if (lower == "mods" || lower == "modsxml") return SourceFormat::ModsXml;
  if (lower == "dc" || lower == "dublincore" || lower == "dublincorexml") return SourceFormat::DublinCoreXml;
  if (lower == "rdf" || lower == "ntriples" || lower == "rdftriples") return SourceFormat::RdfTriples;
  throw Error(ErrorCode::UnrecognizedFormat, "unknown format name '" + std::string(s) + "'");
}

bool Document::has_flag(DocumentFlag f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

}  // namespace mti
