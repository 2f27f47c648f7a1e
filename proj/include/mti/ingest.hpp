#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mti/document.hpp"
#include "mti/xml.hpp"

namespace mti {

struct IngestOptions {
  /// Language assumed when closed-class word scoring is inconclusive.
  std::string default_language = "en";
  /// Overrides the source recorded in (or implied by) the input.
  std::optional<Source> source;
  /// Used when the record carries no identifier of its own.
  std::string fallback_id;
};

/// Throws Error(UnrecognizedFormat) when no structural signature matches.
SourceFormat detect_format(std::string_view bytes);

/// Throws Error(MalformedInput) on syntax errors. A record without an abstract
/// still yields a Document, flagged DocumentFlag::MissingAbstract.
Document parse_document(std::string_view bytes, SourceFormat format, const IngestOptions& options = {});

/// "fr" or "en" when the closed-class word counts disagree decisively,
/// `fallback` otherwise.
std::string detect_language(std::string_view text, std::string_view fallback = "en");

/// Splits a text at blank lines into per-language segments when its paragraphs
/// are confidently in different languages; otherwise one segment.
std::vector<AbstractSegment> split_bilingual(std::string_view text, std::string_view fallback);

/// Debug dump of a Document in the pivot MODS format. parse_document on the
/// result with SourceFormat::ModsXml yields an equal Document.
std::string to_mods_xml(const Document& doc);

namespace mods_core {

/// Writes the MODS elements carrying a Document (title, abstracts, record
/// info, extension fields) into an already opened <mods> element.
void write(xml::Writer& w, const Document& doc);

/// Reads a <mods> element. Children whose local names are in `skip` are
/// ignored; every other unmapped element is flattened into `extra`.
Document read(const xml::Element& mods, const IngestOptions& options, const std::set<std::string>& skip = {});

}  // namespace mods_core

struct ManifestEntry {
  std::filesystem::path path;
  std::optional<Source> source;
};

/// One path per line, optionally followed by whitespace and a source tag.
/// Relative paths resolve against the manifest's directory; '#' starts a comment.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mti
