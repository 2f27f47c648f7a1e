#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/document.hpp"
#include "mti/dtd.hpp"

namespace mti {

struct StageTiming {
  std::string stage;
  double seconds = 0;

  bool operator==(const StageTiming&) const = default;
};

struct Provenance {
  std::string pipeline_version;
  std::vector<StageTiming> stages;
  double total_seconds = 0;

  bool operator==(const Provenance&) const = default;
};

struct ModsTiRecord {
  Document document;
  std::vector<SpatialEntity> spatial;
  std::vector<OrganizationEntity> organizations;
  std::vector<TemporalEntity> temporal;
  std::vector<ThematicEntity> thematic;
  std::optional<Provenance> provenance;

  bool operator==(const ModsTiRecord&) const = default;
};

inline constexpr std::string_view kModsTiSystemId = "mods-ti.dtd";

/// Text of the shipped schema/mods-ti.dtd.
std::string_view mods_ti_dtd_text();
const xml::Dtd& mods_ti_dtd();

/// Sorts every annotation list by (segment, start, end descending, id), the
/// order the serializer writes.
void canonicalize(ModsTiRecord& record);

std::string to_mods_ti_xml(const ModsTiRecord& record);

/// Throws Error(SchemaViolation) carrying the offending element path. Unknown
/// elements directly under <mods> are tolerated and kept in Document::extra.
ModsTiRecord parse_mods_ti_xml(std::string_view bytes);

/// DTD messages for a serialized record; empty when valid.
std::vector<std::string> validate_mods_ti_xml(std::string_view bytes);

}  // namespace mti
