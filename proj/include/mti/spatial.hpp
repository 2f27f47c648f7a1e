#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mti/annotations.hpp"
#include "mti/document.hpp"
#include "mti/gazetteer.hpp"
#include "mti/rules.hpp"
#include "mti/tokenizer.hpp"

namespace mti {

struct DisambiguationWeights {
  double context = 0.7;
  double importance = 0.3;
};

/// One RuleSet per language. External lexicons named `toponym` are filled
/// from the gazetteer's names.
class RuleLibrary {
 public:
  /// Loads every `*.rules` file in `dir`.
  static RuleLibrary load(const std::filesystem::path& dir, const Gazetteer& gazetteer);
  void add(RuleSet rules, const Gazetteer& gazetteer);

  const RuleSet* for_lang(std::string_view lang) const;
  std::vector<std::string> languages() const;

 private:
  std::map<std::string, RuleSet, std::less<>> sets_;
};

/// Everything the spatial stage reads; immutable and shared between workers.
struct SpatialResources {
  const RuleLibrary* rules = nullptr;
  const Gazetteer* gazetteer = nullptr;
  const FeatureTypeMap* feature_types = nullptr;
  DisambiguationWeights weights;
};

std::vector<OrganizationEntity> match_organizations(std::string_view text, const std::vector<Token>& tokens,
                                                    const RuleSet& rules);

/// Absolute entities, never overlapping an organization span.
std::vector<SpatialEntity> match_esa(std::string_view text, const std::vector<Token>& tokens, const RuleSet& rules,
                                     const std::vector<OrganizationEntity>& organizations = {});

/// Relative entities built over `esas`; anchors hold indices into `esas` as
/// decimal strings until annotate_spatial assigns final ids.
std::vector<SpatialEntity> match_esr(std::string_view text, const std::vector<Token>& tokens,
                                     const std::vector<SpatialEntity>& esas, const RuleSet& rules);

/// Fills `candidates` from the gazetteer: lookups on the surface and on the
/// head, restricted to the classes named by FeatureType indicators.
void populate_candidates(SpatialEntity& entity, const Gazetteer& gazetteer, const FeatureTypeMap& feature_types);

/// Chooses the footprint among `entity.candidates`. `context_countries` holds
/// the country codes of the other resolved entities of the document.
void disambiguate(SpatialEntity& entity, const std::vector<std::string>& context_countries, const Gazetteer& gazetteer,
                  const DisambiguationWeights& weights = {});

struct SpatialAnnotations {
  std::vector<SpatialEntity> spatial;
  std::vector<OrganizationEntity> organizations;
};

/// Runs organizations, ESA, ESR and disambiguation over every abstract
/// segment with the rules of its language. Ids are s1.. and o1.. in output order.
SpatialAnnotations annotate_spatial(const Document& doc, const SpatialResources& resources);

}  // namespace mti
