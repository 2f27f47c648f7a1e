#pragma once

#include <string>
#include <vector>

#include "mti/service.hpp"

namespace mti::testing {

inline std::string mods_record(const std::string& id, const std::string& lang, const std::string& abstract) {
  return "<mods xmlns=\"http://www.loc.gov/mods/v3\"><titleInfo><title>Record " + id +
         "</title></titleInfo><abstract lang=\"" + lang + "\">" + abstract +
         "</abstract><recordInfo><recordIdentifier>" + id + "</recordIdentifier></recordInfo></mods>";
}

inline UploadRequest three_records() {
  UploadRequest r;
  r.name = "sahel";
  r.files = {
      {"one.xml", mods_record("doc-1", "en", "Drought near Dakar reduced rice yields from 1990 to 2000.")},
      {"two.xml", mods_record("doc-2", "fr", "La sécheresse dans le golfe de Guinée en 2004.")},
      {"three.xml", mods_record("doc-3", "en", "CIRAD conducts research in Madagascar on climate change.")},
  };
  return r;
}

}  // namespace mti::testing
