#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mti::tar {

struct Entry {
  std::string name;  // relative path, '/' separated, at most 255 bytes
  std::string data;

  bool operator==(const Entry&) const = default;
};

/// POSIX ustar archive of regular files. Timestamps and owners are zeroed so
/// equal input gives equal bytes.
std::string write(const std::vector<Entry>& entries);

/// Regular files of a ustar archive, in archive order. Throws
/// Error(MalformedInput) on bad checksums or truncation.
std::vector<Entry> read(std::string_view archive);

}  // namespace mti::tar
