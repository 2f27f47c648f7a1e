#include "mti/archive.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

#include "mti/error.hpp"

namespace mti::tar {

namespace {

constexpr std::size_t kBlock = 512;

void octal(char* field, std::size_t width, unsigned long long value) {
  // width includes the terminating NUL
  field[width - 1] = '\0';
  for (std::size_t i = width - 1; i-- > 0;) {
    field[i] = static_cast<char>('0' + (value & 7));
    value >>= 3;
  }
}

unsigned long long parse_octal(const char* field, std::size_t width) {
  unsigned long long v = 0;
  std::size_t i = 0;
  while (i < width && (field[i] == ' ' || field[i] == '\0')) ++i;
  for (; i < width && field[i] >= '0' && field[i] <= '7'; ++i) v = v * 8 + static_cast<unsigned>(field[i] - '0');
  return v;
}

unsigned checksum(const std::array<char, kBlock>& h) {
  unsigned sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    sum += (i >= 148 && i < 156) ? static_cast<unsigned>(' ') : static_cast<unsigned char>(h[i]);
  }
  return sum;
}

}  // namespace

std::string write(const std::vector<Entry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    std::array<char, kBlock> h{};
    std::string name = e.name;
    std::string prefix;
    if (name.size() > 100) {
      const auto slash = name.rfind('/', name.size() - 1);
      if (slash == std::string::npos || slash > 155 || name.size() - slash - 1 > 100) {
        throw Error(ErrorCode::InvalidArgument, "archive member name too long: " + name);
      }
      prefix = name.substr(0, slash);
      name = name.substr(slash + 1);
    }
    if (e.data.size() >= (1ull << 33)) throw Error(ErrorCode::InvalidArgument, "archive member too large: " + e.name);
    std::memcpy(h.data(), name.data(), name.size());
    octal(h.data() + 100, 8, 0644);
    octal(h.data() + 108, 8, 0);
    octal(h.data() + 116, 8, 0);
    octal(h.data() + 124, 12, e.data.size());
    octal(h.data() + 136, 12, 0);
    h[156] = '0';
    std::memcpy(h.data() + 257, "ustar", 6);
    std::memcpy(h.data() + 263, "00", 2);
    std::memcpy(h.data() + 345, prefix.data(), prefix.size());
    octal(h.data() + 148, 7, checksum(h));
    h[155] = ' ';
    out.append(h.data(), kBlock);
    out += e.data;
    out.append((kBlock - e.data.size() % kBlock) % kBlock, '\0');
  }
  out.append(2 * kBlock, '\0');
  return out;
}

std::vector<Entry> read(std::string_view a) {
  std::vector<Entry> out;
  std::size_t pos = 0;
  while (true) {
    if (pos + kBlock > a.size()) throw Error(ErrorCode::MalformedInput, "tar: truncated archive");
    std::array<char, kBlock> h{};
    std::memcpy(h.data(), a.data() + pos, kBlock);
    if (std::all_of(h.begin(), h.end(), [](char c) { return c == '\0'; })) break;
    if (parse_octal(h.data() + 148, 8) != checksum(h)) throw Error(ErrorCode::MalformedInput, "tar: bad header checksum");
    const std::size_t size = parse_octal(h.data() + 124, 12);
    pos += kBlock;
    if (pos + size > a.size()) throw Error(ErrorCode::MalformedInput, "tar: truncated member");
    const auto field = [&](std::size_t off, std::size_t width) {
      return std::string(h.data() + off, strnlen(h.data() + off, width));
    };
    std::string name = field(0, 100);
    const std::string prefix = field(345, 155);
    if (!prefix.empty()) name = prefix + "/" + name;
    if (h[156] == '0' || h[156] == '\0') out.push_back({name, std::string(a.substr(pos, size))});
    pos += size + (kBlock - size % kBlock) % kBlock;
  }
  return out;
}

}  // namespace mti::tar
