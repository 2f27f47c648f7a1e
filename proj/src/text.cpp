#include "mti/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "mti/error.hpp"

namespace mti {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnrecognizedFormat: return "UnrecognizedFormat";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::MalformedSkos: return "MalformedSkos";
    case ErrorCode::DanglingBroaderRef: return "DanglingBroaderRef";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedRule: return "MalformedRule";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownDocId: return "UnknownDocId";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::CorpusNotDone: return "CorpusNotDone";
    case ErrorCode::EmptyUpload: return "EmptyUpload";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace mti

namespace mti::text {

std::vector<Scalar> decode(std::string_view utf8) {
  std::vector<Scalar> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(begin), static_cast<std::size_t>(i)});
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  uint8_t buf[4];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, 4, static_cast<UChar32>(cp), error);
  if (error) return "\xEF\xBF\xBD";
  out.assign(reinterpret_cast<const char*>(buf), n);
  return out;
}

std::size_t scalar_length(std::string_view utf8) {
  std::size_t n = 0;
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    ++n;
  }
  return n;
}

std::string scalar_substr(std::string_view utf8, std::size_t begin, std::size_t end) {
  const auto scalars = decode(utf8);
  end = std::min(end, scalars.size());
  if (begin >= end) return {};
  return std::string(utf8.substr(scalars[begin].byte_begin, scalars[end - 1].byte_end - scalars[begin].byte_begin));
}

std::string fold(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) return std::string(utf8);
  icu::UnicodeString decomposed =
      nfd->normalize(icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size()))), status);
  if (U_FAILURE(status)) return std::string(utf8);
  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    i += U16_LENGTH(c);
    if (u_charType(c) == U_NON_SPACING_MARK) continue;
    switch (c) {
      case 0x0153: stripped.append(icu::UnicodeString(u"oe")); break;
      case 0x0152: stripped.append(icu::UnicodeString(u"OE")); break;
      case 0x00E6: stripped.append(icu::UnicodeString(u"ae")); break;
      case 0x00C6: stripped.append(icu::UnicodeString(u"AE")); break;
      case 0x2019:
      case 0x2018:
      case 0x02BC: stripped.append(static_cast<UChar32>('\'')); break;
      default: stripped.append(c);
    }
  }
  stripped.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  stripped.toUTF8String(out);
  return out;
}

bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_digit(char32_t cp) { return u_isdigit(static_cast<UChar32>(cp)); }
bool is_upper(char32_t cp) { return u_isUUppercase(static_cast<UChar32>(cp)) || u_istitle(static_cast<UChar32>(cp)); }
bool is_lower(char32_t cp) { return u_isULowercase(static_cast<UChar32>(cp)); }
bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)) || cp == 0xFEFF; }
bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019 || cp == 0x02BC; }
bool is_hyphen(char32_t cp) { return cp == U'-' || cp == 0x2010 || cp == 0x2011; }
bool is_mark(char32_t cp) {
  const auto t = u_charType(static_cast<UChar32>(cp));
  return t == U_NON_SPACING_MARK || t == U_COMBINING_SPACING_MARK || t == U_ENCLOSING_MARK;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::MalformedInput, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::MalformedInput, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace mti::text
