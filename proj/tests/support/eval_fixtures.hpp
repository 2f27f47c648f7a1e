#pragma once

#include <map>
#include <string>
#include <vector>

#include "mti/eval.hpp"

namespace mti::testing {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// One document whose spans produce exactly the given counts in either mode:
/// matched pairs share a span, misses and false alarms sit apart.
inline std::pair<std::vector<GoldDocument>, std::map<std::string, std::vector<GoldSpan>>> build_counts(
    const Counts& c, EvalCategory category = EvalCategory::Esa) {
  GoldDocument d;
  d.id = "f";
  d.lang = "en";
  std::vector<GoldSpan> pred;
  std::size_t pos = 0;
  auto next = [&] {
    Span s{pos, pos + 3};
    pos += 5;
    return s;
  };
  for (std::size_t i = 0; i < c.tp; ++i) {
    const Span s = next();
    d.spans.push_back({s, category});
    pred.push_back({s, category});
  }
  for (std::size_t i = 0; i < c.fn; ++i) d.spans.push_back({next(), category});
  for (std::size_t i = 0; i < c.fp; ++i) pred.push_back({next(), category});
  d.text = std::string(pos, 'x');
  return {{d}, {{"f", pred}}};
}

}  // namespace mti::testing
