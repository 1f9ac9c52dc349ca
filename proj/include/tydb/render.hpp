#pragma once

#include <set>
#include <string>
#include <vector>

#include "tydb/source.hpp"

namespace tydb {

// Each source line holding an implicated token, followed by a caret line
// under the token columns. Sources print in the given order, lines in
// source order. Every line ends in '\n'.
std::string render_underlines(const std::vector<const Source*>& sources, const LocTable& locs,
                              const std::set<LocId>& implicated);

struct ErrorReport {
  std::set<LocId> locs;
  std::set<LocId> common;  // printed only when non-empty
  std::vector<std::string> rules;
};

std::string render_error(const std::vector<const Source*>& sources, const LocTable& locs, const ErrorReport& r);

}  // namespace tydb
