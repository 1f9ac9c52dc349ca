#include "tydb/render.hpp"

#include <map>

namespace tydb {

std::string render_underlines(const std::vector<const Source*>& sources, const LocTable& locs,
                              const std::set<LocId>& implicated) {
  std::string out;
  for (const Source* src : sources) {
    std::map<int, std::vector<const Loc*>> by_line;
    for (LocId id : implicated) {
      const Loc& l = locs[id];
      if (l.file == src->name()) by_line[l.span.start_line].push_back(&l);
    }
    for (const auto& [line, ls] : by_line) {
      std::string_view text = src->line(line);
      std::string carets(text.size(), ' ');
      for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\t') carets[i] = '\t';
      }
      for (const Loc* l : ls) {
        int end = l->span.end_line == line ? l->span.end_col : static_cast<int>(text.size()) + 1;
        for (int c = l->span.start_col; c < end; ++c) {
          if (c >= 1 && static_cast<size_t>(c) <= carets.size()) carets[static_cast<size_t>(c - 1)] = '^';
        }
      }
      while (!carets.empty() && (carets.back() == ' ' || carets.back() == '\t')) carets.pop_back();
      out.append(text);
      out += "\n" + carets + "\n";
    }
  }
  return out;
}

std::string render_error(const std::vector<const Source*>& sources, const LocTable& locs, const ErrorReport& r) {
  std::string out;
  if (r.common.empty()) {
    out = "type error - contributing locations:\n" + render_underlines(sources, locs, r.locs);
  } else {
    out = "type error - conflicting locations:\n" + render_underlines(sources, locs, r.locs);
    out += "\nlocations which appear in all conflicts:\n" + render_underlines(sources, locs, r.common);
  }
  if (!r.rules.empty()) {
    out += "rule(s) involved:";
    for (size_t i = 0; i < r.rules.size(); ++i) out += (i ? "; " : " ") + r.rules[i];
    out += "\n";
  }
  return out;
}

}  // namespace tydb
