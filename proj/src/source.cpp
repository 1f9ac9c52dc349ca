#include "tydb/source.hpp"

#include <algorithm>

namespace tydb {

Span merge_spans(const Span& a, const Span& b) {
  if (a.start_line == 0) return b;
  if (b.start_line == 0) return a;
  Span r;
  if (std::pair(a.start_line, a.start_col) <= std::pair(b.start_line, b.start_col)) {
    r.start_line = a.start_line;
    r.start_col = a.start_col;
  } else {
    r.start_line = b.start_line;
    r.start_col = b.start_col;
  }
  if (std::pair(a.end_line, a.end_col) >= std::pair(b.end_line, b.end_col)) {
    r.end_line = a.end_line;
    r.end_col = a.end_col;
  } else {
    r.end_line = b.end_line;
    r.end_col = b.end_col;
  }
  return r;
}

LocId LocTable::add(std::string file, Span span) {
  LocId id = static_cast<LocId>(locs_.size());
  locs_.push_back(Loc{id, std::move(file), span});
  return id;
}

Source::Source(std::string name, std::string text) : name_(std::move(name)), text_(std::move(text)) {
  std::string cur;
  for (char c : text_) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines_.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines_.push_back(std::move(cur));
}

std::string_view Source::line(int n) const {
  if (n < 1 || static_cast<size_t>(n) > lines_.size()) return {};
  return lines_[static_cast<size_t>(n - 1)];
}

SourceError::SourceError(std::string file, Span span, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(span.start_line) + ":" +
                         std::to_string(span.start_col) + " - " + message),
      file_(std::move(file)),
      span_(span),
      message_(message) {}

std::string SourceError::formatted() const { return what(); }

}  // namespace tydb
