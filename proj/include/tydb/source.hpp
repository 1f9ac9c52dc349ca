#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tydb {

// 1-based lines and columns; end column is exclusive.
struct Span {
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

Span merge_spans(const Span& a, const Span& b);

using LocId = int;

struct Loc {
  LocId id = -1;
  std::string file;
  Span span;
};

// Owns every Loc of a loaded program. Ids are dense indices, assigned in
// lexing order, so reloading the same text reproduces the same ids.
class LocTable {
 public:
  LocId add(std::string file, Span span);
  const Loc& operator[](LocId id) const { return locs_.at(static_cast<size_t>(id)); }
  size_t size() const { return locs_.size(); }

 private:
  std::vector<Loc> locs_;
};

class Source {
 public:
  Source() = default;
  Source(std::string name, std::string text);

  const std::string& name() const { return name_; }
  const std::string& text() const { return text_; }
  size_t line_count() const { return lines_.size(); }
  // 1-based.
  std::string_view line(int n) const;

 private:
  std::string name_;
  std::string text_;
  std::vector<std::string> lines_;
};

// Load-time error carrying a position. Printed as `file:line:column - message`.
class SourceError : public std::runtime_error {
 public:
  SourceError(std::string file, Span span, const std::string& message);

  const std::string& file() const { return file_; }
  const Span& span() const { return span_; }
  const std::string& message() const { return message_; }
  std::string formatted() const;

 private:
  std::string file_;
  Span span_;
  std::string message_;
};

}  // namespace tydb
