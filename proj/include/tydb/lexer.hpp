#pragma once

#include <string>
#include <vector>

#include "tydb/source.hpp"

namespace tydb {

enum class TokKind {
  VarId,       // map, x', _foo
  ConId,       // Int, Collect, False
  Keyword,     // let in where if then else class instance rule data
  Operator,    // + . : ++ `< etc; backquoted identifiers keep their backquotes in text
  ReservedOp,  // = | <- -> => ==> :: ::? .. backslash
  Integer,
  Fractional,
  Char,
  String,
  Special,  // ( ) [ ] , ; ` { }
  Wildcard,  // _
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  Span span;
  LocId loc = -1;
  // Column with tabs expanded to multiples of 8; used by the layout rule only.
  int layout_col = 0;
  bool line_start = false;

  bool is(TokKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_special(std::string_view t) const { return is(TokKind::Special, t); }
  bool is_reserved(std::string_view t) const { return is(TokKind::ReservedOp, t); }
  bool is_keyword(std::string_view t) const { return is(TokKind::Keyword, t); }
};

// Tokenizes `text`, registering a Loc per token in `locs`. The final token
// is always TokKind::End. Throws SourceError on lexical errors.
std::vector<Token> tokenize(const std::string& file, const std::string& text, LocTable& locs);

bool is_keyword(std::string_view word);

}  // namespace tydb
