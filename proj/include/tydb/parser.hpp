#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tydb/ast.hpp"
#include "tydb/lexer.hpp"

namespace tydb {

// Parses a whole program. Layout follows the simplified offside rule: a
// block's items start at the column of its first token, a token at a lower
// column closes the block. Explicit `{ ; }` blocks are also accepted.
ast::Module parse_program(const std::vector<Token>& tokens, const std::string& file);

// Standalone entry points used by the REPL and the prelude loader; the text
// is tokenized into `locs` under the given pseudo file name.
ast::ExprPtr parse_expression_text(const std::string& text, const std::string& file, LocTable& locs);
ast::SchemeExpr parse_scheme_text(const std::string& text, const std::string& file, LocTable& locs);

// `plot;getYs;centre`, `reverse;rev;2`. A clause number may only be last.
struct RefPath {
  using Segment = std::variant<std::string, int>;
  std::vector<Segment> segments;

  bool operator==(const RefPath&) const = default;
};

std::optional<RefPath> parse_refpath(std::string_view text);
std::string print_refpath(const RefPath& path);

// Re-parsable rendering of a module; nested blocks use explicit braces.
std::string print_module(const ast::Module& m);
std::string print_expr(const ast::Expr& e);

// Structural equality ignoring Locs and spans.
bool same_module(const ast::Module& a, const ast::Module& b);

}  // namespace tydb
