#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tydb/ast.hpp"
#include "tydb/env.hpp"
#include "tydb/lexer.hpp"
#include "tydb/parser.hpp"
#include "tydb/source.hpp"

namespace tydb {

// Unknown name in a RefPath, bad clause index, and similar query-level errors.
class ReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// What a variable occurrence refers to.
struct Ref {
  enum class Kind { Mono, Let, Global };
  Kind kind = Kind::Global;
  int id = -1;  // mono binder id or let name id
  std::string name;
};

// A lambda- or clause-parameter-bound variable.
struct MonoBinder {
  int id = -1;
  std::string name;
  LocId loc = -1;
  int owner = -1;  // innermost enclosing binding, -1 for top-level expressions
};

// One name introduced by a let/where/top-level binding.
struct NameInfo {
  int id = -1;
  std::string name;
  int binding = -1;
  LocId loc = -1;
  const ast::SigDecl* sig = nullptr;
};

// One FunDecl or PatDecl.
struct Binding {
  int id = -1;
  const ast::Decl* decl = nullptr;
  std::vector<int> names;
  int parent = -1;  // enclosing binding, -1 at top level
  int scope = -1;
  std::set<int> uses;  // bindings referenced anywhere inside
  Span span;

  const ast::FunDecl* fun() const { return std::get_if<ast::FunDecl>(&decl->node); }
  const ast::PatDecl* pat() const { return std::get_if<ast::PatDecl>(&decl->node); }
};

// The bindings of one declaration list (top level, a let, a where).
struct Scope {
  int id = -1;
  int parent_binding = -1;
  std::vector<int> bindings;
};

struct EmbeddedQuery {
  enum class Kind { Type, Explain };
  Kind kind = Kind::Type;
  const ast::Expr* expr = nullptr;  // expression query, or
  int name = -1;                    // declaration query (NameInfo id)
  const ast::SchemeExpr* pattern = nullptr;
  std::string pattern_text;
  Span span;
  int owner = -1;
};

struct Target {
  enum class Kind { Binding, Clause, Mono };
  Kind kind = Kind::Binding;
  int binding = -1;
  int name = -1;    // Binding: the referenced name
  int clause = -1;  // Clause: 0-based
  int binder = -1;  // Mono
};

// Binding groups for one set of declared names: strongly connected
// components of the use graph within each scope, dependency order first.
struct Groups {
  std::vector<int> group_of;                     // binding -> group
  std::vector<std::vector<int>> members;         // group -> bindings
  std::map<int, std::vector<int>> scope_order;   // scope -> groups in dependency order
};

class Program {
 public:
  // Throws SourceError on lexical, syntax and resolution errors.
  static std::unique_ptr<Program> load(const std::string& name, const std::string& text, const Env& prelude);

  const Source& source() const { return source_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const ast::Module& module() const { return module_; }
  const Env& env() const { return env_; }
  LocTable& locs() { return locs_; }
  const LocTable& locs() const { return locs_; }

  const std::vector<Binding>& bindings() const { return bindings_; }
  const std::vector<NameInfo>& names() const { return names_; }
  const std::vector<Scope>& scopes() const { return scopes_; }
  const std::vector<MonoBinder>& binders() const { return binders_; }
  const std::vector<EmbeddedQuery>& queries() const { return queries_; }
  int top_scope() const { return 0; }

  const Ref* ref(const ast::Expr* e) const;
  int binder_of(const ast::Pat* p) const;  // mono binder id or -1
  int name_of(const ast::Pat* p) const;    // let-bound pattern variable name id or -1
  int owner_of(const ast::Expr* e) const;  // innermost enclosing binding or -1

  bool is_ancestor(int ancestor, int binding) const;  // strict

  Target resolve_reference(const RefPath& path) const;
  std::string describe(const Target& t) const;

  // Resolves a desugared expression typed at the prompt in the top-level
  // scope. Throws SourceError for unbound names.
  void resolve_expression(const ast::Expr& e);

  // Outermost expression node whose span is exactly `span`, or null.
  const ast::Expr* expression_at(const Span& span) const;

  Groups groups(const std::set<int>& declared_names) const;

 private:
  friend class Resolver;
  Source source_;
  std::vector<Token> tokens_;
  LocTable locs_;
  ast::Module module_;
  Env env_;
  std::vector<Binding> bindings_;
  std::vector<NameInfo> names_;
  std::vector<Scope> scopes_;
  std::vector<MonoBinder> binders_;
  std::vector<EmbeddedQuery> queries_;
  std::unordered_map<const ast::Expr*, Ref> refs_;
  std::unordered_map<const ast::Pat*, int> pat_binders_;
  std::unordered_map<const ast::Pat*, int> pat_names_;
  std::unordered_map<const ast::Expr*, int> owners_;
};

}  // namespace tydb
