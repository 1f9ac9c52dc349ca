#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tydb/source.hpp"

// Surface syntax tree, as written by the user. Every node records the Locs
// of the tokens it owns (the blame units) and its full source extent.
namespace tydb::ast {

struct Literal {
  enum class Kind { Integer, Fractional, Char, String };
  Kind kind = Kind::Integer;
  std::string text;  // exactly as written, quotes included

  bool operator==(const Literal&) const = default;
};

// Type syntax: variables by name, `_` wildcards, constructors by name.
struct TypeExpr {
  enum class Kind { Var, Wildcard, Con };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<TypeExpr> args;
  std::vector<LocId> locs;
};

struct AtomExpr {
  std::string cls;
  std::vector<TypeExpr> args;
  std::vector<LocId> locs;
};

struct SchemeExpr {
  std::vector<AtomExpr> context;
  TypeExpr body;
  bool has_context = false;
  // Every token the annotation spans, in order.
  std::vector<LocId> locs;
};

struct Pat;
using PatPtr = std::unique_ptr<Pat>;

struct PVar { std::string name; };
struct PWild {};
struct PLit { Literal lit; };
struct PTuple { std::vector<PatPtr> elems; };
struct PList { std::vector<PatPtr> elems; };
struct PCons { PatPtr head, tail; };
struct PUnit {};

struct Pat {
  std::vector<LocId> locs;
  Span span;
  std::variant<PVar, PWild, PLit, PTuple, PList, PCons, PUnit> node;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;
struct Decl;

// `prelude` marks names introduced by desugaring; they always refer to the
// prelude binding, whatever the user program shadows.
struct EVar { std::string name; bool prelude = false; };
struct ELit { Literal lit; };
struct EApp { ExprPtr fn, arg; };
// `l op r`; the operator is an EVar node so it keeps its own Loc.
struct EOp { ExprPtr op, lhs, rhs; };
struct ENeg { ExprPtr expr; };
struct ELam { std::vector<PatPtr> params; ExprPtr body; };
struct ELet { std::vector<Decl> decls; ExprPtr body; };
struct EIf {
  ExprPtr cond, then_branch, else_branch;
  LocId then_loc = -1, else_loc = -1;
};
struct ETuple { std::vector<ExprPtr> elems; };
struct EList { std::vector<ExprPtr> elems; };
struct EAnnot { ExprPtr expr; SchemeExpr type; };
// `e ::?` or `e ::? t`.
struct EQuery { ExprPtr expr; std::optional<SchemeExpr> pattern; std::string pattern_text; };
// `(op)`, `(op e)`, `(e op)`.
struct ESection { ExprPtr op; ExprPtr left, right; };
// `[from..to]`, `[from,then..to]`, `[from..]`.
struct EEnum {
  ExprPtr from, then, to;
  LocId dots_loc = -1;
};
struct Qualifier {
  enum class Kind { Generator, Guard, Let };
  Kind kind = Kind::Guard;
  PatPtr pat;
  ExprPtr expr;
  std::vector<Decl> decls;
  LocId loc = -1;  // `<-` for generators, preceding `|`/`,` for guards, `let` for lets
};
struct EComp { ExprPtr head; std::vector<Qualifier> quals; };

struct Expr {
  std::vector<LocId> locs;
  Span span;
  using Node = std::variant<EVar, ELit, EApp, EOp, ENeg, ELam, ELet, EIf, ETuple, EList, EAnnot, EQuery,
                            ESection, EEnum, EComp>;
  Node node;
};

struct GuardedRhs {
  LocId bar_loc = -1;
  ExprPtr guard, body;
};

struct Rhs {
  ExprPtr plain;                    // `= e`
  std::vector<GuardedRhs> guarded;  // `| g = e ...`
  std::vector<Decl> where;
  LocId where_loc = -1;
};

struct Clause {
  LocId binder_loc = -1;
  Span span;
  std::vector<PatPtr> params;
  Rhs rhs;
};

struct FunDecl {
  std::string name;
  std::vector<Clause> clauses;  // textual order; clause k is index k-1
};

struct PatDecl {
  PatPtr pat;
  LocId eq_loc = -1;
  Span span;
  Rhs rhs;
};

struct SigDecl {
  std::vector<std::string> names;
  std::vector<LocId> name_locs;
  SchemeExpr type;
  std::string type_text;
};

struct ClassDecl {
  std::string name;
  std::vector<std::string> vars;
  std::vector<SigDecl> methods;
  LocId loc = -1;
};

struct InstanceDecl {
  std::vector<AtomExpr> context;
  AtomExpr head;
  LocId loc = -1;
};

struct RuleDecl {
  std::vector<AtomExpr> heads;
  std::vector<std::pair<TypeExpr, TypeExpr>> equations;
  bool falsity = false;
  std::string text;  // printable form, e.g. "Integral a, Fractional a ==> False"
  LocId loc = -1;
};

struct DataDecl {
  std::string name;
  std::vector<std::string> vars;
};

// Declaration-level query `f ::?` / `f ::? t`.
struct QueryDecl {
  std::string name;
  LocId name_loc = -1;
  LocId query_loc = -1;
  std::optional<SchemeExpr> pattern;
  std::string pattern_text;
};

struct Decl {
  Span span;
  std::variant<FunDecl, PatDecl, SigDecl, ClassDecl, InstanceDecl, RuleDecl, DataDecl, QueryDecl> node;
};

struct Module {
  std::vector<Decl> decls;
};

}  // namespace tydb::ast
