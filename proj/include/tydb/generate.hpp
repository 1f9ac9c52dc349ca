#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "tydb/constraints.hpp"
#include "tydb/program.hpp"

namespace tydb {

enum class Mode { Local, Global };

// A nominated type for a binding name, from a source signature or :declare.
struct Declared {
  TypeScheme scheme;
  std::vector<LocId> locs;
};

struct Generated {
  ConstraintSet cs;
  // Set when the target is a declared binding and its body is checked
  // against the declaration; a satisfiable check reports this scheme.
  std::optional<TypeScheme> declared;
};

// Constraint generation for one query. Local mode summarizes every let or
// top-level binding used from outside its own group by its solved form,
// blamed on the use site; Global mode inlines the binding's constraints.
class Generator {
 public:
  Generator(const Program& program, Mode mode, const std::map<int, Declared>& declared);
  ~Generator();

  Generated target(const Target& t);
  // A desugared expression resolved in the top-level scope.
  Generated expression(const ast::Expr& e);
  // An expression node of the loaded program; the result is its type
  // within the innermost enclosing binding group.
  Generated node(const ast::Expr& e);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Builds the Declared entries for every source signature.
std::map<int, Declared> source_signatures(const Program& program);

// `scheme` with variables replaced by rigid constants, plus its context.
TypeScheme skolemize(const TypeScheme& scheme);

}  // namespace tydb
