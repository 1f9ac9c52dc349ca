#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tydb/ast.hpp"
#include "tydb/source.hpp"
#include "tydb/types.hpp"

namespace tydb {

// `instance (C1, ..., Cn) => H`. Variables are local to the instance.
struct Instance {
  std::vector<ClassAtom> context;
  ClassAtom head;
};

// `rule H1, ..., Hn ==> body`; body is a conjunction of equations or False.
struct PropRule {
  std::string id;
  std::vector<ClassAtom> heads;
  std::vector<std::pair<TypePtr, TypePtr>> equations;
  bool falsity = false;
};

struct Env {
  TypeConstructors tycons;
  std::map<std::string, int> classes;  // name -> arity
  std::vector<Instance> instances;
  std::vector<PropRule> rules;
  std::map<std::string, TypeScheme> globals;
};

// State for converting type syntax: named variables share ids, wildcards
// always get new ones. Rigid conversion turns named variables into skolems.
struct TypeConversion {
  std::map<std::string, TypePtr> vars;
  std::set<int> wildcards;
  int next_var = 0;
  bool rigid = false;
};

TypePtr convert_type(const ast::TypeExpr& t, TypeConversion& conv, const Env& env, const LocTable& locs);
ClassAtom convert_atom(const ast::AtomExpr& a, TypeConversion& conv, const Env& env, const LocTable& locs);
TypeScheme convert_scheme(const ast::SchemeExpr& s, TypeConversion& conv, const Env& env, const LocTable& locs);

// Adds the data, class, instance, rule and (when `signatures` is set)
// top-level signature declarations of `m` to `env`.
void add_declarations(Env& env, const ast::Module& m, const LocTable& locs, bool signatures);

const std::string& default_prelude_text();
Env load_prelude(const std::string& text, const std::string& file = "<prelude>");

// Classes whose residues are defaulted for argument-less top-level bindings.
bool is_numeric_class(const std::string& cls);

}  // namespace tydb
