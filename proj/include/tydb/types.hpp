#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tydb {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Herbrand type term. Constructors are always fully applied: `->` has two
// arguments, `[]` one, tuples two or more. Rigid variables are skolem
// constants introduced by declared signatures; they unify only with themselves.
struct Type {
  enum class Kind { Var, Con, Rigid };

  Kind kind = Kind::Var;
  int var = -1;
  std::string name;
  std::vector<TypePtr> args;

  bool is_var() const { return kind == Kind::Var; }
  bool is_con(std::string_view n) const { return kind == Kind::Con && name == n; }
};

TypePtr tvar(int id);
TypePtr tcon(std::string name, std::vector<TypePtr> args = {});
TypePtr trigid(std::string name);
TypePtr tfun(TypePtr from, TypePtr to);
TypePtr tfun(std::vector<TypePtr> params, TypePtr result);
TypePtr tlist(TypePtr elem);
TypePtr ttuple(std::vector<TypePtr> elems);
TypePtr tunit();

// Name of the tuple constructor of the given width, e.g. "(,)".
std::string tuple_con(size_t width);
bool is_tuple_con(std::string_view name);

bool type_equal(const TypePtr& a, const TypePtr& b);
bool is_ground(const TypePtr& t);
void free_vars(const TypePtr& t, std::vector<int>& out);  // first-occurrence order, no repeats
bool occurs(int var, const TypePtr& t);
TypePtr substitute(const TypePtr& t, const std::map<int, TypePtr>& s);

struct ClassAtom {
  std::string cls;
  std::vector<TypePtr> args;
};

bool atom_equal(const ClassAtom& a, const ClassAtom& b);
ClassAtom substitute(const ClassAtom& a, const std::map<int, TypePtr>& s);

// `D => t`. All variables are quantified.
struct TypeScheme {
  std::vector<ClassAtom> context;
  TypePtr body;
};

void free_vars(const TypeScheme& s, std::vector<int>& out);

// A scheme whose wildcard variables are independent fresh pattern variables.
// Non-wildcard variables are named pattern variables that bind consistently.
struct SchemePattern {
  TypeScheme scheme;
  std::set<int> wildcards;
  // Pattern was written with an explicit `D =>` part.
  bool has_context = false;
};

// Renders a single type using the given names for variables; unnamed
// variables print as `t<id>`.
std::string print_type(const TypePtr& t, const std::map<int, std::string>& names);
std::string print_atom(const ClassAtom& a, const std::map<int, std::string>& names);

// Canonical text: variables renamed a, b, c... by first occurrence in the
// body then in the remaining context, context atoms sorted, `=>` omitted
// when the context is empty.
std::string pretty_type(const TypeScheme& s);
TypeScheme canonicalize(const TypeScheme& s);

// Equal up to bijective renaming of variables and reordering of context atoms.
bool alpha_equal(const TypeScheme& a, const TypeScheme& b);

struct PatternMatch {
  std::map<int, TypePtr> bindings;  // pattern variable -> subject subterm
};

// One-way match of pattern against subject. Each pattern context atom must
// match a distinct subject atom; the body pattern must match the body.
std::optional<PatternMatch> match_pattern_type(const SchemePattern& pattern, const TypeScheme& subject);

// Known type constructors and their arities.
class TypeConstructors {
 public:
  TypeConstructors();
  void declare(const std::string& name, int arity) { arity_[name] = arity; }
  std::optional<int> arity(const std::string& name) const;

 private:
  std::map<std::string, int> arity_;
};

}  // namespace tydb
