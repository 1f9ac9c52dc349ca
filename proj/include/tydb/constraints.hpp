#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tydb/source.hpp"
#include "tydb/types.hpp"

namespace tydb {

// A type equation or a class atom, blamed on a set of source tokens.
struct Constraint {
  enum class Kind { Eq, Class };
  Kind kind = Kind::Eq;
  TypePtr lhs, rhs;  // Eq
  ClassAtom atom;    // Class
  std::vector<LocId> locs;
  // Set on the equation tying a binding's name to its clause type; such
  // equations get re-blamed on the use site when the binding is inlined.
  int binder_group = -1;
};

Constraint eq_constraint(TypePtr a, TypePtr b, std::vector<LocId> locs);
Constraint class_constraint(ClassAtom atom, std::vector<LocId> locs);

std::string print_constraint(const Constraint& c);

// Everything the solver needs for one query.
struct ConstraintSet {
  std::vector<Constraint> constraints;
  // Context of a declared signature while checking its body; these are
  // assumptions, not deletable constraints.
  std::vector<ClassAtom> givens;
  TypePtr result;
};

std::set<LocId> locs_of(const std::vector<Constraint>& cs, const std::vector<int>& indices);

}  // namespace tydb
