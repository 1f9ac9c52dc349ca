#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tydb/constraints.hpp"
#include "tydb/env.hpp"

namespace tydb {

// Set of justification indices: constraint i is bit i, rule r of the env is
// bit (constraint count + r).
class JustSet {
 public:
  JustSet() = default;
  explicit JustSet(size_t width) : words_((width + 63) / 64, 0) {}

  void set(size_t i);
  bool test(size_t i) const;
  JustSet& operator|=(const JustSet& o);
  bool empty() const;
  std::vector<int> indices() const;

 private:
  std::vector<uint64_t> words_;
};

struct Conflict {
  enum class Kind { Occurs, Clash, Falsity, MissingInstance };
  Kind kind = Kind::Clash;
  JustSet just;
  std::string witness;  // e.g. "Int vs Bool", "Fractional Integer"
};

struct ResidualAtom {
  ClassAtom atom;  // fully substituted
  JustSet just;
  bool missing = false;  // ground without an instance (lenient solving only)
};

struct SolveResult {
  bool ok = true;
  Conflict conflict;                 // when !ok
  std::map<int, TypePtr> subst;      // idempotent
  std::vector<ResidualAtom> residual;

  TypePtr apply(const TypePtr& t) const { return substitute(t, subst); }
};

struct SolveOptions {
  // Treat missing instances as residual atoms instead of conflicts.
  bool lenient = false;
};

// Solves the constraints whose `active` flag is set (all when `active` is
// empty): equations first, then propagation rules to a fixpoint (new
// equations re-enter unification), then instance checks on ground atoms.
SolveResult solve(const ConstraintSet& cs, const std::vector<char>& active, const Env& env,
                  SolveOptions options = {});

bool satisfiable(const ConstraintSet& cs, const std::vector<char>& active, const Env& env,
                 SolveOptions options = {});

// Indices of constraints and rules in a justification.
std::vector<int> constraint_indices(const JustSet& j, size_t constraint_count);
std::vector<int> rule_indices(const JustSet& j, size_t constraint_count, size_t rule_count);

// The solved type of `t` with every residual atom that shares a variable
// with it (transitively) and, if asked, every missing ground atom. Atoms
// implied by a subclass atom on the same arguments are dropped. With
// `all_atoms` the context is every residual atom.
TypeScheme residual_scheme(const SolveResult& r, const TypePtr& t, bool include_missing = true,
                           bool all_atoms = false);

// Whether a ground atom follows from the givens and the instance facts.
bool entails(const Env& env, const std::vector<ClassAtom>& givens, const ClassAtom& atom, int depth = 8);

}  // namespace tydb
