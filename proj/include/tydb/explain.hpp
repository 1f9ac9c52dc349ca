#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tydb/constraints.hpp"
#include "tydb/env.hpp"
#include "tydb/solver.hpp"

namespace tydb {

class ExplainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<char> mask(size_t n, const std::vector<int>& indices);

// Deletion-minimal unsatisfiable subset, as sorted constraint indices.
// Starts from the solver's conflict justification and tries deletions
// latest constraint first. Throws ExplainError when `cs` is satisfiable.
std::vector<int> find_mus(const ConstraintSet& cs, const Env& env);

// Constraints whose removal alone makes `cs` satisfiable, i.e. those in
// every minimal unsatisfiable subset. `mus` is any such subset.
std::vector<int> common_conflict_constraints(const ConstraintSet& cs, const Env& env, const std::vector<int>& mus);

// Rule ids that take part in the conflict of the given unsatisfiable subset.
std::vector<std::string> rules_involved(const ConstraintSet& cs, const Env& env, const std::vector<int>& subset);

// Locations reported for an unsatisfiable subset. A falsity conflict is
// reported at the class atoms the rule fired on; all others at every
// constraint of the subset.
std::set<LocId> conflict_locs(const ConstraintSet& cs, const Env& env, const std::vector<int>& subset);

struct Implicant {
  std::vector<int> constraints;
  // The full set was unsatisfiable; explanation used a satisfiable prefix.
  bool had_error = false;
};

// Deletion-minimal subset whose (leniently) solved result type matches the
// pattern. Throws ExplainError when the pattern never matches or already
// matches with no constraints at all.
Implicant minimal_implicant(const ConstraintSet& cs, const Env& env, const SchemePattern& pattern);

bool pattern_matches(const ConstraintSet& cs, const std::vector<char>& active, const Env& env,
                     const SchemePattern& pattern);

}  // namespace tydb
