#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tydb/constraints.hpp"
#include "tydb/env.hpp"
#include "tydb/generate.hpp"
#include "tydb/program.hpp"
#include "tydb/session.hpp"

// Test-side reference implementations. None of them calls the library's
// minimizer, explainer or generator; they use the library only for parsing
// and, where stated, for plain satisfiability checks.
namespace oracle {

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);
const tydb::Env& prelude();
std::unique_ptr<tydb::Session> open_session(const std::string& name);

// Constraints for a RefPath target, as the session would build them.
tydb::ConstraintSet constraints_for(const tydb::Program& p, tydb::Mode mode, const std::string& ref);

// Locations of the tokens with the given text on a 1-based source line.
std::set<tydb::LocId> tokens_on_line(const tydb::Program& p, int line, const std::vector<std::string>& texts);
std::set<tydb::LocId> tokens_of_lines(const tydb::Program& p, int first, int last);
std::string describe_locs(const tydb::Program& p, const std::set<tydb::LocId>& locs);

// ---- subsets

bool is_mus(const tydb::ConstraintSet& cs, const tydb::Env& env, const std::vector<int>& subset);

// Every MUS, by checking all 2^n subsets. Only for small n.
std::vector<std::vector<int>> muses_by_subsets(const tydb::ConstraintSet& cs, const tydb::Env& env);

// Every MUS, by exploring the deletion tree: shrink, then recurse on the
// set minus each member. Exact; practical when there are few MUSes.
std::vector<std::vector<int>> muses_by_tree(const tydb::ConstraintSet& cs, const tydb::Env& env,
                                            size_t limit = 5000);

// Constraints in every MUS: exactly those whose removal leaves the set
// satisfiable (a subset without c is unsat iff it contains a MUS avoiding c).
std::vector<int> common_by_removal(const tydb::ConstraintSet& cs, const tydb::Env& env);

// Distinct MUSes reached by shrinking in random orders.
std::vector<std::vector<int>> sample_muses(const tydb::ConstraintSet& cs, const tydb::Env& env, int count,
                                           unsigned seed);

std::vector<int> intersection(const std::vector<std::vector<int>>& sets);

// ---- permutation oracle

// Independent solver: equations unified in the given order (indices into
// the constraint list), then rule closure, then instance checks.
bool reference_satisfiable(const tydb::ConstraintSet& cs, const tydb::Env& env, const std::vector<int>& eq_order);

// ---- random constraint sets

struct RandomSets {
  explicit RandomSets(unsigned seed) : rng(seed) {}
  std::mt19937 rng;

  tydb::TypePtr type(int depth);
  tydb::ConstraintSet make(size_t max_constraints);
};

// Prelude plus a falsity rule and a two-argument class with a fundep rule.
const tydb::Env& rules_env();

// ---- algorithm W with class predicates

struct WResult {
  std::map<std::string, tydb::TypeScheme> schemes;
  std::set<std::string> failed;
};

WResult infer_w(const tydb::Program& p);

}  // namespace oracle
