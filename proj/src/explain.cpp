#include "tydb/explain.hpp"

#include <algorithm>

namespace tydb {

std::vector<char> mask(size_t n, const std::vector<int>& indices) {
  std::vector<char> m(n, 0);
  for (int i : indices) m[static_cast<size_t>(i)] = 1;
  return m;
}

std::vector<int> find_mus(const ConstraintSet& cs, const Env& env) {
  const size_t n = cs.constraints.size();
  SolveResult first = solve(cs, {}, env);
  if (first.ok) throw ExplainError("the constraints are satisfiable");
  std::vector<int> current = constraint_indices(first.conflict.just, n);
  std::vector<char> active = mask(n, current);
  for (size_t k = current.size(); k-- > 0;) {
    int c = current[k];
    if (!active[c]) continue;
    active[c] = 0;
    SolveResult r = solve(cs, active, env);
    if (r.ok) {
      active[c] = 1;
      continue;
    }
    // Shrink to the new conflict; it is a subset of what is still active.
    std::vector<char> next = mask(n, constraint_indices(r.conflict.just, n));
    for (size_t i = 0; i < n; ++i) active[i] = active[i] && next[i];
  }
  std::vector<int> out;
  for (size_t i = 0; i < n; ++i) {
    if (active[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> common_conflict_constraints(const ConstraintSet& cs, const Env& env, const std::vector<int>& mus) {
  std::vector<int> out;
  std::vector<char> active(cs.constraints.size(), 1);
  for (int c : mus) {
    active[c] = 0;
    if (satisfiable(cs, active, env)) out.push_back(c);
    active[c] = 1;
  }
  return out;
}

std::vector<std::string> rules_involved(const ConstraintSet& cs, const Env& env, const std::vector<int>& subset) {
  SolveResult r = solve(cs, mask(cs.constraints.size(), subset), env);
  std::vector<std::string> out;
  if (r.ok) return out;
  for (int i : rule_indices(r.conflict.just, cs.constraints.size(), env.rules.size())) out.push_back(env.rules[i].id);
  return out;
}

std::set<LocId> conflict_locs(const ConstraintSet& cs, const Env& env, const std::vector<int>& subset) {
  SolveResult r = solve(cs, mask(cs.constraints.size(), subset), env);
  if (r.ok || r.conflict.kind != Conflict::Kind::Falsity) return locs_of(cs.constraints, subset);
  std::vector<int> atoms;
  for (int i : subset) {
    if (cs.constraints[i].kind == Constraint::Kind::Class) atoms.push_back(i);
  }
  return locs_of(cs.constraints, atoms);
}

bool pattern_matches(const ConstraintSet& cs, const std::vector<char>& active, const Env& env,
                     const SchemePattern& pattern) {
  SolveResult r = solve(cs, active, env, SolveOptions{true});
  if (!r.ok) return false;
  return match_pattern_type(pattern, canonicalize(residual_scheme(r, cs.result, true, true))).has_value();
}

Implicant minimal_implicant(const ConstraintSet& cs, const Env& env, const SchemePattern& pattern) {
  const size_t n = cs.constraints.size();
  Implicant out;
  std::vector<char> active(n, 1);
  out.had_error = !satisfiable(cs, active, env);
  if (!satisfiable(cs, active, env, SolveOptions{true})) {
    // Largest leniently satisfiable prefix; satisfiability is monotone.
    size_t lo = 0, hi = n;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      std::vector<char> m(n, 0);
      std::fill(m.begin(), m.begin() + static_cast<long>(mid), 1);
      if (satisfiable(cs, m, env, SolveOptions{true})) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    std::fill(active.begin(), active.end(), 0);
    std::fill(active.begin(), active.begin() + static_cast<long>(lo), 1);
  }
  if (!pattern_matches(cs, active, env, pattern)) throw ExplainError("type does not have this form");
  if (pattern_matches(cs, std::vector<char>(n, 0), env, pattern)) {
    throw ExplainError("every type has this form; refine the pattern");
  }
  for (size_t k = n; k-- > 0;) {
    if (!active[k]) continue;
    active[k] = 0;
    if (!pattern_matches(cs, active, env, pattern)) active[k] = 1;
  }
  for (size_t i = 0; i < n; ++i) {
    if (active[i]) out.constraints.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace tydb
