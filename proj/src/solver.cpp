#include "tydb/solver.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

namespace tydb {

Constraint eq_constraint(TypePtr a, TypePtr b, std::vector<LocId> locs) {
  Constraint c;
  c.kind = Constraint::Kind::Eq;
  c.lhs = std::move(a);
  c.rhs = std::move(b);
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  c.locs = std::move(locs);
  return c;
}

Constraint class_constraint(ClassAtom atom, std::vector<LocId> locs) {
  Constraint c;
  c.kind = Constraint::Kind::Class;
  c.atom = std::move(atom);
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  c.locs = std::move(locs);
  return c;
}

std::string print_constraint(const Constraint& c) {
  std::map<int, std::string> none;
  std::string out = c.kind == Constraint::Kind::Eq ? print_type(c.lhs, none) + " = " + print_type(c.rhs, none)
                                                    : print_atom(c.atom, none);
  out += " @";
  for (LocId l : c.locs) out += " " + std::to_string(l);
  return out;
}

std::set<LocId> locs_of(const std::vector<Constraint>& cs, const std::vector<int>& indices) {
  std::set<LocId> out;
  for (int i : indices) {
    if (i >= 0 && static_cast<size_t>(i) < cs.size()) out.insert(cs[i].locs.begin(), cs[i].locs.end());
  }
  return out;
}

void JustSet::set(size_t i) {
  if (i / 64 >= words_.size()) words_.resize(i / 64 + 1, 0);
  words_[i / 64] |= uint64_t{1} << (i % 64);
}

bool JustSet::test(size_t i) const { return i / 64 < words_.size() && (words_[i / 64] >> (i % 64)) & 1; }

JustSet& JustSet::operator|=(const JustSet& o) {
  if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
  for (size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

bool JustSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

std::vector<int> JustSet::indices() const {
  std::vector<int> out;
  for (size_t w = 0; w < words_.size(); ++w) {
    for (int b = 0; b < 64; ++b) {
      if ((words_[w] >> b) & 1) out.push_back(static_cast<int>(w * 64 + b));
    }
  }
  return out;
}

std::vector<int> constraint_indices(const JustSet& j, size_t constraint_count) {
  std::vector<int> out;
  for (int i : j.indices()) {
    if (static_cast<size_t>(i) < constraint_count) out.push_back(i);
  }
  return out;
}

std::vector<int> rule_indices(const JustSet& j, size_t constraint_count, size_t rule_count) {
  std::vector<int> out;
  for (int i : j.indices()) {
    if (static_cast<size_t>(i) >= constraint_count && static_cast<size_t>(i) < constraint_count + rule_count) {
      out.push_back(i - static_cast<int>(constraint_count));
    }
  }
  return out;
}

namespace {

// One-way matching of a template (whose variables are pattern variables)
// against a subject term.
bool match_into(const TypePtr& tmpl, const TypePtr& subject, std::map<int, TypePtr>& binds) {
  if (tmpl->kind == Type::Kind::Var) {
    auto it = binds.find(tmpl->var);
    if (it == binds.end()) {
      binds[tmpl->var] = subject;
      return true;
    }
    return type_equal(it->second, subject);
  }
  if (tmpl->kind != subject->kind || tmpl->name != subject->name || tmpl->args.size() != subject->args.size()) {
    return false;
  }
  for (size_t i = 0; i < tmpl->args.size(); ++i) {
    if (!match_into(tmpl->args[i], subject->args[i], binds)) return false;
  }
  return true;
}

bool match_atom(const ClassAtom& tmpl, const ClassAtom& subject, std::map<int, TypePtr>& binds) {
  if (tmpl.cls != subject.cls || tmpl.args.size() != subject.args.size()) return false;
  for (size_t i = 0; i < tmpl.args.size(); ++i) {
    if (!match_into(tmpl.args[i], subject.args[i], binds)) return false;
  }
  return true;
}

bool atom_ground(const ClassAtom& a) {
  return std::all_of(a.args.begin(), a.args.end(), [](const TypePtr& t) { return is_ground(t); });
}

std::string print_plain(const TypePtr& t) { return print_type(t, {}); }

class Solver {
 public:
  Solver(const ConstraintSet& cs, const Env& env, SolveOptions opts)
      : cs_(cs), env_(env), opts_(opts), width_(cs.constraints.size() + env.rules.size()) {}

  SolveResult run(const std::vector<char>& active) {
    SolveResult r;
    const auto& cons = cs_.constraints;
    auto on = [&](size_t i) { return active.empty() || (i < active.size() && active[i]); };
    for (size_t i = 0; i < cons.size(); ++i) {
      if (!on(i) || cons[i].kind != Constraint::Kind::Eq) continue;
      JustSet j(width_);
      j.set(i);
      if (!unify(cons[i].lhs, cons[i].rhs, j, r.conflict)) {
        r.ok = false;
        return r;
      }
    }
    std::vector<std::pair<ClassAtom, JustSet>> atoms;
    for (size_t i = 0; i < cons.size(); ++i) {
      if (!on(i) || cons[i].kind != Constraint::Kind::Class) continue;
      JustSet j(width_);
      j.set(i);
      atoms.emplace_back(cons[i].atom, j);
    }
    if (!rules(atoms, r.conflict)) {
      r.ok = false;
      return r;
    }
    std::vector<std::pair<ClassAtom, JustSet>> resolved = resolve_atoms(atoms);
    for (auto& [atom, j] : resolved) {
      if (!atom_ground(atom)) {
        add_residual(r.residual, atom, j, false);
        continue;
      }
      if (entails(env_, cs_.givens, atom)) continue;
      if (!opts_.lenient) {
        r.ok = false;
        r.conflict.kind = Conflict::Kind::MissingInstance;
        r.conflict.just = j;
        r.conflict.witness = print_atom(atom, {});
        return r;
      }
      add_residual(r.residual, atom, j, true);
    }
    for (const auto& [v, b] : subst_) {
      JustSet ignore(width_);
      r.subst[v] = resolve(b.t, ignore);
    }
    return r;
  }

 private:
  struct Bind {
    TypePtr t;
    JustSet j;
  };

  static void add_residual(std::vector<ResidualAtom>& out, const ClassAtom& a, const JustSet& j, bool missing) {
    for (auto& r : out) {
      if (atom_equal(r.atom, a)) return;
    }
    out.push_back(ResidualAtom{a, j, missing});
  }

  TypePtr walk(TypePtr t, JustSet& j) const {
    while (t->kind == Type::Kind::Var) {
      auto it = subst_.find(t->var);
      if (it == subst_.end()) break;
      j |= it->second.j;
      t = it->second.t;
    }
    return t;
  }

  TypePtr resolve(const TypePtr& t, JustSet& j) const {
    TypePtr w = walk(t, j);
    if (w->args.empty()) return w;
    std::vector<TypePtr> args;
    args.reserve(w->args.size());
    bool changed = false;
    for (const auto& a : w->args) {
      args.push_back(resolve(a, j));
      changed = changed || args.back() != a;
    }
    if (!changed) return w;
    auto n = std::make_shared<Type>(*w);
    n->args = std::move(args);
    return n;
  }

  bool occurs_in(int v, const TypePtr& t, JustSet& j) const {
    JustSet path(width_);
    TypePtr w = walk(t, path);
    if (w->kind == Type::Kind::Var) {
      if (w->var != v) return false;
      j |= path;
      return true;
    }
    for (const auto& a : w->args) {
      if (occurs_in(v, a, path)) {
        j |= path;
        return true;
      }
    }
    return false;
  }

  bool unify(const TypePtr& a0, const TypePtr& b0, const JustSet& j0, Conflict& conflict) {
    std::vector<std::tuple<TypePtr, TypePtr, JustSet>> work;
    work.emplace_back(a0, b0, j0);
    while (!work.empty()) {
      auto [a, b, j] = std::move(work.back());
      work.pop_back();
      a = walk(a, j);
      b = walk(b, j);
      if (a->kind == Type::Kind::Var && b->kind == Type::Kind::Var && a->var == b->var) continue;
      if (a->kind != Type::Kind::Var && b->kind == Type::Kind::Var) std::swap(a, b);
      if (a->kind == Type::Kind::Var) {
        JustSet occ = j;
        if (occurs_in(a->var, b, occ)) {
          conflict.kind = Conflict::Kind::Occurs;
          conflict.just = occ;
          conflict.witness = print_plain(a) + " occurs in " + print_plain(resolve(b, occ));
          return false;
        }
        subst_[a->var] = Bind{b, j};
        continue;
      }
      if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) {
        conflict.kind = Conflict::Kind::Clash;
        conflict.just = j;
        conflict.witness = print_plain(a) + " vs " + print_plain(b);
        return false;
      }
      for (size_t i = a->args.size(); i-- > 0;) work.emplace_back(a->args[i], b->args[i], j);
    }
    return true;
  }

  std::vector<std::pair<ClassAtom, JustSet>> resolve_atoms(const std::vector<std::pair<ClassAtom, JustSet>>& atoms) const {
    std::vector<std::pair<ClassAtom, JustSet>> out;
    out.reserve(atoms.size());
    for (const auto& [a, j0] : atoms) {
      JustSet j = j0;
      ClassAtom r{a.cls, {}};
      for (const auto& t : a.args) r.args.push_back(resolve(t, j));
      out.emplace_back(std::move(r), std::move(j));
    }
    return out;
  }

  // Fires propagation rules until no rule matches a new atom combination.
  bool rules(const std::vector<std::pair<ClassAtom, JustSet>>& atoms, Conflict& conflict) {
    if (env_.rules.empty() || atoms.empty()) return true;
    std::set<std::pair<size_t, std::vector<size_t>>> history;
    const size_t n = cs_.constraints.size();
    bool fired = true;
    while (fired) {
      fired = false;
      auto resolved = resolve_atoms(atoms);
      for (size_t r = 0; r < env_.rules.size() && !fired; ++r) {
        const PropRule& rule = env_.rules[r];
        std::vector<size_t> chosen;
        std::function<bool(std::map<int, TypePtr>&)> search = [&](std::map<int, TypePtr>& binds) -> bool {
          if (chosen.size() == rule.heads.size()) {
            if (history.count({r, chosen})) return false;
            history.insert({r, chosen});
            JustSet j(width_);
            j.set(n + r);
            for (size_t k : chosen) j |= resolved[k].second;
            if (rule.falsity) {
              conflict.kind = Conflict::Kind::Falsity;
              conflict.just = j;
              conflict.witness = rule.id;
              failed_ = true;
              return true;
            }
            for (const auto& [l, rt] : rule.equations) {
              if (!unify(substitute(l, binds), substitute(rt, binds), j, conflict)) {
                failed_ = true;
                return true;
              }
            }
            return true;
          }
          const ClassAtom& head = rule.heads[chosen.size()];
          for (size_t k = 0; k < resolved.size(); ++k) {
            if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
            std::map<int, TypePtr> next = binds;
            if (!match_atom(head, resolved[k].first, next)) continue;
            chosen.push_back(k);
            bool done = search(next);
            chosen.pop_back();
            if (done) return true;
          }
          return false;
        };
        std::map<int, TypePtr> binds;
        fired = search(binds);
        if (failed_) return false;
      }
    }
    return true;
  }

  const ConstraintSet& cs_;
  const Env& env_;
  SolveOptions opts_;
  size_t width_;
  std::unordered_map<int, Bind> subst_;
  bool failed_ = false;
};

}  // namespace

bool entails(const Env& env, const std::vector<ClassAtom>& givens, const ClassAtom& atom, int depth) {
  for (const auto& g : givens) {
    if (atom_equal(g, atom)) return true;
  }
  if (depth <= 0) return false;
  for (const auto& inst : env.instances) {
    std::map<int, TypePtr> binds;
    if (!match_atom(inst.head, atom, binds)) continue;
    bool ok = true;
    for (const auto& c : inst.context) {
      if (!entails(env, givens, substitute(c, binds), depth - 1)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

SolveResult solve(const ConstraintSet& cs, const std::vector<char>& active, const Env& env, SolveOptions options) {
  return Solver(cs, env, options).run(active);
}

bool satisfiable(const ConstraintSet& cs, const std::vector<char>& active, const Env& env, SolveOptions options) {
  return solve(cs, active, env, options).ok;
}

namespace {

// Standard class hierarchy, used to drop atoms implied by another atom on
// the same arguments.
bool implied_by(const std::string& weaker, const std::string& stronger) {
  static const std::map<std::string, std::vector<std::string>> supers = {
      {"Ord", {"Eq"}},           {"Real", {"Num", "Ord"}}, {"Integral", {"Real", "Enum"}},
      {"Fractional", {"Num"}}, {"Floating", {"Fractional"}},
  };
  auto it = supers.find(stronger);
  if (it == supers.end()) return false;
  for (const auto& s : it->second) {
    if (s == weaker || implied_by(weaker, s)) return true;
  }
  return false;
}

bool same_args(const ClassAtom& a, const ClassAtom& b) {
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!type_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

}  // namespace

TypeScheme residual_scheme(const SolveResult& r, const TypePtr& t, bool include_missing, bool all_atoms) {
  TypeScheme s;
  s.body = r.apply(t);
  std::vector<int> vars;
  free_vars(s.body, vars);
  std::set<int> reach(vars.begin(), vars.end());
  std::vector<bool> taken(r.residual.size(), all_atoms);
  bool grew = !all_atoms;
  while (grew) {
    grew = false;
    for (size_t i = 0; i < r.residual.size(); ++i) {
      if (taken[i]) continue;
      const ClassAtom& a = r.residual[i].atom;
      std::vector<int> av;
      for (const auto& x : a.args) free_vars(x, av);
      bool shares = include_missing && r.residual[i].missing && av.empty();
      for (int v : av) shares = shares || reach.count(v);
      if (!shares) continue;
      taken[i] = true;
      grew = true;
      reach.insert(av.begin(), av.end());
    }
  }
  for (size_t i = 0; i < r.residual.size(); ++i) {
    if (!taken[i]) continue;
    const ClassAtom& a = r.residual[i].atom;
    bool redundant = false;
    for (size_t k = 0; k < r.residual.size() && !redundant; ++k) {
      redundant = k != i && taken[k] && same_args(a, r.residual[k].atom) && implied_by(a.cls, r.residual[k].atom.cls);
    }
    if (!redundant) s.context.push_back(a);
  }
  return s;
}

}  // namespace tydb
