#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "tydb/parser.hpp"
#include "tydb/solver.hpp"

#ifndef TYDB_FIXTURES
#error "TYDB_FIXTURES must name the fixture directory"
#endif

namespace oracle {

using namespace tydb;

std::string fixture_path(const std::string& name) { return std::string(TYDB_FIXTURES) + "/" + name; }

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Env& prelude() {
  static const Env env = load_prelude(default_prelude_text());
  return env;
}

std::unique_ptr<Session> open_session(const std::string& name) {
  return std::make_unique<Session>(name, read_fixture(name), prelude());
}

ConstraintSet constraints_for(const Program& p, Mode mode, const std::string& ref) {
  auto path = parse_refpath(ref);
  if (!path) throw std::runtime_error("bad reference " + ref);
  Target t = p.resolve_reference(*path);
  Generator g(p, mode, source_signatures(p));
  return g.target(t).cs;
}

std::set<LocId> tokens_on_line(const Program& p, int line, const std::vector<std::string>& texts) {
  std::set<LocId> out;
  std::map<std::string, int> seen;
  for (const auto& want : texts) ++seen[want];
  std::map<std::string, int> found;
  for (const auto& t : p.tokens()) {
    if (t.kind == TokKind::End || t.span.start_line != line) continue;
    if (!seen.count(t.text)) continue;
    out.insert(t.loc);
    ++found[t.text];
  }
  for (const auto& [text, n] : seen) {
    if (!found.count(text)) throw std::runtime_error("no token '" + text + "' on line " + std::to_string(line));
  }
  return out;
}

std::set<LocId> tokens_of_lines(const Program& p, int first, int last) {
  std::set<LocId> out;
  for (const auto& t : p.tokens()) {
    if (t.kind != TokKind::End && t.span.start_line >= first && t.span.start_line <= last) out.insert(t.loc);
  }
  return out;
}

std::string describe_locs(const Program& p, const std::set<LocId>& locs) {
  std::map<LocId, std::string> text;
  for (const auto& t : p.tokens()) text[t.loc] = t.text;
  std::string out = "{";
  for (LocId l : locs) {
    const Loc& loc = p.locs()[l];
    if (out.size() > 1) out += ", ";
    out += std::to_string(loc.span.start_line) + ":" + std::to_string(loc.span.start_col);
    auto it = text.find(l);
    out += " " + (it == text.end() ? std::string("?") : it->second);
    if (loc.file != p.source().name()) out += " @" + loc.file;
  }
  return out + "}";
}

// ---- subsets

namespace {

std::vector<char> subset_mask(size_t n, const std::vector<int>& subset) {
  std::vector<char> m(n, 0);
  for (int i : subset) m[static_cast<size_t>(i)] = 1;
  return m;
}

std::vector<int> members(const std::vector<char>& m) {
  std::vector<int> out;
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

bool is_mus(const ConstraintSet& cs, const Env& env, const std::vector<int>& subset) {
  const size_t n = cs.constraints.size();
  std::vector<char> m = subset_mask(n, subset);
  if (satisfiable(cs, m, env)) return false;
  for (int i : subset) {
    m[i] = 0;
    bool ok = satisfiable(cs, m, env);
    m[i] = 1;
    if (!ok) return false;
  }
  return true;
}

std::vector<std::vector<int>> muses_by_subsets(const ConstraintSet& cs, const Env& env) {
  const size_t n = cs.constraints.size();
  if (n > 16) throw std::runtime_error("too many constraints for subset enumeration");
  const size_t total = size_t{1} << n;
  std::vector<char> sat(total, 0);
  for (size_t bits = 0; bits < total; ++bits) {
    std::vector<char> m(n, 0);
    for (size_t i = 0; i < n; ++i) m[i] = (bits >> i) & 1;
    sat[bits] = satisfiable(cs, m, env);
  }
  std::vector<std::vector<int>> out;
  for (size_t bits = 0; bits < total; ++bits) {
    if (sat[bits]) continue;
    bool minimal = true;
    for (size_t i = 0; i < n && minimal; ++i) {
      if ((bits >> i) & 1) minimal = sat[bits & ~(size_t{1} << i)];
    }
    if (!minimal) continue;
    std::vector<int> s;
    for (size_t i = 0; i < n; ++i) {
      if ((bits >> i) & 1) s.push_back(static_cast<int>(i));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<int>> muses_by_tree(const ConstraintSet& cs, const Env& env, size_t limit) {
  const size_t n = cs.constraints.size();
  std::set<std::vector<char>> visited;
  std::set<std::vector<int>> found;
  std::function<void(const std::vector<char>&)> explore = [&](const std::vector<char>& s) {
    if (!visited.insert(s).second) return;
    if (visited.size() > limit) throw std::runtime_error("MUS enumeration limit exceeded");
    if (satisfiable(cs, s, env)) return;
    std::vector<int> mus;
    for (const auto& known : found) {
      if (std::all_of(known.begin(), known.end(), [&](int i) { return s[i]; })) {
        mus = known;
        break;
      }
    }
    if (mus.empty()) {
      std::vector<char> m = s;
      for (size_t i = 0; i < n; ++i) {
        if (!m[i]) continue;
        m[i] = 0;
        if (satisfiable(cs, m, env)) m[i] = 1;
      }
      mus = members(m);
      found.insert(mus);
    }
    for (int c : mus) {
      std::vector<char> next = s;
      next[c] = 0;
      explore(next);
    }
  };
  explore(std::vector<char>(n, 1));
  return {found.begin(), found.end()};
}

std::vector<int> common_by_removal(const ConstraintSet& cs, const Env& env) {
  std::vector<int> out;
  std::vector<char> m(cs.constraints.size(), 1);
  for (size_t i = 0; i < m.size(); ++i) {
    m[i] = 0;
    if (satisfiable(cs, m, env)) out.push_back(static_cast<int>(i));
    m[i] = 1;
  }
  return out;
}

std::vector<std::vector<int>> sample_muses(const ConstraintSet& cs, const Env& env, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<int> order(cs.constraints.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::set<std::vector<int>> found;
  for (int k = 0; k < count; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> m(order.size(), 1);
    for (int i : order) {
      m[i] = 0;
      if (satisfiable(cs, m, env)) m[i] = 1;
    }
    found.insert(members(m));
  }
  return {found.begin(), found.end()};
}

std::vector<int> intersection(const std::vector<std::vector<int>>& sets) {
  if (sets.empty()) return {};
  std::vector<int> acc = sets.front();
  for (const auto& s : sets) {
    std::vector<int> next;
    std::set_intersection(acc.begin(), acc.end(), s.begin(), s.end(), std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

// ---- permutation oracle

namespace {

class RefUnifier {
 public:
  TypePtr prune(TypePtr t) const {
    while (t->is_var()) {
      auto it = s_.find(t->var);
      if (it == s_.end()) break;
      t = it->second;
    }
    return t;
  }

  TypePtr zonk(const TypePtr& t) const {
    TypePtr w = prune(t);
    if (w->args.empty()) return w;
    auto n = std::make_shared<Type>(*w);
    for (auto& a : n->args) a = zonk(a);
    return n;
  }

  bool occurs(int v, const TypePtr& t) const {
    TypePtr w = prune(t);
    if (w->is_var()) return w->var == v;
    return std::any_of(w->args.begin(), w->args.end(), [&](const TypePtr& a) { return occurs(v, a); });
  }

  bool unify(const TypePtr& a0, const TypePtr& b0) {
    TypePtr a = prune(a0), b = prune(b0);
    if (a->is_var() && b->is_var() && a->var == b->var) return true;
    if (a->is_var()) {
      if (occurs(a->var, b)) return false;
      s_[a->var] = b;
      return true;
    }
    if (b->is_var()) return unify(b, a);
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i) {
      if (!unify(a->args[i], b->args[i])) return false;
    }
    return true;
  }

 private:
  std::map<int, TypePtr> s_;
};

bool match_type(const TypePtr& pat, const TypePtr& subj, std::map<int, TypePtr>& binds) {
  if (pat->is_var()) {
    auto it = binds.find(pat->var);
    if (it != binds.end()) return type_equal(it->second, subj);
    binds[pat->var] = subj;
    return true;
  }
  if (pat->kind != subj->kind || pat->name != subj->name || pat->args.size() != subj->args.size()) return false;
  for (size_t i = 0; i < pat->args.size(); ++i) {
    if (!match_type(pat->args[i], subj->args[i], binds)) return false;
  }
  return true;
}

bool match_class(const ClassAtom& pat, const ClassAtom& subj, std::map<int, TypePtr>& binds) {
  if (pat.cls != subj.cls || pat.args.size() != subj.args.size()) return false;
  for (size_t i = 0; i < pat.args.size(); ++i) {
    if (!match_type(pat.args[i], subj.args[i], binds)) return false;
  }
  return true;
}

bool ground(const ClassAtom& a) {
  return std::all_of(a.args.begin(), a.args.end(), [](const TypePtr& t) { return is_ground(t); });
}

bool instance_holds(const Env& env, const ClassAtom& a, int depth) {
  if (depth < 0) return false;
  for (const auto& inst : env.instances) {
    std::map<int, TypePtr> binds;
    if (!match_class(inst.head, a, binds)) continue;
    bool all = true;
    for (const auto& c : inst.context) {
      ClassAtom sub = substitute(c, binds);
      if (!ground(sub) || !instance_holds(env, sub, depth - 1)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

bool reference_satisfiable(const ConstraintSet& cs, const Env& env, const std::vector<int>& eq_order) {
  RefUnifier u;
  for (int i : eq_order) {
    const Constraint& c = cs.constraints[i];
    if (c.kind != Constraint::Kind::Eq) continue;
    if (!u.unify(c.lhs, c.rhs)) return false;
  }
  std::vector<ClassAtom> atoms;
  for (const auto& c : cs.constraints) {
    if (c.kind == Constraint::Kind::Class) atoms.push_back(c.atom);
  }
  auto current = [&] {
    std::vector<ClassAtom> out;
    for (const auto& a : atoms) {
      ClassAtom z{a.cls, {}};
      for (const auto& t : a.args) z.args.push_back(u.zonk(t));
      out.push_back(std::move(z));
    }
    return out;
  };
  std::set<std::pair<size_t, std::vector<size_t>>> fired;
  bool again = true;
  while (again) {
    again = false;
    std::vector<ClassAtom> now = current();
    for (size_t r = 0; r < env.rules.size() && !again; ++r) {
      const PropRule& rule = env.rules[r];
      std::vector<size_t> pick(rule.heads.size(), 0);
      // Odometer over ordered tuples of atom indices.
      const size_t k = rule.heads.size();
      if (now.size() < k) continue;
      std::function<bool(size_t, std::map<int, TypePtr>)> go = [&](size_t h, std::map<int, TypePtr> binds) -> bool {
        if (h == k) {
          if (!fired.insert({r, pick}).second) return false;
          if (rule.falsity) throw false;
          for (const auto& [l, rt] : rule.equations) {
            if (!u.unify(substitute(l, binds), substitute(rt, binds))) throw false;
          }
          return true;
        }
        for (size_t i = 0; i < now.size(); ++i) {
          if (std::find(pick.begin(), pick.begin() + static_cast<long>(h), i) != pick.begin() + static_cast<long>(h)) {
            continue;
          }
          std::map<int, TypePtr> next = binds;
          if (!match_class(rule.heads[h], now[i], next)) continue;
          pick[h] = i;
          if (go(h + 1, next)) return true;
        }
        return false;
      };
      try {
        again = go(0, {});
      } catch (bool) {
        return false;
      }
    }
  }
  for (const auto& a : current()) {
    if (ground(a) && !instance_holds(env, a, 8)) return false;
  }
  return true;
}

// ---- random constraint sets

namespace {
const char* const kCons[] = {"Int", "Bool", "Integer", "Double", "Char"};
const char* const kClasses[] = {"Num", "Eq", "Ord", "Fractional", "Integral", "Show", "Collect"};
}  // namespace

TypePtr RandomSets::type(int depth) {
  std::uniform_int_distribution<int> pick(0, 99);
  int r = pick(rng);
  if (depth <= 0 || r < 40) return tvar(std::uniform_int_distribution<int>(0, 4)(rng));
  if (r < 65) return tcon(kCons[std::uniform_int_distribution<int>(0, 4)(rng)]);
  if (r < 80) return tlist(type(depth - 1));
  if (r < 92) return tfun(type(depth - 1), type(depth - 1));
  return ttuple({type(depth - 1), type(depth - 1)});
}

ConstraintSet RandomSets::make(size_t max_constraints) {
  ConstraintSet cs;
  size_t n = std::uniform_int_distribution<size_t>(1, max_constraints)(rng);
  std::uniform_int_distribution<int> pick(0, 99);
  for (size_t i = 0; i < n; ++i) {
    int r = pick(rng);
    std::vector<LocId> locs{static_cast<LocId>(i)};
    if (r < 55) {
      cs.constraints.push_back(eq_constraint(tvar(std::uniform_int_distribution<int>(0, 4)(rng)), type(2), locs));
    } else if (r < 70) {
      cs.constraints.push_back(eq_constraint(type(2), type(2), locs));
    } else {
      std::string cls = kClasses[std::uniform_int_distribution<int>(0, 6)(rng)];
      ClassAtom a{cls, {}};
      if (cls == "Collect") {
        a.args = {type(1), tvar(std::uniform_int_distribution<int>(0, 4)(rng))};
      } else {
        a.args = {pick(rng) < 70 ? tvar(std::uniform_int_distribution<int>(0, 4)(rng)) : type(1)};
      }
      cs.constraints.push_back(class_constraint(std::move(a), locs));
    }
  }
  cs.result = tvar(0);
  return cs;
}

const Env& rules_env() {
  static const Env env = [] {
    Env e = prelude();
    e.classes["Collect"] = 2;
    PropRule no{"Integral a, Fractional a ==> False", {{"Integral", {tvar(900)}}, {"Fractional", {tvar(900)}}}, {}, true};
    PropRule fd{"Collect a b, Collect a' b ==> a = a'",
                {{"Collect", {tvar(901), tvar(902)}}, {"Collect", {tvar(903), tvar(902)}}},
                {{tvar(901), tvar(903)}},
                false};
    e.rules.push_back(no);
    e.rules.push_back(fd);
    return e;
  }();
  return env;
}

// ---- algorithm W

namespace {

struct WFailure {};

class W {
 public:
  explicit W(const Program& p) : p_(p), env_(p.env()) {}

  WResult run() {
    Scope top;
    infer_decls(p_.module().decls, top, true);
    return std::move(result_);
  }

 private:
  struct Scheme {
    std::set<int> vars;
    std::vector<ClassAtom> ctx;
    TypePtr body;
  };
  using Scope = std::map<std::string, Scheme>;

  TypePtr fresh() { return tvar(next_++); }

  TypePtr prune(TypePtr t) const {
    while (t->is_var()) {
      auto it = s_.find(t->var);
      if (it == s_.end()) break;
      t = it->second;
    }
    return t;
  }

  TypePtr zonk(const TypePtr& t) const {
    TypePtr w = prune(t);
    if (w->args.empty()) return w;
    auto n = std::make_shared<Type>(*w);
    for (auto& a : n->args) a = zonk(a);
    return n;
  }

  ClassAtom zonk(const ClassAtom& a) const {
    ClassAtom out{a.cls, {}};
    for (const auto& t : a.args) out.args.push_back(zonk(t));
    return out;
  }

  bool occurs(int v, const TypePtr& t) const {
    TypePtr w = prune(t);
    if (w->is_var()) return w->var == v;
    return std::any_of(w->args.begin(), w->args.end(), [&](const TypePtr& a) { return occurs(v, a); });
  }

  void unify(const TypePtr& a0, const TypePtr& b0) {
    TypePtr a = prune(a0), b = prune(b0);
    if (a->is_var() && b->is_var() && a->var == b->var) return;
    if (a->is_var()) {
      if (occurs(a->var, b)) throw WFailure{};
      s_[a->var] = b;
      return;
    }
    if (b->is_var()) return unify(b, a);
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) throw WFailure{};
    for (size_t i = 0; i < a->args.size(); ++i) unify(a->args[i], b->args[i]);
  }

  static void vars_of(const TypePtr& t, std::set<int>& out) {
    std::vector<int> v;
    free_vars(t, v);
    out.insert(v.begin(), v.end());
  }

  TypePtr instantiate(const Scheme& sc) {
    std::map<int, TypePtr> ren;
    for (int v : sc.vars) ren[v] = fresh();
    for (const auto& a : sc.ctx) preds_.push_back(substitute(a, ren));
    return substitute(sc.body, ren);
  }

  TypePtr instantiate(const TypeScheme& ts) {
    std::vector<int> vs;
    free_vars(ts, vs);
    return instantiate(Scheme{{vs.begin(), vs.end()}, ts.context, ts.body});
  }

  TypePtr literal(const ast::Literal& lit) {
    using K = ast::Literal::Kind;
    switch (lit.kind) {
      case K::Integer: {
        TypePtr a = fresh();
        preds_.push_back({"Num", {a}});
        return a;
      }
      case K::Fractional: {
        TypePtr a = fresh();
        preds_.push_back({"Fractional", {a}});
        return a;
      }
      case K::Char:
        return tcon("Char");
      case K::String:
        return tlist(tcon("Char"));
    }
    return fresh();
  }

  TypePtr pat(const ast::Pat& p, Scope& sc) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ast::PVar>) {
            TypePtr t = fresh();
            sc[n.name] = Scheme{{}, {}, t};
            return t;
          } else if constexpr (std::is_same_v<N, ast::PWild>) {
            return fresh();
          } else if constexpr (std::is_same_v<N, ast::PLit>) {
            return literal(n.lit);
          } else if constexpr (std::is_same_v<N, ast::PTuple>) {
            std::vector<TypePtr> ts;
            for (const auto& e : n.elems) ts.push_back(pat(*e, sc));
            return ttuple(std::move(ts));
          } else if constexpr (std::is_same_v<N, ast::PList>) {
            TypePtr a = fresh();
            for (const auto& e : n.elems) unify(pat(*e, sc), a);
            return tlist(a);
          } else if constexpr (std::is_same_v<N, ast::PCons>) {
            TypePtr h = pat(*n.head, sc);
            TypePtr tl = pat(*n.tail, sc);
            unify(tl, tlist(h));
            return tl;
          } else {
            return tunit();
          }
        },
        p.node);
  }

  TypePtr infer(const ast::Expr& e, const Scope& sc) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ast::EVar>) {
            if (!n.prelude) {
              auto it = sc.find(n.name);
              if (it != sc.end()) return instantiate(it->second);
            }
            auto g = env_.globals.find(n.name);
            if (g == env_.globals.end()) throw std::runtime_error("oracle: unbound " + n.name);
            return instantiate(g->second);
          } else if constexpr (std::is_same_v<N, ast::ELit>) {
            return literal(n.lit);
          } else if constexpr (std::is_same_v<N, ast::EApp>) {
            TypePtr f = infer(*n.fn, sc);
            TypePtr a = infer(*n.arg, sc);
            TypePtr r = fresh();
            unify(f, tfun(a, r));
            return r;
          } else if constexpr (std::is_same_v<N, ast::ELam>) {
            Scope inner = sc;
            std::vector<TypePtr> ps;
            for (const auto& prm : n.params) ps.push_back(pat(*prm, inner));
            return tfun(ps, infer(*n.body, inner));
          } else if constexpr (std::is_same_v<N, ast::ELet>) {
            Scope inner = sc;
            infer_decls(n.decls, inner, false);
            return infer(*n.body, inner);
          } else if constexpr (std::is_same_v<N, ast::EIf>) {
            unify(infer(*n.cond, sc), tcon("Bool"));
            TypePtr t = infer(*n.then_branch, sc);
            unify(t, infer(*n.else_branch, sc));
            return t;
          } else if constexpr (std::is_same_v<N, ast::ETuple>) {
            std::vector<TypePtr> ts;
            for (const auto& x : n.elems) ts.push_back(infer(*x, sc));
            return ttuple(std::move(ts));
          } else if constexpr (std::is_same_v<N, ast::EList>) {
            TypePtr a = fresh();
            for (const auto& x : n.elems) unify(infer(*x, sc), a);
            return tlist(a);
          } else if constexpr (std::is_same_v<N, ast::EAnnot>) {
            TypePtr t = infer(*n.expr, sc);
            TypeConversion conv;
            conv.next_var = next_;
            TypeScheme ts = convert_scheme(n.type, conv, env_, p_.locs());
            next_ = conv.next_var;
            unify(t, ts.body);
            for (const auto& a : ts.context) preds_.push_back(a);
            return t;
          } else if constexpr (std::is_same_v<N, ast::EQuery>) {
            return infer(*n.expr, sc);
          } else {
            throw std::runtime_error("oracle: expression was not desugared");
          }
        },
        e.node);
  }

  static void pat_names(const ast::Pat& p, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ast::PVar>) {
            out.push_back(n.name);
          } else if constexpr (std::is_same_v<N, ast::PTuple> || std::is_same_v<N, ast::PList>) {
            for (const auto& e : n.elems) pat_names(*e, out);
          } else if constexpr (std::is_same_v<N, ast::PCons>) {
            pat_names(*n.head, out);
            pat_names(*n.tail, out);
          }
        },
        p.node);
  }

  static void decl_names(const ast::Decl& d, std::vector<std::string>& out) {
    if (const auto* f = std::get_if<ast::FunDecl>(&d.node)) out.push_back(f->name);
    if (const auto* pd = std::get_if<ast::PatDecl>(&d.node)) pat_names(*pd->pat, out);
  }

  // Free variable names of an expression, minus `bound`.
  static void free_names(const ast::Expr& e, std::set<std::string> bound, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ast::EVar>) {
            if (!n.prelude && !bound.count(n.name)) out.insert(n.name);
          } else if constexpr (std::is_same_v<N, ast::EApp>) {
            free_names(*n.fn, bound, out);
            free_names(*n.arg, bound, out);
          } else if constexpr (std::is_same_v<N, ast::ELam>) {
            std::vector<std::string> names;
            for (const auto& prm : n.params) pat_names(*prm, names);
            bound.insert(names.begin(), names.end());
            free_names(*n.body, bound, out);
          } else if constexpr (std::is_same_v<N, ast::ELet>) {
            std::vector<std::string> names;
            for (const auto& d : n.decls) decl_names(d, names);
            bound.insert(names.begin(), names.end());
            for (const auto& d : n.decls) free_in_decl(d, bound, out);
            free_names(*n.body, bound, out);
          } else if constexpr (std::is_same_v<N, ast::EIf>) {
            free_names(*n.cond, bound, out);
            free_names(*n.then_branch, bound, out);
            free_names(*n.else_branch, bound, out);
          } else if constexpr (std::is_same_v<N, ast::ETuple> || std::is_same_v<N, ast::EList>) {
            for (const auto& x : n.elems) free_names(*x, bound, out);
          } else if constexpr (std::is_same_v<N, ast::EAnnot> || std::is_same_v<N, ast::EQuery>) {
            free_names(*n.expr, bound, out);
          }
        },
        e.node);
  }

  static void free_in_decl(const ast::Decl& d, const std::set<std::string>& bound, std::set<std::string>& out) {
    if (const auto* f = std::get_if<ast::FunDecl>(&d.node)) {
      for (const auto& c : f->clauses) {
        std::set<std::string> b = bound;
        std::vector<std::string> names;
        for (const auto& prm : c.params) pat_names(*prm, names);
        b.insert(names.begin(), names.end());
        free_names(*c.rhs.plain, b, out);
      }
    } else if (const auto* pd = std::get_if<ast::PatDecl>(&d.node)) {
      free_names(*pd->rhs.plain, bound, out);
    }
  }

  static bool numeric(const std::string& cls) {
    static const std::set<std::string> s = {"Num", "Real", "Integral", "Fractional", "Floating", "RealFrac", "RealFloat"};
    return s.count(cls) > 0;
  }

  static bool fractional(const std::string& cls) {
    return cls == "Fractional" || cls == "Floating" || cls == "RealFrac" || cls == "RealFloat";
  }

  static bool superclass_of(const std::string& weak, const std::string& strong) {
    static const std::map<std::string, std::set<std::string>> direct = {
        {"Ord", {"Eq"}}, {"Real", {"Num", "Ord"}}, {"Integral", {"Real", "Enum"}},
        {"Fractional", {"Num"}}, {"Floating", {"Fractional"}},
    };
    auto it = direct.find(strong);
    if (it == direct.end()) return false;
    for (const auto& s : it->second) {
      if (s == weak || superclass_of(weak, s)) return true;
    }
    return false;
  }

  static bool same_args(const ClassAtom& a, const ClassAtom& b) {
    if (a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (!type_equal(a.args[i], b.args[i])) return false;
    }
    return true;
  }

  static std::vector<ClassAtom> simplify(const std::vector<ClassAtom>& in) {
    std::vector<ClassAtom> uniq;
    for (const auto& a : in) {
      if (std::none_of(uniq.begin(), uniq.end(), [&](const ClassAtom& b) { return atom_equal(a, b); })) {
        uniq.push_back(a);
      }
    }
    std::vector<ClassAtom> out;
    for (const auto& a : uniq) {
      bool implied = std::any_of(uniq.begin(), uniq.end(),
                                 [&](const ClassAtom& b) { return same_args(a, b) && superclass_of(a.cls, b.cls); });
      if (!implied) out.push_back(a);
    }
    return out;
  }

  std::set<int> scope_vars(const Scope& sc) const {
    std::set<int> out;
    for (const auto& [name, s] : sc) {
      std::set<int> vs;
      vars_of(zonk(s.body), vs);
      for (const auto& a : s.ctx) {
        for (const auto& t : a.args) vars_of(zonk(t), vs);
      }
      for (int v : vs) {
        if (!s.vars.count(v)) out.insert(v);
      }
    }
    return out;
  }

  void infer_decls(const std::vector<ast::Decl>& decls, Scope& scope, bool top) {
    std::vector<const ast::Decl*> binds;
    std::map<std::string, size_t> owner;
    std::vector<std::vector<std::string>> names;
    for (const auto& d : decls) {
      std::vector<std::string> ns;
      decl_names(d, ns);
      if (ns.empty() && !std::holds_alternative<ast::PatDecl>(d.node)) continue;
      for (const auto& n : ns) owner[n] = binds.size();
      binds.push_back(&d);
      names.push_back(ns);
    }
    const size_t n = binds.size();
    std::vector<std::set<size_t>> deps(n);
    for (size_t i = 0; i < n; ++i) {
      std::set<std::string> fv;
      free_in_decl(*binds[i], {}, fv);
      for (const auto& name : fv) {
        auto it = owner.find(name);
        if (it != owner.end()) deps[i].insert(it->second);
      }
    }
    // Tarjan; components come out dependencies first.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<size_t> stack;
    std::vector<std::vector<size_t>> comps;
    int counter = 0;
    std::function<void(size_t)> strong = [&](size_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on[v] = 1;
      for (size_t w : deps[v]) {
        if (index[w] < 0) {
          strong(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<size_t> comp;
        size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(comp);
      }
    };
    for (size_t i = 0; i < n; ++i) {
      if (index[i] < 0) strong(i);
    }
    for (const auto& comp : comps) infer_group(comp, binds, names, scope, top);
  }

  void infer_group(const std::vector<size_t>& comp, const std::vector<const ast::Decl*>& binds,
                   const std::vector<std::vector<std::string>>& names, Scope& scope, bool top) {
    const size_t mark = preds_.size();
    const auto saved = s_;
    Scope inner = scope;
    std::map<std::string, TypePtr> monos;
    for (size_t b : comp) {
      for (const auto& nm : names[b]) {
        monos[nm] = fresh();
        inner[nm] = Scheme{{}, {}, monos[nm]};
      }
    }
    try {
      for (size_t b : comp) {
        if (const auto* f = std::get_if<ast::FunDecl>(&binds[b]->node)) {
          for (const auto& c : f->clauses) {
            Scope cs = inner;
            std::vector<TypePtr> ps;
            for (const auto& prm : c.params) ps.push_back(pat(*prm, cs));
            TypePtr body = infer(*c.rhs.plain, cs);
            unify(monos[f->name], ps.empty() ? body : tfun(ps, body));
          }
        } else if (const auto* pd = std::get_if<ast::PatDecl>(&binds[b]->node)) {
          Scope tmp;
          TypePtr tp = pat(*pd->pat, tmp);
          for (const auto& [nm, s] : tmp) unify(s.body, monos[nm]);
          unify(tp, infer(*pd->rhs.plain, inner));
        }
      }
    } catch (const WFailure&) {
      s_ = saved;
      preds_.resize(mark);
      for (const auto& [nm, t] : monos) {
        Scheme any{{t->var}, {}, t};
        scope[nm] = any;
        if (top) result_.failed.insert(nm);
      }
      return;
    }

    std::set<int> env_vars = scope_vars(scope);
    auto split = [&](std::set<int>& gen, std::vector<ClassAtom>& kept, std::vector<ClassAtom>& deferred) {
      gen.clear();
      kept.clear();
      deferred.clear();
      for (const auto& [nm, t] : monos) vars_of(zonk(t), gen);
      for (int v : env_vars) gen.erase(v);
      for (size_t i = mark; i < preds_.size(); ++i) {
        ClassAtom a = zonk(preds_[i]);
        std::set<int> vs;
        for (const auto& t : a.args) vars_of(t, vs);
        if (vs.empty()) continue;
        bool mine = std::any_of(vs.begin(), vs.end(), [&](int v) { return gen.count(v) > 0; });
        (mine ? kept : deferred).push_back(a);
      }
    };
    std::set<int> gen;
    std::vector<ClassAtom> kept, deferred;
    split(gen, kept, deferred);

    bool plain_binding = top && comp.size() == 1;
    if (plain_binding) {
      const auto* f = std::get_if<ast::FunDecl>(&binds[comp[0]]->node);
      plain_binding = f && std::all_of(f->clauses.begin(), f->clauses.end(),
                                       [](const ast::Clause& c) { return c.params.empty(); });
    }
    if (plain_binding) {
      TypePtr body = zonk(monos.begin()->second);
      if (body->is_var()) {
        bool num = false, frac = false;
        for (const auto& a : kept) {
          if (a.args.size() == 1 && a.args[0]->is_var() && a.args[0]->var == body->var) {
            num = num || numeric(a.cls);
            frac = frac || fractional(a.cls);
          }
        }
        if (num) {
          unify(body, tcon(frac ? "Double" : "Integer"));
          split(gen, kept, deferred);
        }
      }
    }

    preds_.resize(mark);
    preds_.insert(preds_.end(), deferred.begin(), deferred.end());

    for (const auto& [nm, t] : monos) {
      TypePtr body = zonk(t);
      std::set<int> reach;
      vars_of(body, reach);
      std::vector<ClassAtom> ctx;
      std::vector<char> used(kept.size(), 0);
      bool grew = true;
      while (grew) {
        grew = false;
        for (size_t i = 0; i < kept.size(); ++i) {
          if (used[i]) continue;
          std::set<int> vs;
          for (const auto& a : kept[i].args) vars_of(a, vs);
          if (std::any_of(vs.begin(), vs.end(), [&](int v) { return reach.count(v) > 0; })) {
            used[i] = 1;
            ctx.push_back(kept[i]);
            reach.insert(vs.begin(), vs.end());
            grew = true;
          }
        }
      }
      ctx = simplify(ctx);
      scope[nm] = Scheme{gen, ctx, body};
      if (top) result_.schemes[nm] = TypeScheme{ctx, body};
    }
  }

  const Program& p_;
  const Env& env_;
  int next_ = 1000000;
  std::map<int, TypePtr> s_;
  std::vector<ClassAtom> preds_;
  WResult result_;
};

}  // namespace

WResult infer_w(const Program& p) { return W(p).run(); }

}  // namespace oracle
