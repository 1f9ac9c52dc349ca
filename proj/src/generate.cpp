#include "tydb/generate.hpp"

#include <algorithm>

#include "tydb/solver.hpp"

namespace tydb {

using namespace ast;

namespace {

void constraint_vars(const Constraint& c, std::vector<int>& out) {
  if (c.kind == Constraint::Kind::Eq) {
    free_vars(c.lhs, out);
    free_vars(c.rhs, out);
  } else {
    for (const auto& a : c.atom.args) free_vars(a, out);
  }
}

Constraint rename(const Constraint& c, const std::map<int, TypePtr>& s) {
  Constraint r = c;
  if (c.kind == Constraint::Kind::Eq) {
    r.lhs = substitute(c.lhs, s);
    r.rhs = substitute(c.rhs, s);
  } else {
    r.atom = substitute(c.atom, s);
  }
  return r;
}

std::vector<LocId> sorted(std::vector<LocId> locs) {
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  return locs;
}

}  // namespace

TypeScheme skolemize(const TypeScheme& scheme) {
  std::vector<int> vars;
  free_vars(scheme, vars);
  std::map<int, TypePtr> s;
  for (size_t i = 0; i < vars.size(); ++i) {
    std::string name = i < 26 ? std::string(1, static_cast<char>('a' + i)) : "t" + std::to_string(i);
    s[vars[i]] = trigid(name);
  }
  TypeScheme out;
  out.body = substitute(scheme.body, s);
  for (const auto& a : scheme.context) out.context.push_back(substitute(a, s));
  return out;
}

std::map<int, Declared> source_signatures(const Program& program) {
  std::map<int, Declared> out;
  for (const auto& n : program.names()) {
    if (!n.sig) continue;
    TypeConversion conv;
    Declared d;
    d.scheme = convert_scheme(n.sig->type, conv, program.env(), program.locs());
    d.locs = n.sig->type.locs;
    out[n.id] = std::move(d);
  }
  return out;
}

struct Generator::Impl {
  const Program& p;
  Mode mode;
  const std::map<int, Declared>& declared;
  Groups groups;
  std::map<const Decl*, int> decl_binding;

  int next = 0;
  std::map<int, int> binder_vars, name_vars;
  std::map<int, std::vector<Constraint>> closed;
  std::map<int, std::optional<SolveResult>> summaries;
  std::map<const Expr*, TypePtr> node_types;
  std::vector<int> open;
  std::vector<int> stack;  // bindings whose bodies are being generated
  std::vector<Constraint>* out = nullptr;

  Impl(const Program& prog, Mode m, const std::map<int, Declared>& d) : p(prog), mode(m), declared(d) {
    std::set<int> names;
    for (const auto& [n, _] : declared) names.insert(n);
    groups = p.groups(names);
    for (const auto& b : p.bindings()) decl_binding[b.decl] = b.id;
  }

  TypePtr fresh() { return tvar(next++); }

  TypePtr binder_var(int b) {
    auto it = binder_vars.find(b);
    if (it != binder_vars.end()) return tvar(it->second);
    binder_vars[b] = next;
    return fresh();
  }

  TypePtr name_var(int n) {
    auto it = name_vars.find(n);
    if (it != name_vars.end()) return tvar(it->second);
    name_vars[n] = next;
    return fresh();
  }

  void eq(TypePtr a, TypePtr b, const std::vector<LocId>& locs, int binder_group = -1) {
    Constraint c = eq_constraint(std::move(a), std::move(b), locs);
    c.binder_group = binder_group;
    out->push_back(std::move(c));
  }

  void cls(ClassAtom a, const std::vector<LocId>& locs) { out->push_back(class_constraint(std::move(a), locs)); }

  TypePtr instantiate(const TypeScheme& s, const std::vector<LocId>& locs) {
    std::vector<int> vars;
    free_vars(s, vars);
    std::map<int, TypePtr> sub;
    for (int v : vars) sub[v] = fresh();
    TypePtr u = fresh();
    eq(u, substitute(s.body, sub), locs);
    for (const auto& a : s.context) cls(substitute(a, sub), locs);
    return u;
  }

  TypePtr literal(const Literal& lit, const std::vector<LocId>& locs) {
    TypePtr t = fresh();
    switch (lit.kind) {
      case Literal::Kind::Integer:
        cls(ClassAtom{"Num", {t}}, locs);
        break;
      case Literal::Kind::Fractional:
        cls(ClassAtom{"Fractional", {t}}, locs);
        break;
      case Literal::Kind::Char:
        eq(t, tcon("Char"), locs);
        break;
      case Literal::Kind::String:
        eq(t, tlist(tcon("Char")), locs);
        break;
    }
    return t;
  }

  TypePtr pattern(const Pat& pat, int group) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, PVar>) {
            TypePtr t = fresh();
            if (int b = p.binder_of(&pat); b >= 0) {
              eq(t, binder_var(b), pat.locs);
            } else if (int nm = p.name_of(&pat); nm >= 0) {
              eq(t, name_var(nm), pat.locs, group);
            }
            return t;
          } else if constexpr (std::is_same_v<N, PWild>) {
            return fresh();
          } else if constexpr (std::is_same_v<N, PLit>) {
            return literal(n.lit, pat.locs);
          } else if constexpr (std::is_same_v<N, PTuple>) {
            std::vector<TypePtr> ts;
            for (const auto& e : n.elems) ts.push_back(pattern(*e, group));
            TypePtr t = fresh();
            eq(t, ttuple(std::move(ts)), pat.locs);
            return t;
          } else if constexpr (std::is_same_v<N, PList>) {
            TypePtr a = fresh();
            for (const auto& e : n.elems) eq(pattern(*e, group), a, pat.locs);
            TypePtr t = fresh();
            eq(t, tlist(a), pat.locs);
            return t;
          } else if constexpr (std::is_same_v<N, PCons>) {
            TypePtr h = pattern(*n.head, group);
            TypePtr tl = pattern(*n.tail, group);
            TypePtr t = fresh();
            eq(t, tlist(h), pat.locs);
            eq(tl, tlist(h), pat.locs);
            return t;
          } else {
            TypePtr t = fresh();
            eq(t, tunit(), pat.locs);
            return t;
          }
        },
        pat.node);
  }

  bool is_open(int group) const { return std::find(open.begin(), open.end(), group) != open.end(); }

  // Monomorphic variables of a group: binders owned by enclosing bindings
  // and the names of the enclosing bindings' groups.
  std::set<int> env_vars(int group) {
    std::set<int> ancestors;
    for (int a = p.bindings()[groups.members[group].front()].parent; a != -1; a = p.bindings()[a].parent) {
      ancestors.insert(a);
    }
    std::set<int> out_vars;
    for (const auto& [b, v] : binder_vars) {
      if (ancestors.count(p.binders()[b].owner)) out_vars.insert(v);
    }
    for (int a : ancestors) {
      for (int m : groups.members[groups.group_of[a]]) {
        for (int n : p.bindings()[m].names) {
          auto it = name_vars.find(n);
          if (it != name_vars.end()) out_vars.insert(it->second);
        }
      }
    }
    return out_vars;
  }

  const std::vector<Constraint>& group_constraints(int g) {
    auto it = closed.find(g);
    if (it != closed.end()) return it->second;
    std::vector<Constraint> buf;
    std::vector<Constraint>* saved = out;
    out = &buf;
    open.push_back(g);
    for (int b : groups.members[g]) binding(b, g);
    open.pop_back();
    default_numeric(g);
    out = saved;
    return closed[g] = std::move(buf);
  }

  void binding(int b, int g) {
    stack.push_back(b);
    const Binding& bd = p.bindings()[b];
    if (const FunDecl* f = bd.fun()) {
      TypePtr tf = name_var(bd.names.front());
      for (const auto& c : f->clauses) clause(c, tf, g);
    } else {
      const PatDecl* pd = bd.pat();
      TypePtr tp = pattern(*pd->pat, g);
      TypePtr tr = expr(*pd->rhs.plain);
      eq(tp, tr, {pd->eq_loc}, g);
    }
    stack.pop_back();
  }

  void clause(const Clause& c, const TypePtr& tf, int g) {
    std::vector<TypePtr> ps;
    for (const auto& prm : c.params) ps.push_back(pattern(*prm, g));
    TypePtr r = expr(*c.rhs.plain);
    eq(tf, tfun(std::move(ps), r), {c.binder_loc}, g);
  }

  // Top-level argument-less bindings with a numeric residue are defaulted,
  // as the monomorphism restriction would.
  void default_numeric(int g) {
    const auto& members = groups.members[g];
    const Binding& first = p.bindings()[members.front()];
    if (first.parent != -1) return;
    for (int b : members) {
      const Binding& bd = p.bindings()[b];
      const FunDecl* f = bd.fun();
      if (!f || bd.names.size() != 1 || declared.count(bd.names.front())) continue;
      if (std::any_of(f->clauses.begin(), f->clauses.end(), [](const Clause& c) { return !c.params.empty(); })) continue;
      ConstraintSet cs;
      cs.constraints = *out;
      SolveResult r = solve(cs, {}, p.env(), SolveOptions{true});
      if (!r.ok) return;
      TypePtr t = r.apply(name_var(bd.names.front()));
      if (!t->is_var()) continue;
      bool numeric = false, fractional = false;
      for (const auto& ra : r.residual) {
        if (ra.atom.args.size() != 1 || !ra.atom.args[0]->is_var() || ra.atom.args[0]->var != t->var) continue;
        if (is_numeric_class(ra.atom.cls)) numeric = true;
        if (ra.atom.cls == "Fractional" || ra.atom.cls == "Floating" || ra.atom.cls == "RealFrac" ||
            ra.atom.cls == "RealFloat") {
          fractional = true;
        }
      }
      if (!numeric) continue;
      eq(name_var(bd.names.front()), tcon(fractional ? "Double" : "Integer"), {f->clauses.front().binder_loc}, g);
    }
  }

  const std::optional<SolveResult>& summary(int g) {
    auto it = summaries.find(g);
    if (it != summaries.end()) return it->second;
    ConstraintSet cs;
    cs.constraints = closed.at(g);
    SolveResult r = solve(cs, {}, p.env(), SolveOptions{true});
    if (r.ok) return summaries[g] = std::move(r);
    return summaries[g] = std::nullopt;
  }

  TypePtr let_use(const Expr& e, int n) {
    const NameInfo& name = p.names()[n];
    int h = name.binding;
    int g = groups.group_of[h];
    if (auto d = declared.find(n); d != declared.end()) return instantiate(d->second.scheme, e.locs);
    if (is_open(g)) {
      TypePtr u = fresh();
      eq(u, name_var(n), e.locs);
      return u;
    }
    if (!stack.empty() && (stack.back() == h || p.is_ancestor(h, stack.back()))) return fresh();
    group_constraints(g);
    std::set<int> env = env_vars(g);
    if (mode == Mode::Global) return inline_group(g, n, env, e.locs);
    return summarize_group(g, n, env, e.locs);
  }

  TypePtr inline_group(int g, int n, const std::set<int>& env, const std::vector<LocId>& locs) {
    const auto& cs = closed.at(g);
    std::vector<int> vars;
    for (const auto& c : cs) constraint_vars(c, vars);
    std::map<int, TypePtr> sub;
    for (int v : vars) {
      if (!env.count(v)) sub[v] = fresh();
    }
    for (const auto& c : cs) {
      Constraint r = rename(c, sub);
      if (c.binder_group == g) r.locs = sorted(locs);
      r.binder_group = -1;
      out->push_back(std::move(r));
    }
    return substitute(name_var(n), sub);
  }

  TypePtr summarize_group(int g, int n, const std::set<int>& env, const std::vector<LocId>& locs) {
    const auto& sol = summary(g);
    if (!sol) return fresh();
    std::vector<std::pair<TypePtr, TypePtr>> eqs;
    std::set<int> keep(env.begin(), env.end());
    std::vector<int> present;
    for (const auto& c : closed.at(g)) constraint_vars(c, present);
    for (int v : present) {
      if (!env.count(v)) continue;
      TypePtr t = sol->apply(tvar(v));
      std::vector<int> fv;
      free_vars(t, fv);
      keep.insert(fv.begin(), fv.end());
      if (!(t->is_var() && t->var == v)) eqs.emplace_back(tvar(v), t);
    }
    TypePtr body = sol->apply(name_var(n));
    std::vector<int> reach;
    free_vars(body, reach);
    for (const auto& [v, t] : eqs) {
      free_vars(v, reach);
      free_vars(t, reach);
    }
    std::set<int> reached(reach.begin(), reach.end());
    std::vector<ClassAtom> atoms;
    std::vector<bool> taken(sol->residual.size(), false);
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t i = 0; i < sol->residual.size(); ++i) {
        if (taken[i]) continue;
        std::vector<int> av;
        for (const auto& a : sol->residual[i].atom.args) free_vars(a, av);
        bool hit = av.empty() && sol->residual[i].missing;
        for (int v : av) hit = hit || reached.count(v);
        if (!hit) continue;
        taken[i] = true;
        grew = true;
        reached.insert(av.begin(), av.end());
      }
    }
    for (size_t i = 0; i < sol->residual.size(); ++i) {
      if (taken[i]) atoms.push_back(sol->residual[i].atom);
    }
    std::map<int, TypePtr> sub;
    for (int v : reached) {
      if (!keep.count(v)) sub[v] = fresh();
    }
    for (const auto& [v, t] : eqs) eq(v, substitute(t, sub), locs);
    for (const auto& a : atoms) cls(substitute(a, sub), locs);
    TypePtr u = fresh();
    eq(u, substitute(body, sub), locs);
    return u;
  }

  void let_scope(const ELet& let) {
    int scope = -1;
    for (const auto& d : let.decls) {
      auto it = decl_binding.find(&d);
      if (it != decl_binding.end()) {
        scope = p.bindings()[it->second].scope;
        break;
      }
    }
    if (scope < 0) return;
    auto order = groups.scope_order.find(scope);
    if (order == groups.scope_order.end()) return;
    for (int g : order->second) {
      const auto& cs = group_constraints(g);
      out->insert(out->end(), cs.begin(), cs.end());
    }
  }

  TypePtr expr(const Expr& e) {
    TypePtr t = expr_inner(e);
    node_types[&e] = t;
    return t;
  }

  TypePtr expr_inner(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, EVar>) {
            const Ref* ref = p.ref(&e);
            if (!ref) throw SourceError(p.source().name(), e.span, "unbound identifier '" + n.name + "'");
            switch (ref->kind) {
              case Ref::Kind::Mono: {
                if (e.locs.empty()) return binder_var(ref->id);
                TypePtr u = fresh();
                std::vector<LocId> locs = e.locs;
                if (LocId b = p.binders()[ref->id].loc; b >= 0 && std::find(locs.begin(), locs.end(), b) == locs.end()) {
                  locs.push_back(b);
                }
                eq(u, binder_var(ref->id), std::move(locs));
                return u;
              }
              case Ref::Kind::Let:
                return let_use(e, ref->id);
              case Ref::Kind::Global:
                return instantiate(p.env().globals.at(ref->name), e.locs);
            }
            return fresh();
          } else if constexpr (std::is_same_v<N, ELit>) {
            return literal(n.lit, e.locs);
          } else if constexpr (std::is_same_v<N, EApp>) {
            std::vector<const Expr*> spine;
            const Expr* head = &e;
            while (const auto* a = std::get_if<EApp>(&head->node)) {
              spine.push_back(head);
              head = a->fn.get();
            }
            std::reverse(spine.begin(), spine.end());
            TypePtr cur = expr(*head);
            std::vector<LocId> locs = head->locs.empty() ? e.locs : head->locs;
            for (const Expr* app : spine) {
              TypePtr ta = expr(*std::get<EApp>(app->node).arg);
              TypePtr r = fresh();
              eq(cur, tfun(ta, r), locs);
              if (app != &e) node_types[app] = r;
              cur = r;
            }
            return cur;
          } else if constexpr (std::is_same_v<N, ELam>) {
            std::vector<TypePtr> ps;
            for (const auto& prm : n.params) ps.push_back(pattern(*prm, -1));
            TypePtr body = expr(*n.body);
            TypePtr t = fresh();
            eq(t, tfun(std::move(ps), body), e.locs);
            return t;
          } else if constexpr (std::is_same_v<N, ELet>) {
            let_scope(n);
            return expr(*n.body);
          } else if constexpr (std::is_same_v<N, EIf>) {
            TypePtr c = expr(*n.cond);
            eq(c, tcon("Bool"), e.locs);
            TypePtr a = expr(*n.then_branch);
            TypePtr b = expr(*n.else_branch);
            TypePtr t = fresh();
            eq(t, a, {n.then_loc});
            eq(t, b, {n.else_loc});
            return t;
          } else if constexpr (std::is_same_v<N, ETuple>) {
            std::vector<TypePtr> ts;
            for (const auto& x : n.elems) ts.push_back(expr(*x));
            TypePtr t = fresh();
            eq(t, ttuple(std::move(ts)), e.locs);
            return t;
          } else if constexpr (std::is_same_v<N, EList>) {
            TypePtr a = fresh();
            for (const auto& x : n.elems) eq(expr(*x), a, e.locs);
            TypePtr t = fresh();
            eq(t, tlist(a), e.locs);
            return t;
          } else if constexpr (std::is_same_v<N, EAnnot>) {
            TypeConversion conv;
            conv.next_var = next;
            TypeScheme s = convert_scheme(n.type, conv, p.env(), p.locs());
            next = conv.next_var;
            TypePtr t = expr(*n.expr);
            eq(t, s.body, e.locs);
            for (const auto& a : s.context) cls(a, e.locs);
            return t;
          } else if constexpr (std::is_same_v<N, EQuery>) {
            return expr(*n.expr);
          } else {
            throw SourceError(p.source().name(), e.span, "internal error: expression was not desugared");
          }
        },
        e.node);
  }

  Generated finish(TypePtr result, std::vector<Constraint> cs) {
    Generated g;
    g.cs.constraints = std::move(cs);
    g.cs.result = std::move(result);
    return g;
  }
};

Generator::Generator(const Program& program, Mode mode, const std::map<int, Declared>& declared)
    : impl_(std::make_unique<Impl>(program, mode, declared)) {}

Generator::~Generator() = default;

Generated Generator::target(const Target& t) {
  Impl& m = *impl_;
  int g = m.groups.group_of[t.binding];
  if (t.kind == Target::Kind::Clause) {
    std::vector<Constraint> buf;
    m.out = &buf;
    const Binding& bd = m.p.bindings()[t.binding];
    TypePtr tf = m.name_var(bd.names.front());
    m.open.push_back(g);
    m.stack.push_back(t.binding);
    m.clause(bd.fun()->clauses[static_cast<size_t>(t.clause)], tf, g);
    m.stack.pop_back();
    m.open.pop_back();
    m.out = nullptr;
    return m.finish(tf, std::move(buf));
  }
  std::vector<Constraint> cs = m.group_constraints(g);
  if (t.kind == Target::Kind::Mono) return m.finish(m.binder_var(t.binder), std::move(cs));
  TypePtr tn = m.name_var(t.name);
  Generated out = m.finish(tn, std::move(cs));
  if (auto d = m.declared.find(t.name); d != m.declared.end()) {
    TypeScheme sk = skolemize(d->second.scheme);
    out.cs.constraints.push_back(eq_constraint(tn, sk.body, d->second.locs));
    out.cs.givens = sk.context;
    out.declared = d->second.scheme;
  }
  return out;
}

Generated Generator::expression(const Expr& e) {
  Impl& m = *impl_;
  std::vector<Constraint> buf;
  m.out = &buf;
  TypePtr t = m.expr(e);
  m.out = nullptr;
  return m.finish(t, std::move(buf));
}

Generated Generator::node(const Expr& e) {
  Impl& m = *impl_;
  int owner = m.p.owner_of(&e);
  if (owner < 0) return expression(e);
  std::vector<Constraint> cs = m.group_constraints(m.groups.group_of[owner]);
  auto it = m.node_types.find(&e);
  TypePtr t = it == m.node_types.end() ? m.fresh() : it->second;
  return m.finish(t, std::move(cs));
}

}  // namespace tydb
