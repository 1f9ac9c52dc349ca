#include "tydb/program.hpp"

#include <algorithm>
#include <functional>

#include "tydb/desugar.hpp"

namespace tydb {

using namespace ast;

class Resolver {
 public:
  explicit Resolver(Program& p) : p_(p) {}

  void run() {
    decls(p_.module_.decls, -1);
    frames_.pop_back();
    std::stable_sort(p_.queries_.begin(), p_.queries_.end(),
                     [](const EmbeddedQuery& a, const EmbeddedQuery& b) {
                       return std::pair(a.span.start_line, a.span.start_col) <
                              std::pair(b.span.start_line, b.span.start_col);
                     });
  }

  void top_expression(const Expr& e) {
    frames_.emplace_back();
    for (int b : p_.scopes_[0].bindings) {
      for (int n : p_.bindings_[b].names) frames_.back()[p_.names_[n].name] = Ref{Ref::Kind::Let, n, p_.names_[n].name};
    }
    expr(e);
    frames_.pop_back();
  }

 private:
  [[noreturn]] void fail(const Span& span, const std::string& msg) const {
    throw SourceError(p_.source_.name(), span, msg);
  }

  [[noreturn]] void fail_loc(LocId loc, const std::string& msg) const {
    throw SourceError(p_.locs_[loc].file, p_.locs_[loc].span, msg);
  }

  int owner() const { return stack_.empty() ? -1 : stack_.back(); }

  void pattern_vars(const Pat& p, std::vector<const Pat*>& out) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, PVar>) {
            out.push_back(&p);
          } else if constexpr (std::is_same_v<N, PTuple> || std::is_same_v<N, PList>) {
            for (const auto& e : n.elems) pattern_vars(*e, out);
          } else if constexpr (std::is_same_v<N, PCons>) {
            pattern_vars(*n.head, out);
            pattern_vars(*n.tail, out);
          }
        },
        p.node);
  }

  void bind_params(const std::vector<PatPtr>& params) {
    std::vector<const Pat*> vars;
    for (const auto& p : params) pattern_vars(*p, vars);
    for (const Pat* v : vars) {
      const std::string& name = std::get<PVar>(v->node).name;
      if (frames_.back().count(name)) fail(v->span, "conflicting definitions for '" + name + "'");
      MonoBinder b;
      b.id = static_cast<int>(p_.binders_.size());
      b.name = name;
      b.loc = v->locs.empty() ? -1 : v->locs.front();
      b.owner = owner();
      p_.binders_.push_back(b);
      p_.pat_binders_[v] = b.id;
      frames_.back()[name] = Ref{Ref::Kind::Mono, b.id, name};
    }
  }

  int add_name(const std::string& name, int binding, LocId loc, const Span& span) {
    if (frames_.back().count(name)) fail(span, "duplicate definition of '" + name + "'");
    NameInfo n;
    n.id = static_cast<int>(p_.names_.size());
    n.name = name;
    n.binding = binding;
    n.loc = loc;
    p_.names_.push_back(n);
    p_.bindings_[binding].names.push_back(n.id);
    frames_.back()[name] = Ref{Ref::Kind::Let, n.id, name};
    return n.id;
  }

  // Registers a declaration list as a new scope; its frame stays pushed.
  void decls(const std::vector<Decl>& ds, int parent) {
    int scope = static_cast<int>(p_.scopes_.size());
    p_.scopes_.push_back(Scope{scope, parent, {}});
    frames_.emplace_back();
    for (const auto& d : ds) {
      const bool is_fun = std::holds_alternative<FunDecl>(d.node);
      const bool is_pat = std::holds_alternative<PatDecl>(d.node);
      if (!is_fun && !is_pat) {
        if (parent != -1 && !std::holds_alternative<SigDecl>(d.node) && !std::holds_alternative<QueryDecl>(d.node)) {
          fail(d.span, "class, instance, rule and data declarations are only allowed at the top level");
        }
        continue;
      }
      Binding b;
      b.id = static_cast<int>(p_.bindings_.size());
      b.decl = &d;
      b.parent = parent;
      b.scope = scope;
      b.span = d.span;
      p_.bindings_.push_back(b);
      p_.scopes_[scope].bindings.push_back(b.id);
      if (const auto* f = std::get_if<FunDecl>(&d.node)) {
        add_name(f->name, b.id, f->clauses.front().binder_loc, d.span);
      } else {
        std::vector<const Pat*> vars;
        pattern_vars(*std::get<PatDecl>(d.node).pat, vars);
        for (const Pat* v : vars) {
          int n = add_name(std::get<PVar>(v->node).name, b.id, v->locs.front(), v->span);
          p_.pat_names_[v] = n;
        }
      }
    }
    for (const auto& d : ds) {
      if (const auto* sig = std::get_if<SigDecl>(&d.node)) {
        for (size_t i = 0; i < sig->names.size(); ++i) {
          auto it = frames_.back().find(sig->names[i]);
          if (it == frames_.back().end()) {
            fail_loc(sig->name_locs[i], "type signature for '" + sig->names[i] + "' lacks an accompanying binding");
          }
          NameInfo& n = p_.names_[it->second.id];
          if (n.sig) fail_loc(sig->name_locs[i], "duplicate type signature for '" + sig->names[i] + "'");
          n.sig = sig;
        }
      } else if (const auto* q = std::get_if<QueryDecl>(&d.node)) {
        auto it = frames_.back().find(q->name);
        if (it == frames_.back().end()) fail_loc(q->name_loc, "query of '" + q->name + "', which is not defined here");
        EmbeddedQuery eq;
        eq.kind = q->pattern ? EmbeddedQuery::Kind::Explain : EmbeddedQuery::Kind::Type;
        eq.name = it->second.id;
        eq.pattern = q->pattern ? &*q->pattern : nullptr;
        eq.pattern_text = q->pattern_text;
        eq.span = d.span;
        eq.owner = parent;
        p_.queries_.push_back(eq);
      }
    }
    for (int b : std::vector<int>(p_.scopes_[scope].bindings)) {
      stack_.push_back(b);
      const Decl& d = *p_.bindings_[b].decl;
      if (const auto* f = std::get_if<FunDecl>(&d.node)) {
        for (const auto& c : f->clauses) {
          frames_.emplace_back();
          bind_params(c.params);
          expr(*c.rhs.plain);
          frames_.pop_back();
        }
      } else {
        expr(*std::get<PatDecl>(d.node).rhs.plain);
      }
      stack_.pop_back();
    }
  }

  void lookup(const Expr& e, const EVar& v) {
    if (!v.prelude) {
      for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        auto f = it->find(v.name);
        if (f == it->end()) continue;
        p_.refs_[&e] = f->second;
        if (f->second.kind == Ref::Kind::Let) {
          int target = p_.names_[f->second.id].binding;
          for (int b : stack_) p_.bindings_[b].uses.insert(target);
        }
        return;
      }
    }
    if (p_.env_.globals.count(v.name)) {
      p_.refs_[&e] = Ref{Ref::Kind::Global, -1, v.name};
      return;
    }
    fail(e.span, "unbound identifier '" + v.name + "'");
  }

  void expr(const Expr& e) {
    p_.owners_[&e] = owner();
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, EVar>) {
            lookup(e, n);
          } else if constexpr (std::is_same_v<N, EApp>) {
            expr(*n.fn);
            expr(*n.arg);
          } else if constexpr (std::is_same_v<N, ELam>) {
            frames_.emplace_back();
            bind_params(n.params);
            expr(*n.body);
            frames_.pop_back();
          } else if constexpr (std::is_same_v<N, ELet>) {
            decls(n.decls, owner());
            expr(*n.body);
            frames_.pop_back();
          } else if constexpr (std::is_same_v<N, EIf>) {
            expr(*n.cond);
            expr(*n.then_branch);
            expr(*n.else_branch);
          } else if constexpr (std::is_same_v<N, ETuple> || std::is_same_v<N, EList>) {
            for (const auto& x : n.elems) expr(*x);
          } else if constexpr (std::is_same_v<N, EAnnot>) {
            expr(*n.expr);
          } else if constexpr (std::is_same_v<N, EQuery>) {
            EmbeddedQuery q;
            q.kind = n.pattern ? EmbeddedQuery::Kind::Explain : EmbeddedQuery::Kind::Type;
            q.expr = &e;
            q.pattern = n.pattern ? &*n.pattern : nullptr;
            q.pattern_text = n.pattern_text;
            q.span = e.span;
            q.owner = owner();
            p_.queries_.push_back(q);
            expr(*n.expr);
          } else if constexpr (std::is_same_v<N, ELit>) {
          } else {
            fail(e.span, "internal error: expression was not desugared");
          }
        },
        e.node);
  }

  Program& p_;
  std::vector<std::map<std::string, Ref>> frames_;
  std::vector<int> stack_;
};

std::unique_ptr<Program> Program::load(const std::string& name, const std::string& text, const Env& prelude) {
  auto p = std::make_unique<Program>();
  p->source_ = Source(name, text);
  p->tokens_ = tokenize(name, text, p->locs_);
  p->module_ = parse_program(p->tokens_, name);
  p->env_ = prelude;
  add_declarations(p->env_, p->module_, p->locs_, false);
  desugar(p->module_);
  Resolver(*p).run();
  return p;
}

const Ref* Program::ref(const Expr* e) const {
  auto it = refs_.find(e);
  return it == refs_.end() ? nullptr : &it->second;
}

int Program::binder_of(const Pat* p) const {
  auto it = pat_binders_.find(p);
  return it == pat_binders_.end() ? -1 : it->second;
}

int Program::name_of(const Pat* p) const {
  auto it = pat_names_.find(p);
  return it == pat_names_.end() ? -1 : it->second;
}

int Program::owner_of(const Expr* e) const {
  auto it = owners_.find(e);
  return it == owners_.end() ? -1 : it->second;
}

bool Program::is_ancestor(int ancestor, int binding) const {
  if (binding < 0) return false;
  for (int b = bindings_[binding].parent; b != -1; b = bindings_[b].parent) {
    if (b == ancestor) return true;
  }
  return false;
}

namespace {

std::string suggestions(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  if (names.empty()) return "";
  std::string out = " (in scope:";
  for (const auto& n : names) out += " " + n;
  return out + ")";
}

}  // namespace

Target Program::resolve_reference(const RefPath& path) const {
  if (path.segments.empty()) throw ReferenceError("empty reference");
  const auto* first = std::get_if<std::string>(&path.segments[0]);
  if (!first) throw ReferenceError("a reference must start with a name");
  Target t;
  std::vector<std::string> in_scope;
  for (int b : scopes_[0].bindings) {
    for (int n : bindings_[b].names) {
      in_scope.push_back(names_[n].name);
      if (names_[n].name == *first && t.binding < 0) {
        t.binding = b;
        t.name = n;
      }
    }
  }
  if (t.binding < 0) throw ReferenceError("unknown reference '" + *first + "'" + suggestions(in_scope));
  std::string walked = *first;
  for (size_t i = 1; i < path.segments.size(); ++i) {
    if (t.kind == Target::Kind::Mono) {
      throw ReferenceError("'" + walked + "' is a variable and has no nested definitions");
    }
    if (const int* k = std::get_if<int>(&path.segments[i])) {
      const FunDecl* f = bindings_[t.binding].fun();
      if (i + 1 != path.segments.size()) throw ReferenceError("a clause number must be the last segment");
      if (!f) throw ReferenceError("'" + walked + "' is a pattern binding and has no clauses");
      if (*k < 1 || static_cast<size_t>(*k) > f->clauses.size()) {
        throw ReferenceError("'" + walked + "' has " + std::to_string(f->clauses.size()) + " clause(s), not " +
                             std::to_string(*k));
      }
      t.kind = Target::Kind::Clause;
      t.clause = *k - 1;
      continue;
    }
    const std::string& seg = std::get<std::string>(path.segments[i]);
    std::vector<std::string> nested;
    Target next;
    for (const auto& s : scopes_) {
      if (s.parent_binding != t.binding) continue;
      for (int b : s.bindings) {
        for (int n : bindings_[b].names) {
          nested.push_back(names_[n].name);
          if (names_[n].name == seg && next.binding < 0) {
            next.binding = b;
            next.name = n;
          }
        }
      }
    }
    if (next.binding < 0) {
      for (const auto& mb : binders_) {
        if (mb.owner != t.binding || mb.name.find('#') != std::string::npos) continue;
        nested.push_back(mb.name);
        if (mb.name == seg && next.binder < 0) {
          next.kind = Target::Kind::Mono;
          next.binder = mb.id;
          next.binding = t.binding;
        }
      }
    }
    if (next.binding < 0) {
      throw ReferenceError("unknown reference '" + seg + "' in '" + walked + "'" + suggestions(nested));
    }
    t = next;
    walked += ";" + seg;
  }
  return t;
}

std::string Program::describe(const Target& t) const {
  std::vector<std::string> parts;
  for (int b = t.binding; b != -1; b = bindings_[b].parent) parts.push_back(names_[bindings_[b].names.front()].name);
  std::reverse(parts.begin(), parts.end());
  if (t.kind == Target::Kind::Binding && !parts.empty()) parts.back() = names_[t.name].name;
  std::string out;
  for (const auto& s : parts) out += (out.empty() ? "" : ";") + s;
  if (t.kind == Target::Kind::Clause) out += ";" + std::to_string(t.clause + 1);
  if (t.kind == Target::Kind::Mono) out += ";" + binders_[t.binder].name;
  return out;
}

void Program::resolve_expression(const Expr& e) { Resolver(*this).top_expression(e); }

namespace {

const Expr* find_span(const Expr& e, const Span& span);

const Expr* find_in_decls(const std::vector<Decl>& ds, const Span& span) {
  for (const auto& d : ds) {
    if (const auto* f = std::get_if<FunDecl>(&d.node)) {
      for (const auto& c : f->clauses) {
        if (const Expr* r = find_span(*c.rhs.plain, span)) return r;
      }
    } else if (const auto* p = std::get_if<PatDecl>(&d.node)) {
      if (const Expr* r = find_span(*p->rhs.plain, span)) return r;
    }
  }
  return nullptr;
}

const Expr* find_span(const Expr& e, const Span& span) {
  if (e.span == span) return &e;
  const Expr* found = nullptr;
  auto check = [&](const ExprPtr& x) {
    if (!found && x) found = find_span(*x, span);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, EApp>) {
          check(n.fn);
          check(n.arg);
        } else if constexpr (std::is_same_v<N, ELam> || std::is_same_v<N, EAnnot> || std::is_same_v<N, EQuery>) {
          if constexpr (std::is_same_v<N, ELam>) check(n.body);
          else check(n.expr);
        } else if constexpr (std::is_same_v<N, ELet>) {
          found = find_in_decls(n.decls, span);
          check(n.body);
        } else if constexpr (std::is_same_v<N, EIf>) {
          check(n.cond);
          check(n.then_branch);
          check(n.else_branch);
        } else if constexpr (std::is_same_v<N, ETuple> || std::is_same_v<N, EList>) {
          for (const auto& x : n.elems) check(x);
        }
      },
      e.node);
  return found;
}

}  // namespace

const Expr* Program::expression_at(const Span& span) const { return find_in_decls(module_.decls, span); }

Groups Program::groups(const std::set<int>& declared_names) const {
  Groups g;
  g.group_of.assign(bindings_.size(), -1);
  auto declared = [&](int b) {
    for (int n : bindings_[b].names) {
      if (!declared_names.count(n)) return false;
    }
    return true;
  };
  for (const auto& s : scopes_) {
    // Tarjan's algorithm; components come out dependencies first.
    std::map<int, int> index, low;
    std::vector<int> stack;
    std::set<int> on_stack;
    int counter = 0;
    std::vector<int>& order = g.scope_order[s.id];
    std::set<int> members(s.bindings.begin(), s.bindings.end());
    std::function<void(int)> visit = [&](int v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (int w : bindings_[v].uses) {
        if (!members.count(w) || declared(w)) continue;
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        int id = static_cast<int>(g.members.size());
        for (int b : comp) g.group_of[b] = id;
        g.members.push_back(std::move(comp));
        order.push_back(id);
      }
    };
    for (int b : s.bindings) {
      if (!index.count(b)) visit(b);
    }
  }
  return g;
}

}  // namespace tydb
