#include "tydb/desugar.hpp"

#include <string>

namespace tydb {

using namespace ast;

namespace {

int fresh_counter = 0;

ExprPtr node(Expr::Node n, std::vector<LocId> locs, Span span) {
  auto e = std::make_unique<Expr>();
  e->node = std::move(n);
  e->locs = std::move(locs);
  e->span = span;
  return e;
}

ExprPtr prelude_var(const std::string& name, std::vector<LocId> locs, Span span) {
  return node(EVar{name, true}, std::move(locs), span);
}

ExprPtr app(ExprPtr f, ExprPtr a, Span span) { return node(EApp{std::move(f), std::move(a)}, {}, span); }

std::vector<LocId> concat(std::vector<LocId> a, const std::vector<LocId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void desugar_decls(std::vector<Decl>& ds);

ExprPtr desugar_comp(Expr& comp, size_t i) {
  auto& c = std::get<EComp>(comp.node);
  if (i == c.quals.size()) {
    desugar(c.head);
    EList list;
    list.elems.push_back(std::move(c.head));
    return node(std::move(list), comp.locs, comp.span);
  }
  Qualifier& q = c.quals[i];
  ExprPtr rest = desugar_comp(comp, i + 1);
  switch (q.kind) {
    case Qualifier::Kind::Generator: {
      desugar(q.expr);
      ELam lam;
      lam.params.push_back(std::move(q.pat));
      lam.body = std::move(rest);
      ExprPtr fn = node(std::move(lam), {q.loc}, comp.span);
      ExprPtr cm = prelude_var("concatMap", {q.loc}, comp.span);
      return app(app(std::move(cm), std::move(fn), comp.span), std::move(q.expr), comp.span);
    }
    case Qualifier::Kind::Guard: {
      desugar(q.expr);
      EIf ifn;
      ifn.cond = std::move(q.expr);
      ifn.then_branch = std::move(rest);
      ifn.else_branch = node(EList{}, {q.loc}, comp.span);
      ifn.then_loc = q.loc;
      ifn.else_loc = q.loc;
      return node(std::move(ifn), {q.loc}, comp.span);
    }
    case Qualifier::Kind::Let: {
      desugar_decls(q.decls);
      ELet let;
      let.decls = std::move(q.decls);
      let.body = std::move(rest);
      return node(std::move(let), {q.loc}, comp.span);
    }
  }
  return rest;
}

ExprPtr desugar_rhs(Rhs& rhs, Span span) {
  ExprPtr body;
  if (rhs.plain) {
    body = std::move(rhs.plain);
    desugar(body);
  } else {
    // Guards nest right to left; falling off the last guard is undefined.
    body = prelude_var("undefined", {rhs.guarded.back().bar_loc}, span);
    for (auto it = rhs.guarded.rbegin(); it != rhs.guarded.rend(); ++it) {
      desugar(it->guard);
      desugar(it->body);
      EIf ifn;
      ifn.cond = std::move(it->guard);
      ifn.then_branch = std::move(it->body);
      ifn.else_branch = std::move(body);
      ifn.then_loc = it->bar_loc;
      ifn.else_loc = it->bar_loc;
      body = node(std::move(ifn), {it->bar_loc}, span);
    }
    rhs.guarded.clear();
  }
  if (!rhs.where.empty()) {
    desugar_decls(rhs.where);
    ELet let;
    let.decls = std::move(rhs.where);
    let.body = std::move(body);
    body = node(std::move(let), {rhs.where_loc}, span);
    rhs.where.clear();
  }
  return body;
}

void desugar_decls(std::vector<Decl>& ds) {
  for (auto& d : ds) {
    if (auto* f = std::get_if<FunDecl>(&d.node)) {
      for (auto& c : f->clauses) c.rhs.plain = desugar_rhs(c.rhs, c.span);
    } else if (auto* p = std::get_if<PatDecl>(&d.node)) {
      p->rhs.plain = desugar_rhs(p->rhs, p->span);
    }
  }
}

}  // namespace

void desugar(ExprPtr& e) {
  Expr& x = *e;
  if (auto* a = std::get_if<EApp>(&x.node)) {
    desugar(a->fn);
    desugar(a->arg);
  } else if (auto* o = std::get_if<EOp>(&x.node)) {
    desugar(o->lhs);
    desugar(o->rhs);
    Span inner = merge_spans(o->lhs->span, o->op->span);
    e = app(app(std::move(o->op), std::move(o->lhs), inner), std::move(o->rhs), x.span);
  } else if (auto* n = std::get_if<ENeg>(&x.node)) {
    desugar(n->expr);
    e = app(prelude_var("negate", x.locs, x.span), std::move(n->expr), x.span);
  } else if (auto* l = std::get_if<ELam>(&x.node)) {
    desugar(l->body);
  } else if (auto* l = std::get_if<ELet>(&x.node)) {
    desugar_decls(l->decls);
    desugar(l->body);
  } else if (auto* i = std::get_if<EIf>(&x.node)) {
    desugar(i->cond);
    desugar(i->then_branch);
    desugar(i->else_branch);
  } else if (auto* t = std::get_if<ETuple>(&x.node)) {
    for (auto& el : t->elems) desugar(el);
  } else if (auto* t = std::get_if<EList>(&x.node)) {
    for (auto& el : t->elems) desugar(el);
  } else if (auto* a = std::get_if<EAnnot>(&x.node)) {
    desugar(a->expr);
  } else if (auto* q = std::get_if<EQuery>(&x.node)) {
    desugar(q->expr);
  } else if (auto* s = std::get_if<ESection>(&x.node)) {
    auto& op = std::get<EVar>(s->op->node);
    ExprPtr opvar = node(EVar{op.name, op.prelude}, concat(x.locs, s->op->locs), s->op->span);
    if (s->left) {
      desugar(s->left);
      e = app(std::move(opvar), std::move(s->left), x.span);
    } else if (s->right) {
      desugar(s->right);
      std::string name = "sec#" + std::to_string(++fresh_counter);
      auto param = std::make_unique<Pat>();
      param->node = PVar{name};
      param->locs = x.locs;
      param->span = x.span;
      ExprPtr ref = node(EVar{name}, {}, x.span);
      ELam lam;
      lam.params.push_back(std::move(param));
      lam.body = app(app(std::move(opvar), std::move(ref), x.span), std::move(s->right), x.span);
      e = node(std::move(lam), x.locs, x.span);
    } else {
      e = std::move(opvar);
    }
  } else if (auto* en = std::get_if<EEnum>(&x.node)) {
    desugar(en->from);
    if (en->then) desugar(en->then);
    if (en->to) desugar(en->to);
    std::vector<LocId> locs = x.locs;
    locs.push_back(en->dots_loc);
    std::string fn = en->then ? (en->to ? "enumFromThenTo" : "enumFromThen") : (en->to ? "enumFromTo" : "enumFrom");
    ExprPtr r = app(prelude_var(fn, locs, x.span), std::move(en->from), x.span);
    if (en->then) r = app(std::move(r), std::move(en->then), x.span);
    if (en->to) r = app(std::move(r), std::move(en->to), x.span);
    e = std::move(r);
  } else if (std::holds_alternative<EComp>(x.node)) {
    e = desugar_comp(x, 0);
  }
}

void desugar(Module& m) { desugar_decls(m.decls); }

}  // namespace tydb
