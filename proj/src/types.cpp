#include "tydb/types.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tydb {

TypePtr tvar(int id) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Var;
  t->var = id;
  return t;
}

TypePtr tcon(std::string name, std::vector<TypePtr> args) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Con;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

TypePtr trigid(std::string name) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Rigid;
  t->name = std::move(name);
  return t;
}

TypePtr tfun(TypePtr from, TypePtr to) { return tcon("->", {std::move(from), std::move(to)}); }

TypePtr tfun(std::vector<TypePtr> params, TypePtr result) {
  TypePtr t = std::move(result);
  for (auto it = params.rbegin(); it != params.rend(); ++it) t = tfun(*it, t);
  return t;
}

TypePtr tlist(TypePtr elem) { return tcon("[]", {std::move(elem)}); }

std::string tuple_con(size_t width) { return "(" + std::string(width > 0 ? width - 1 : 0, ',') + ")"; }

bool is_tuple_con(std::string_view name) {
  return name.size() >= 3 && name.front() == '(' && name.back() == ')' &&
         std::all_of(name.begin() + 1, name.end() - 1, [](char c) { return c == ','; });
}

TypePtr ttuple(std::vector<TypePtr> elems) {
  std::string n = tuple_con(elems.size());
  return tcon(std::move(n), std::move(elems));
}

TypePtr tunit() { return tcon("()"); }

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Var:
      return a->var == b->var;
    case Type::Kind::Rigid:
      return a->name == b->name;
    case Type::Kind::Con:
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i) {
        if (!type_equal(a->args[i], b->args[i])) return false;
      }
      return true;
  }
  return false;
}

bool is_ground(const TypePtr& t) {
  if (t->is_var()) return false;
  return std::all_of(t->args.begin(), t->args.end(), [](const TypePtr& a) { return is_ground(a); });
}

void free_vars(const TypePtr& t, std::vector<int>& out) {
  if (t->is_var()) {
    if (std::find(out.begin(), out.end(), t->var) == out.end()) out.push_back(t->var);
    return;
  }
  for (const auto& a : t->args) free_vars(a, out);
}

bool occurs(int var, const TypePtr& t) {
  if (t->is_var()) return t->var == var;
  return std::any_of(t->args.begin(), t->args.end(), [var](const TypePtr& a) { return occurs(var, a); });
}

TypePtr substitute(const TypePtr& t, const std::map<int, TypePtr>& s) {
  if (t->is_var()) {
    auto it = s.find(t->var);
    return it == s.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  std::vector<TypePtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, s));
    changed = changed || args.back().get() != a.get();
  }
  return changed ? tcon(t->name, std::move(args)) : t;
}

bool atom_equal(const ClassAtom& a, const ClassAtom& b) {
  if (a.cls != b.cls || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!type_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

ClassAtom substitute(const ClassAtom& a, const std::map<int, TypePtr>& s) {
  ClassAtom r{a.cls, {}};
  for (const auto& t : a.args) r.args.push_back(substitute(t, s));
  return r;
}

void free_vars(const TypeScheme& s, std::vector<int>& out) {
  if (s.body) free_vars(s.body, out);
  for (const auto& a : s.context) {
    for (const auto& t : a.args) free_vars(t, out);
  }
}

namespace {

enum class Prec { Top, FunArg, ConArg };

void print_into(std::ostringstream& os, const TypePtr& t, const std::map<int, std::string>& names, Prec prec) {
  switch (t->kind) {
    case Type::Kind::Var: {
      auto it = names.find(t->var);
      if (it != names.end()) os << it->second;
      else os << "t" << t->var;
      return;
    }
    case Type::Kind::Rigid:
      os << t->name;
      return;
    case Type::Kind::Con:
      break;
  }
  if (t->name == "->" && t->args.size() == 2) {
    bool paren = prec != Prec::Top;
    if (paren) os << "(";
    print_into(os, t->args[0], names, Prec::FunArg);
    os << " -> ";
    print_into(os, t->args[1], names, Prec::Top);
    if (paren) os << ")";
    return;
  }
  if (t->name == "[]" && t->args.size() == 1) {
    os << "[";
    print_into(os, t->args[0], names, Prec::Top);
    os << "]";
    return;
  }
  if (is_tuple_con(t->name)) {
    os << "(";
    for (size_t i = 0; i < t->args.size(); ++i) {
      if (i) os << ", ";
      print_into(os, t->args[i], names, Prec::Top);
    }
    os << ")";
    return;
  }
  if (t->args.empty()) {
    os << t->name;
    return;
  }
  bool paren = prec == Prec::ConArg;
  if (paren) os << "(";
  os << t->name;
  for (const auto& a : t->args) {
    os << " ";
    print_into(os, a, names, Prec::ConArg);
  }
  if (paren) os << ")";
}

bool is_compound(const TypePtr& t) { return t->kind == Type::Kind::Con && (!t->args.empty() || t->name == "()"); }

std::string var_name(size_t index) {
  std::string base(1, static_cast<char>('a' + index % 26));
  if (index >= 26) base += std::to_string(index / 26);
  return base;
}

}  // namespace

std::string print_type(const TypePtr& t, const std::map<int, std::string>& names) {
  std::ostringstream os;
  print_into(os, t, names, Prec::Top);
  return os.str();
}

std::string print_atom(const ClassAtom& a, const std::map<int, std::string>& names) {
  std::ostringstream os;
  os << a.cls;
  for (const auto& t : a.args) {
    os << " ";
    print_into(os, t, names, Prec::ConArg);
  }
  return os.str();
}

namespace {

struct Canonical {
  std::map<int, std::string> names;
  std::map<int, TypePtr> renaming;
  std::vector<ClassAtom> context;
};

Canonical canonical_form(const TypeScheme& s) {
  Canonical c;
  std::vector<int> order;
  if (s.body) free_vars(s.body, order);
  // Context atoms ordered by class first so ambiguous variables get stable names.
  std::vector<const ClassAtom*> atoms;
  for (const auto& a : s.context) atoms.push_back(&a);
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const ClassAtom* x, const ClassAtom* y) { return x->cls < y->cls; });
  for (const ClassAtom* a : atoms) {
    for (const auto& t : a->args) free_vars(t, order);
  }
  for (size_t i = 0; i < order.size(); ++i) {
    c.names[order[i]] = var_name(i);
    c.renaming[order[i]] = tvar(static_cast<int>(i));
  }
  std::vector<std::pair<std::tuple<std::string, int, std::string>, ClassAtom>> keyed;
  for (const auto& a : s.context) {
    int compound = std::any_of(a.args.begin(), a.args.end(), is_compound) ? 1 : 0;
    keyed.push_back({{a.cls, compound, print_atom(a, c.names)}, a});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [key, atom] : keyed) {
    if (!c.context.empty() && atom_equal(c.context.back(), atom)) continue;
    c.context.push_back(atom);
  }
  return c;
}

}  // namespace

std::string pretty_type(const TypeScheme& s) {
  Canonical c = canonical_form(s);
  std::ostringstream os;
  if (c.context.size() == 1) {
    os << print_atom(c.context[0], c.names) << " => ";
  } else if (c.context.size() > 1) {
    os << "(";
    for (size_t i = 0; i < c.context.size(); ++i) {
      if (i) os << ", ";
      os << print_atom(c.context[i], c.names);
    }
    os << ") => ";
  }
  if (s.body) os << print_type(s.body, c.names);
  return os.str();
}

TypeScheme canonicalize(const TypeScheme& s) {
  Canonical c = canonical_form(s);
  TypeScheme r;
  r.body = s.body ? substitute(s.body, c.renaming) : nullptr;
  for (const auto& a : c.context) r.context.push_back(substitute(a, c.renaming));
  return r;
}

namespace {

using Bijection = std::pair<std::map<int, int>, std::map<int, int>>;

bool alpha_types(const TypePtr& a, const TypePtr& b, Bijection& bij) {
  if (a->kind != b->kind) return false;
  if (a->is_var()) {
    auto fa = bij.first.find(a->var);
    auto fb = bij.second.find(b->var);
    if (fa == bij.first.end() && fb == bij.second.end()) {
      bij.first[a->var] = b->var;
      bij.second[b->var] = a->var;
      return true;
    }
    return fa != bij.first.end() && fb != bij.second.end() && fa->second == b->var && fb->second == a->var;
  }
  if (a->name != b->name || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!alpha_types(a->args[i], b->args[i], bij)) return false;
  }
  return true;
}

bool alpha_context(const std::vector<ClassAtom>& xs, const std::vector<ClassAtom>& ys, size_t i,
                   std::vector<bool>& used, Bijection& bij) {
  if (i == xs.size()) return true;
  for (size_t j = 0; j < ys.size(); ++j) {
    if (used[j] || xs[i].cls != ys[j].cls || xs[i].args.size() != ys[j].args.size()) continue;
    Bijection saved = bij;
    bool ok = true;
    for (size_t k = 0; ok && k < xs[i].args.size(); ++k) ok = alpha_types(xs[i].args[k], ys[j].args[k], bij);
    if (ok) {
      used[j] = true;
      if (alpha_context(xs, ys, i + 1, used, bij)) return true;
      used[j] = false;
    }
    bij = std::move(saved);
  }
  return false;
}

std::vector<ClassAtom> dedup(const std::vector<ClassAtom>& atoms) {
  std::vector<ClassAtom> out;
  for (const auto& a : atoms) {
    if (std::none_of(out.begin(), out.end(), [&](const ClassAtom& b) { return atom_equal(a, b); })) {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

bool alpha_equal(const TypeScheme& a, const TypeScheme& b) {
  Bijection bij;
  if (!a.body || !b.body) return !a.body && !b.body;
  if (!alpha_types(a.body, b.body, bij)) return false;
  auto ca = dedup(a.context), cb = dedup(b.context);
  if (ca.size() != cb.size()) return false;
  std::vector<bool> used(cb.size(), false);
  return alpha_context(ca, cb, 0, used, bij);
}

namespace {

bool match_type(const TypePtr& p, const TypePtr& s, std::map<int, TypePtr>& b) {
  if (p->is_var()) {
    auto it = b.find(p->var);
    if (it == b.end()) {
      b[p->var] = s;
      return true;
    }
    return type_equal(it->second, s);
  }
  if (p->kind != s->kind || p->name != s->name || p->args.size() != s->args.size()) return false;
  for (size_t i = 0; i < p->args.size(); ++i) {
    if (!match_type(p->args[i], s->args[i], b)) return false;
  }
  return true;
}

bool match_context(const std::vector<ClassAtom>& ps, const std::vector<ClassAtom>& ss, size_t i,
                   std::vector<bool>& used, std::map<int, TypePtr>& b) {
  if (i == ps.size()) return true;
  for (size_t j = 0; j < ss.size(); ++j) {
    if (used[j] || ps[i].cls != ss[j].cls || ps[i].args.size() != ss[j].args.size()) continue;
    auto saved = b;
    bool ok = true;
    for (size_t k = 0; ok && k < ps[i].args.size(); ++k) ok = match_type(ps[i].args[k], ss[j].args[k], b);
    if (ok) {
      used[j] = true;
      if (match_context(ps, ss, i + 1, used, b)) return true;
      used[j] = false;
    }
    b = std::move(saved);
  }
  return false;
}

}  // namespace

std::optional<PatternMatch> match_pattern_type(const SchemePattern& pattern, const TypeScheme& subject) {
  PatternMatch m;
  if (pattern.scheme.body && subject.body && !match_type(pattern.scheme.body, subject.body, m.bindings)) {
    return std::nullopt;
  }
  auto subject_ctx = dedup(subject.context);
  std::vector<bool> used(subject_ctx.size(), false);
  if (!match_context(pattern.scheme.context, subject_ctx, 0, used, m.bindings)) return std::nullopt;
  return m;
}

TypeConstructors::TypeConstructors() {
  for (const char* n : {"Int", "Integer", "Float", "Double", "Char", "Bool", "()", "Ordering"}) arity_[n] = 0;
  arity_["[]"] = 1;
  arity_["IO"] = 1;
  arity_["->"] = 2;
}

std::optional<int> TypeConstructors::arity(const std::string& name) const {
  if (is_tuple_con(name)) return static_cast<int>(name.size() - 1);
  auto it = arity_.find(name);
  if (it == arity_.end()) return std::nullopt;
  return it->second;
}

}  // namespace tydb
