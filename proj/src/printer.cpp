#include <cctype>
#include <sstream>

#include "tydb/parser.hpp"

namespace tydb {

using namespace ast;

namespace {

bool is_symbolic(const std::string& name) {
  return !name.empty() && !std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_';
}

std::string infix_name(const std::string& name) { return is_symbolic(name) ? name : "`" + name + "`"; }

std::string var_name(const std::string& name) { return is_symbolic(name) ? "(" + name + ")" : name; }

void print_type_expr(std::ostream& os, const TypeExpr& t);

void print_atype(std::ostream& os, const TypeExpr& t) {
  if (t.kind == TypeExpr::Kind::Con && !t.args.empty() && t.name != "[]" && t.name[0] != '(') {
    os << '(';
    print_type_expr(os, t);
    os << ')';
    return;
  }
  print_type_expr(os, t);
}

void print_type_expr(std::ostream& os, const TypeExpr& t) {
  switch (t.kind) {
    case TypeExpr::Kind::Var: os << t.name; return;
    case TypeExpr::Kind::Wildcard: os << '_'; return;
    case TypeExpr::Kind::Con: break;
  }
  if (t.name == "->") {
    os << '(';
    print_type_expr(os, t.args[0]);
    os << " -> ";
    print_type_expr(os, t.args[1]);
    os << ')';
  } else if (t.name == "[]") {
    os << '[';
    print_type_expr(os, t.args[0]);
    os << ']';
  } else if (t.name == "()") {
    os << "()";
  } else if (t.name[0] == '(') {
    os << '(';
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      print_type_expr(os, t.args[i]);
    }
    os << ')';
  } else {
    os << t.name;
    for (const auto& a : t.args) {
      os << ' ';
      print_atype(os, a);
    }
  }
}

void print_atom_expr(std::ostream& os, const AtomExpr& a) {
  os << a.cls;
  for (const auto& t : a.args) {
    os << ' ';
    print_atype(os, t);
  }
}

void print_context(std::ostream& os, const std::vector<AtomExpr>& ctx) {
  os << '(';
  for (size_t i = 0; i < ctx.size(); ++i) {
    if (i) os << ", ";
    print_atom_expr(os, ctx[i]);
  }
  os << ')';
}

void print_scheme(std::ostream& os, const SchemeExpr& s) {
  if (s.has_context) {
    print_context(os, s.context);
    os << " => ";
  }
  print_type_expr(os, s.body);
}

void print_pat(std::ostream& os, const Pat& p) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, PVar>) {
          os << n.name;
        } else if constexpr (std::is_same_v<N, PWild>) {
          os << '_';
        } else if constexpr (std::is_same_v<N, PLit>) {
          os << n.lit.text;
        } else if constexpr (std::is_same_v<N, PTuple>) {
          os << '(';
          for (size_t i = 0; i < n.elems.size(); ++i) {
            if (i) os << ", ";
            print_pat(os, *n.elems[i]);
          }
          os << ')';
        } else if constexpr (std::is_same_v<N, PList>) {
          os << '[';
          for (size_t i = 0; i < n.elems.size(); ++i) {
            if (i) os << ", ";
            print_pat(os, *n.elems[i]);
          }
          os << ']';
        } else if constexpr (std::is_same_v<N, PCons>) {
          os << '(';
          print_pat(os, *n.head);
          os << " : ";
          print_pat(os, *n.tail);
          os << ')';
        } else {
          os << "()";
        }
      },
      p.node);
}

void print_decl(std::ostream& os, const Decl& d, const char* clause_sep = "; ");

void print_decls(std::ostream& os, const std::vector<Decl>& ds) {
  os << "{ ";
  for (size_t i = 0; i < ds.size(); ++i) {
    if (i) os << "; ";
    print_decl(os, ds[i]);
  }
  os << " }";
}

void print_e(std::ostream& os, const Expr& e);

void print_qual(std::ostream& os, const Qualifier& q) {
  switch (q.kind) {
    case Qualifier::Kind::Generator:
      print_pat(os, *q.pat);
      os << " <- ";
      print_e(os, *q.expr);
      break;
    case Qualifier::Kind::Guard: print_e(os, *q.expr); break;
    case Qualifier::Kind::Let:
      os << "let ";
      print_decls(os, q.decls);
      break;
  }
}

void print_e(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, EVar>) {
          os << var_name(n.name);
        } else if constexpr (std::is_same_v<N, ELit>) {
          os << n.lit.text;
        } else if constexpr (std::is_same_v<N, EApp>) {
          os << '(';
          print_e(os, *n.fn);
          os << ' ';
          print_e(os, *n.arg);
          os << ')';
        } else if constexpr (std::is_same_v<N, EOp>) {
          os << '(';
          print_e(os, *n.lhs);
          os << ' ' << infix_name(std::get<EVar>(n.op->node).name) << ' ';
          print_e(os, *n.rhs);
          os << ')';
        } else if constexpr (std::is_same_v<N, ENeg>) {
          os << "(- ";
          print_e(os, *n.expr);
          os << ')';
        } else if constexpr (std::is_same_v<N, ELam>) {
          os << "(\\";
          for (const auto& p : n.params) {
            print_pat(os, *p);
            os << ' ';
          }
          os << "-> ";
          print_e(os, *n.body);
          os << ')';
        } else if constexpr (std::is_same_v<N, ELet>) {
          os << "(let ";
          print_decls(os, n.decls);
          os << " in ";
          print_e(os, *n.body);
          os << ')';
        } else if constexpr (std::is_same_v<N, EIf>) {
          os << "(if ";
          print_e(os, *n.cond);
          os << " then ";
          print_e(os, *n.then_branch);
          os << " else ";
          print_e(os, *n.else_branch);
          os << ')';
        } else if constexpr (std::is_same_v<N, ETuple>) {
          os << '(';
          for (size_t i = 0; i < n.elems.size(); ++i) {
            if (i) os << ", ";
            print_e(os, *n.elems[i]);
          }
          os << ')';
        } else if constexpr (std::is_same_v<N, EList>) {
          os << '[';
          for (size_t i = 0; i < n.elems.size(); ++i) {
            if (i) os << ", ";
            print_e(os, *n.elems[i]);
          }
          os << ']';
        } else if constexpr (std::is_same_v<N, EAnnot>) {
          os << '(';
          print_e(os, *n.expr);
          os << " :: ";
          print_scheme(os, n.type);
          os << ')';
        } else if constexpr (std::is_same_v<N, EQuery>) {
          os << '(';
          print_e(os, *n.expr);
          os << " ::?";
          if (n.pattern) {
            os << ' ';
            print_scheme(os, *n.pattern);
          }
          os << ')';
        } else if constexpr (std::is_same_v<N, ESection>) {
          const std::string& op = std::get<EVar>(n.op->node).name;
          os << '(';
          if (n.left) {
            print_e(os, *n.left);
            os << ' ' << infix_name(op);
          } else if (n.right) {
            os << infix_name(op) << ' ';
            print_e(os, *n.right);
          } else {
            os << infix_name(op);
          }
          os << ')';
        } else if constexpr (std::is_same_v<N, EEnum>) {
          os << '[';
          print_e(os, *n.from);
          if (n.then) {
            os << ", ";
            print_e(os, *n.then);
          }
          os << " ..";
          if (n.to) {
            os << ' ';
            print_e(os, *n.to);
          }
          os << ']';
        } else if constexpr (std::is_same_v<N, EComp>) {
          os << '[';
          print_e(os, *n.head);
          os << " | ";
          for (size_t i = 0; i < n.quals.size(); ++i) {
            if (i) os << ", ";
            print_qual(os, n.quals[i]);
          }
          os << ']';
        }
      },
      e.node);
}

void print_rhs(std::ostream& os, const Rhs& r) {
  if (r.plain) {
    os << " = ";
    print_e(os, *r.plain);
  } else {
    for (const auto& g : r.guarded) {
      os << " | ";
      print_e(os, *g.guard);
      os << " = ";
      print_e(os, *g.body);
    }
  }
  if (!r.where.empty()) {
    os << " where ";
    print_decls(os, r.where);
  }
}

void print_sig(std::ostream& os, const SigDecl& s) {
  for (size_t i = 0; i < s.names.size(); ++i) {
    if (i) os << ", ";
    os << var_name(s.names[i]);
  }
  os << " :: ";
  print_scheme(os, s.type);
}

void print_decl(std::ostream& os, const Decl& d, const char* clause_sep) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, FunDecl>) {
          for (size_t i = 0; i < n.clauses.size(); ++i) {
            if (i) os << clause_sep;
            os << n.name;
            for (const auto& p : n.clauses[i].params) {
              os << ' ';
              print_pat(os, *p);
            }
            print_rhs(os, n.clauses[i].rhs);
          }
        } else if constexpr (std::is_same_v<N, PatDecl>) {
          print_pat(os, *n.pat);
          print_rhs(os, n.rhs);
        } else if constexpr (std::is_same_v<N, SigDecl>) {
          print_sig(os, n);
        } else if constexpr (std::is_same_v<N, ClassDecl>) {
          os << "class " << n.name;
          for (const auto& v : n.vars) os << ' ' << v;
          if (!n.methods.empty()) {
            os << " where { ";
            for (size_t i = 0; i < n.methods.size(); ++i) {
              if (i) os << "; ";
              print_sig(os, n.methods[i]);
            }
            os << " }";
          }
        } else if constexpr (std::is_same_v<N, InstanceDecl>) {
          os << "instance ";
          if (!n.context.empty()) {
            print_context(os, n.context);
            os << " => ";
          }
          print_atom_expr(os, n.head);
        } else if constexpr (std::is_same_v<N, RuleDecl>) {
          os << "rule ";
          for (size_t i = 0; i < n.heads.size(); ++i) {
            if (i) os << ", ";
            print_atom_expr(os, n.heads[i]);
          }
          os << " ==> ";
          if (n.falsity) {
            os << "False";
          } else {
            for (size_t i = 0; i < n.equations.size(); ++i) {
              if (i) os << ", ";
              print_type_expr(os, n.equations[i].first);
              os << " = ";
              print_type_expr(os, n.equations[i].second);
            }
          }
        } else if constexpr (std::is_same_v<N, DataDecl>) {
          os << "data " << n.name;
          for (const auto& v : n.vars) os << ' ' << v;
        } else if constexpr (std::is_same_v<N, QueryDecl>) {
          os << n.name << " ::?";
          if (n.pattern) {
            os << ' ';
            print_scheme(os, *n.pattern);
          }
        }
      },
      d.node);
}

// ---- structural equality ----------------------------------------------------

bool same(const TypeExpr& a, const TypeExpr& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!same(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool same(const AtomExpr& a, const AtomExpr& b) {
  if (a.cls != b.cls || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!same(a.args[i], b.args[i])) return false;
  }
  return true;
}

template <class T>
bool same_all(const std::vector<T>& a, const std::vector<T>& b);

bool same(const SchemeExpr& a, const SchemeExpr& b) {
  return a.has_context == b.has_context && same_all(a.context, b.context) && same(a.body, b.body);
}

bool same(const Pat& a, const Pat& b);
bool same(const PatPtr& a, const PatPtr& b) {
  if (!a || !b) return !a && !b;
  return same(*a, *b);
}

bool same(const Pat& a, const Pat& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, PVar>) return x.name == y.name;
        else if constexpr (std::is_same_v<N, PLit>) return x.lit == y.lit;
        else if constexpr (std::is_same_v<N, PTuple> || std::is_same_v<N, PList>) return same_all(x.elems, y.elems);
        else if constexpr (std::is_same_v<N, PCons>) return same(x.head, y.head) && same(x.tail, y.tail);
        else return true;
      },
      a.node);
}

bool same(const Expr& a, const Expr& b);
bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same(*a, *b);
}
bool same(const Decl& a, const Decl& b);
bool same(const Rhs& a, const Rhs& b);

bool same(const Qualifier& a, const Qualifier& b) {
  return a.kind == b.kind && same(a.pat, b.pat) && same(a.expr, b.expr) && same_all(a.decls, b.decls);
}

bool same(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, EVar>) return x.name == y.name;
        else if constexpr (std::is_same_v<N, ELit>) return x.lit == y.lit;
        else if constexpr (std::is_same_v<N, EApp>) return same(x.fn, y.fn) && same(x.arg, y.arg);
        else if constexpr (std::is_same_v<N, EOp>) return same(x.op, y.op) && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<N, ENeg>) return same(x.expr, y.expr);
        else if constexpr (std::is_same_v<N, ELam>) return same_all(x.params, y.params) && same(x.body, y.body);
        else if constexpr (std::is_same_v<N, ELet>) return same_all(x.decls, y.decls) && same(x.body, y.body);
        else if constexpr (std::is_same_v<N, EIf>) {
          return same(x.cond, y.cond) && same(x.then_branch, y.then_branch) && same(x.else_branch, y.else_branch);
        } else if constexpr (std::is_same_v<N, ETuple> || std::is_same_v<N, EList>) {
          return same_all(x.elems, y.elems);
        } else if constexpr (std::is_same_v<N, EAnnot>) {
          return same(x.expr, y.expr) && same(x.type, y.type);
        } else if constexpr (std::is_same_v<N, EQuery>) {
          if (x.pattern.has_value() != y.pattern.has_value()) return false;
          return same(x.expr, y.expr) && (!x.pattern || same(*x.pattern, *y.pattern));
        } else if constexpr (std::is_same_v<N, ESection>) {
          return same(x.op, y.op) && same(x.left, y.left) && same(x.right, y.right);
        } else if constexpr (std::is_same_v<N, EEnum>) {
          return same(x.from, y.from) && same(x.then, y.then) && same(x.to, y.to);
        } else if constexpr (std::is_same_v<N, EComp>) {
          return same(x.head, y.head) && same_all(x.quals, y.quals);
        }
      },
      a.node);
}

bool same(const GuardedRhs& a, const GuardedRhs& b) { return same(a.guard, b.guard) && same(a.body, b.body); }

bool same(const Rhs& a, const Rhs& b) {
  return same(a.plain, b.plain) && same_all(a.guarded, b.guarded) && same_all(a.where, b.where);
}

bool same(const Clause& a, const Clause& b) { return same_all(a.params, b.params) && same(a.rhs, b.rhs); }

bool same(const SigDecl& a, const SigDecl& b) { return a.names == b.names && same(a.type, b.type); }

bool same(const std::pair<TypeExpr, TypeExpr>& a, const std::pair<TypeExpr, TypeExpr>& b) {
  return same(a.first, b.first) && same(a.second, b.second);
}

bool same(const Decl& a, const Decl& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const N& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, FunDecl>) return x.name == y.name && same_all(x.clauses, y.clauses);
        else if constexpr (std::is_same_v<N, PatDecl>) return same(x.pat, y.pat) && same(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<N, SigDecl>) return same(x, y);
        else if constexpr (std::is_same_v<N, ClassDecl>) {
          return x.name == y.name && x.vars == y.vars && same_all(x.methods, y.methods);
        } else if constexpr (std::is_same_v<N, InstanceDecl>) {
          return same_all(x.context, y.context) && same(x.head, y.head);
        } else if constexpr (std::is_same_v<N, RuleDecl>) {
          return x.falsity == y.falsity && same_all(x.heads, y.heads) && same_all(x.equations, y.equations);
        } else if constexpr (std::is_same_v<N, DataDecl>) {
          return x.name == y.name && x.vars == y.vars;
        } else if constexpr (std::is_same_v<N, QueryDecl>) {
          if (x.pattern.has_value() != y.pattern.has_value()) return false;
          return x.name == y.name && (!x.pattern || same(*x.pattern, *y.pattern));
        }
      },
      a.node);
}

template <class T>
bool same_all(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

std::string print_module(const Module& m) {
  std::ostringstream os;
  for (const auto& d : m.decls) {
    print_decl(os, d, "\n");
    os << '\n';
  }
  return os.str();
}

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  print_e(os, e);
  return os.str();
}

bool same_module(const Module& a, const Module& b) { return same_all(a.decls, b.decls); }

}  // namespace tydb
