#include "tydb/parser.hpp"

#include <charconv>
#include <limits>

namespace tydb {

using namespace ast;

namespace {

struct OpInfo {
  int prec;
  enum class Assoc { Left, Right, None } assoc;
};

OpInfo op_info(std::string_view name) {
  using A = OpInfo::Assoc;
  if (name == ".") return {9, A::Right};
  if (name == "!!") return {9, A::Left};
  if (name == "*" || name == "/" || name == "div" || name == "mod" || name == "quot" || name == "rem") {
    return {7, A::Left};
  }
  if (name == "+" || name == "-") return {6, A::Left};
  if (name == ":" || name == "++") return {5, A::Right};
  if (name == "==" || name == "/=" || name == "<" || name == "<=" || name == ">" || name == ">=" ||
      name == "elem" || name == "notElem") {
    return {4, A::None};
  }
  if (name == "&&") return {3, A::Right};
  if (name == "||") return {2, A::Right};
  if (name == ">>" || name == ">>=") return {1, A::Left};
  if (name == "$" || name == "$!" || name == "seq") return {0, A::Right};
  return {9, A::Left};
}

std::string op_name(const Token& t) {
  if (t.text.size() > 2 && t.text.front() == '`') return t.text.substr(1, t.text.size() - 2);
  return t.text;
}

Literal::Kind literal_kind(TokKind k) {
  switch (k) {
    case TokKind::Integer: return Literal::Kind::Integer;
    case TokKind::Fractional: return Literal::Kind::Fractional;
    case TokKind::Char: return Literal::Kind::Char;
    default: return Literal::Kind::String;
  }
}

bool is_literal(TokKind k) {
  return k == TokKind::Integer || k == TokKind::Fractional || k == TokKind::Char || k == TokKind::String;
}

template <class Node>
ExprPtr make_expr(Node node, std::vector<LocId> locs, Span span) {
  auto e = std::make_unique<Expr>();
  e->node = std::move(node);
  e->locs = std::move(locs);
  e->span = span;
  return e;
}

template <class Node>
PatPtr make_pat(Node node, std::vector<LocId> locs, Span span) {
  auto p = std::make_unique<Pat>();
  p->node = std::move(node);
  p->locs = std::move(locs);
  p->span = span;
  return p;
}

std::string join_tokens(const std::vector<Token>& toks, size_t from, size_t to) {
  std::string out;
  for (size_t i = from; i < to; ++i) {
    const Token& t = toks[i];
    bool no_space_before = t.is_special(")") || t.is_special("]") || t.is_special(",");
    bool prev_open = i > from && (toks[i - 1].is_special("(") || toks[i - 1].is_special("["));
    if (i > from && !no_space_before && !prev_open) out += ' ';
    out += t.text;
  }
  return out;
}

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::string file) : t_(toks), file_(std::move(file)) {}

  Module module() {
    Module m;
    m.decls = decl_block();
    if (cur().kind != TokKind::End) fail("unexpected " + describe(cur()));
    return m;
  }

  ExprPtr whole_expression() {
    item_start_ = p_;
    layout_.push_back(0);
    ExprPtr e = exp();
    if (cur().kind != TokKind::End) fail("unexpected " + describe(cur()) + " after expression");
    return e;
  }

  SchemeExpr whole_scheme() {
    item_start_ = p_;
    layout_.push_back(0);
    SchemeExpr s = scheme();
    if (cur().kind != TokKind::End) fail("unexpected " + describe(cur()) + " after type");
    return s;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& cur() const { return t_[p_]; }
  const Token& peek(size_t k = 1) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  const Token& advance() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }

  static std::string describe(const Token& t) {
    if (t.kind == TokKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SourceError(file_, cur().span, msg); }

  [[noreturn]] void expected(const std::string& what) const {
    fail("syntax error: expected " + what + ", found " + describe(cur()));
  }

  // True when the current token terminates the construct being parsed
  // because it starts a new layout item (or closes the block).
  bool at_stop() const {
    const Token& k = cur();
    if (k.kind == TokKind::End) return true;
    if (p_ == item_start_) return false;
    return k.line_start && !layout_.empty() && k.layout_col <= layout_.back();
  }

  const Token& expect_special(std::string_view s) {
    if (!cur().is_special(s)) expected("'" + std::string(s) + "'");
    return advance();
  }
  const Token& expect_reserved(std::string_view s) {
    if (!cur().is_reserved(s)) expected("'" + std::string(s) + "'");
    return advance();
  }
  const Token& expect_keyword(std::string_view s) {
    if (!cur().is_keyword(s)) expected("'" + std::string(s) + "'");
    return advance();
  }

  Span span_from(size_t start) const {
    if (p_ == 0 || p_ <= start) return t_[start].span;
    return merge_spans(t_[start].span, t_[p_ - 1].span);
  }

  std::vector<LocId> locs_between(size_t from, size_t to) const {
    std::vector<LocId> out;
    for (size_t i = from; i < to; ++i) out.push_back(t_[i].loc);
    return out;
  }

  // ---- layout blocks -------------------------------------------------------

  template <class F>
  void parse_block(F item) {
    if (cur().is_special("{")) {
      advance();
      layout_.push_back(0);
      size_t saved_start = item_start_;
      while (!cur().is_special("}")) {
        if (cur().kind == TokKind::End) expected("'}'");
        item_start_ = p_;
        item();
        if (cur().is_special(";")) {
          while (cur().is_special(";")) advance();
        } else if (!cur().is_special("}")) {
          expected("';' or '}'");
        }
      }
      advance();
      layout_.pop_back();
      item_start_ = saved_start;
      return;
    }
    if (cur().kind == TokKind::End) return;
    if (p_ != item_start_ && at_stop()) return;
    int col = cur().layout_col;
    if (!layout_.empty() && col <= layout_.back()) return;
    layout_.push_back(col);
    size_t saved_start = item_start_;
    while (true) {
      item_start_ = p_;
      item();
      while (cur().is_special(";")) advance();
      if (cur().kind == TokKind::End || cur().is_keyword("in")) break;
      if (cur().line_start && cur().layout_col == col) continue;
      if (cur().line_start && cur().layout_col > col) expected("end of declaration");
      break;
    }
    layout_.pop_back();
    item_start_ = saved_start;
  }

  // ---- declarations --------------------------------------------------------

  // Adjacent clauses of the same name form one definition.
  std::vector<Decl> decl_block() {
    std::vector<Decl> out;
    parse_block([&] {
      Decl d = decl();
      if (!out.empty()) {
        auto* prev = std::get_if<FunDecl>(&out.back().node);
        auto* next = std::get_if<FunDecl>(&d.node);
        if (prev && next && prev->name == next->name) {
          for (auto& c : next->clauses) prev->clauses.push_back(std::move(c));
          out.back().span = merge_spans(out.back().span, d.span);
          return;
        }
      }
      out.push_back(std::move(d));
    });
    return out;
  }

  Decl decl() {
    size_t start = p_;
    Decl d;
    const Token& k = cur();
    if (k.is_keyword("class")) {
      d.node = class_decl();
    } else if (k.is_keyword("instance")) {
      d.node = instance_decl();
    } else if (k.is_keyword("rule")) {
      d.node = rule_decl();
    } else if (k.is_keyword("data")) {
      d.node = data_decl();
    } else if (is_sig_start()) {
      d.node = sig_decl();
    } else if (k.kind == TokKind::VarId && peek().is_reserved("::?")) {
      QueryDecl q;
      q.name = k.text;
      q.name_loc = k.loc;
      advance();
      q.query_loc = advance().loc;
      if (can_start_type() && !at_stop()) {
        size_t ps = p_;
        q.pattern = scheme();
        q.pattern_text = join_tokens(t_, ps, p_);
      }
      d.node = std::move(q);
    } else if (k.kind == TokKind::VarId) {
      d.node = fun_clause();
    } else if (k.is_special("(") || k.is_special("[")) {
      PatDecl pd;
      pd.pat = pattern();
      if (!cur().is_reserved("=") && !cur().is_reserved("|")) expected("'=' in pattern binding");
      pd.eq_loc = cur().loc;
      pd.rhs = rhs();
      pd.span = span_from(start);
      d.node = std::move(pd);
    } else {
      expected("declaration");
    }
    d.span = span_from(start);
    return d;
  }

  bool is_sig_start() const {
    size_t i = p_;
    while (true) {
      if (t_[i].kind == TokKind::VarId || t_[i].kind == TokKind::ConId) {
        ++i;
      } else if (t_[i].is_special("(") && t_[i + 1].kind == TokKind::Operator && t_[i + 2].is_special(")")) {
        i += 3;
      } else {
        return false;
      }
      if (t_[i].is_reserved("::")) return true;
      if (!t_[i].is_special(",")) return false;
      ++i;
    }
  }

  SigDecl sig_decl() {
    SigDecl s;
    while (true) {
      if (cur().kind == TokKind::VarId || cur().kind == TokKind::ConId) {
        s.names.push_back(cur().text);
        s.name_locs.push_back(advance().loc);
      } else {
        advance();
        s.names.push_back(op_name(cur()));
        s.name_locs.push_back(advance().loc);
        advance();
      }
      if (cur().is_reserved("::")) break;
      advance();
    }
    advance();
    size_t ts = p_;
    s.type = scheme();
    s.type_text = join_tokens(t_, ts, p_);
    return s;
  }

  FunDecl fun_clause() {
    size_t start = p_;
    FunDecl f;
    f.name = cur().text;
    Clause c;
    c.binder_loc = advance().loc;
    while (can_start_apat() && !at_stop()) c.params.push_back(apat());
    if (!cur().is_reserved("=") && !cur().is_reserved("|")) expected("'=' or '|' in definition of " + f.name);
    c.rhs = rhs();
    c.span = span_from(start);
    f.clauses.push_back(std::move(c));
    return f;
  }

  Rhs rhs() {
    Rhs r;
    if (cur().is_reserved("=")) {
      advance();
      r.plain = exp();
    } else {
      while (cur().is_reserved("|")) {
        GuardedRhs g;
        g.bar_loc = advance().loc;
        g.guard = exp();
        expect_reserved("=");
        g.body = exp();
        r.guarded.push_back(std::move(g));
        if (!cur().is_reserved("|")) break;
        if (cur().line_start && !layout_.empty() && cur().layout_col <= layout_.back()) break;
      }
    }
    if (cur().is_keyword("where") && !at_stop()) {
      r.where_loc = advance().loc;
      r.where = decl_block();
    }
    return r;
  }

  ClassDecl class_decl() {
    ClassDecl c;
    c.loc = advance().loc;
    if (cur().kind != TokKind::ConId) expected("class name");
    c.name = advance().text;
    while (cur().kind == TokKind::VarId && !at_stop()) c.vars.push_back(advance().text);
    if (c.vars.empty()) expected("class type variable");
    if (cur().is_keyword("where") && !at_stop()) {
      advance();
      parse_block([&] {
        if (!is_sig_start()) expected("method signature");
        c.methods.push_back(sig_decl());
      });
    }
    return c;
  }

  InstanceDecl instance_decl() {
    InstanceDecl d;
    d.loc = advance().loc;
    if (context_ahead()) {
      d.context = context();
      expect_reserved("=>");
    }
    d.head = atom();
    return d;
  }

  RuleDecl rule_decl() {
    RuleDecl r;
    r.loc = advance().loc;
    size_t start = p_;
    r.heads.push_back(atom());
    while (cur().is_special(",")) {
      advance();
      r.heads.push_back(atom());
    }
    expect_reserved("==>");
    if (cur().is(TokKind::ConId, "False")) {
      advance();
      r.falsity = true;
    } else {
      while (true) {
        TypeExpr lhs = type();
        expect_reserved("=");
        TypeExpr rhs_t = type();
        r.equations.emplace_back(std::move(lhs), std::move(rhs_t));
        if (!cur().is_special(",") || at_stop()) break;
        advance();
      }
    }
    r.text = join_tokens(t_, start, p_);
    return r;
  }

  DataDecl data_decl() {
    advance();
    DataDecl d;
    if (cur().kind != TokKind::ConId) expected("type constructor name");
    d.name = advance().text;
    while (cur().kind == TokKind::VarId && !at_stop()) d.vars.push_back(advance().text);
    if (cur().is_reserved("=")) fail("data constructors are not supported; declare the type only");
    return d;
  }

  // ---- types ---------------------------------------------------------------

  bool can_start_type() const {
    const Token& k = cur();
    return k.kind == TokKind::VarId || k.kind == TokKind::ConId || k.kind == TokKind::Wildcard ||
           k.is_special("(") || k.is_special("[");
  }

  // Scans ahead for `=>` at bracket depth zero within the current type.
  bool context_ahead() const {
    int depth = 0;
    for (size_t i = p_; i < t_.size(); ++i) {
      const Token& k = t_[i];
      if (k.kind == TokKind::End) return false;
      if (i != p_ && k.line_start && !layout_.empty() && k.layout_col <= layout_.back() && i != item_start_) {
        return false;
      }
      if (k.is_special("(") || k.is_special("[")) {
        ++depth;
      } else if (k.is_special(")") || k.is_special("]")) {
        if (--depth < 0) return false;
      } else if (depth == 0) {
        if (k.is_reserved("=>")) return true;
        if (k.is_reserved("=") || k.is_reserved("|") || k.is_reserved("::") || k.is_reserved("::?") ||
            k.is_reserved("==>") || k.is_special(";") || k.is_special(",") || k.is_keyword("where")) {
          return false;
        }
      }
    }
    return false;
  }

  // `( ... => ... )` wrapping a whole scheme.
  bool parenthesized_scheme_ahead() const {
    if (!cur().is_special("(")) return false;
    int depth = 0;
    for (size_t i = p_; i < t_.size(); ++i) {
      const Token& k = t_[i];
      if (k.kind == TokKind::End) return false;
      if (k.is_special("(") || k.is_special("[")) {
        ++depth;
      } else if (k.is_special(")") || k.is_special("]")) {
        if (--depth == 0) return false;
      } else if (depth == 1 && k.is_reserved("=>")) {
        return true;
      }
    }
    return false;
  }

  SchemeExpr scheme() {
    size_t start = p_;
    SchemeExpr s;
    if (context_ahead()) {
      s.context = context();
      s.has_context = true;
      expect_reserved("=>");
      s.body = type();
    } else if (parenthesized_scheme_ahead()) {
      advance();
      s = scheme();
      expect_special(")");
    } else {
      s.body = type();
    }
    s.locs = locs_between(start, p_);
    return s;
  }

  std::vector<AtomExpr> context() {
    std::vector<AtomExpr> out;
    if (cur().is_special("(")) {
      advance();
      if (cur().is_special(")")) {
        advance();
        return out;
      }
      out.push_back(atom());
      while (cur().is_special(",")) {
        advance();
        out.push_back(atom());
      }
      expect_special(")");
      return out;
    }
    out.push_back(atom());
    return out;
  }

  AtomExpr atom() {
    size_t start = p_;
    AtomExpr a;
    if (cur().kind != TokKind::ConId) expected("class name");
    a.cls = advance().text;
    while (can_start_type() && !at_stop()) a.args.push_back(atype());
    if (a.args.empty()) expected("class argument");
    a.locs = locs_between(start, p_);
    return a;
  }

  TypeExpr type() {
    size_t start = p_;
    TypeExpr b = btype();
    if (cur().is_reserved("->")) {
      advance();
      TypeExpr r = type();
      TypeExpr f;
      f.kind = TypeExpr::Kind::Con;
      f.name = "->";
      f.args.push_back(std::move(b));
      f.args.push_back(std::move(r));
      f.locs = locs_between(start, p_);
      return f;
    }
    return b;
  }

  TypeExpr btype() {
    size_t start = p_;
    if (cur().kind == TokKind::ConId) {
      TypeExpr c;
      c.kind = TypeExpr::Kind::Con;
      c.name = advance().text;
      while (can_start_type() && !at_stop()) c.args.push_back(atype());
      c.locs = locs_between(start, p_);
      return c;
    }
    return atype();
  }

  TypeExpr atype() {
    size_t start = p_;
    TypeExpr t;
    const Token& k = cur();
    if (k.kind == TokKind::VarId) {
      t.kind = TypeExpr::Kind::Var;
      t.name = advance().text;
    } else if (k.kind == TokKind::Wildcard) {
      t.kind = TypeExpr::Kind::Wildcard;
      t.name = "_";
      advance();
    } else if (k.kind == TokKind::ConId) {
      t.kind = TypeExpr::Kind::Con;
      t.name = advance().text;
    } else if (k.is_special("(")) {
      advance();
      if (cur().is_special(")")) {
        advance();
        t.kind = TypeExpr::Kind::Con;
        t.name = "()";
      } else {
        TypeExpr first = type();
        if (cur().is_special(",")) {
          t.kind = TypeExpr::Kind::Con;
          t.args.push_back(std::move(first));
          while (cur().is_special(",")) {
            advance();
            t.args.push_back(type());
          }
          t.name = "(" + std::string(t.args.size() - 1, ',') + ")";
          expect_special(")");
        } else {
          expect_special(")");
          first.locs = locs_between(start, p_);
          return first;
        }
      }
    } else if (k.is_special("[")) {
      advance();
      t.kind = TypeExpr::Kind::Con;
      t.name = "[]";
      t.args.push_back(type());
      expect_special("]");
    } else {
      expected("type");
    }
    t.locs = locs_between(start, p_);
    return t;
  }

  // ---- patterns ------------------------------------------------------------

  bool can_start_apat() const {
    const Token& k = cur();
    return k.kind == TokKind::VarId || k.kind == TokKind::Wildcard || is_literal(k.kind) ||
           k.is_special("(") || k.is_special("[");
  }

  PatPtr pattern() {
    size_t start = p_;
    PatPtr head = apat();
    if (cur().kind == TokKind::Operator && cur().text == ":" && !at_stop()) {
      LocId colon = advance().loc;
      PatPtr tail = pattern();
      return make_pat(PCons{std::move(head), std::move(tail)}, {colon}, span_from(start));
    }
    return head;
  }

  PatPtr apat() {
    size_t start = p_;
    const Token& k = cur();
    if (k.kind == TokKind::VarId) {
      advance();
      return make_pat(PVar{k.text}, {k.loc}, k.span);
    }
    if (k.kind == TokKind::Wildcard) {
      advance();
      return make_pat(PWild{}, {k.loc}, k.span);
    }
    if (is_literal(k.kind)) {
      advance();
      return make_pat(PLit{Literal{literal_kind(k.kind), k.text}}, {k.loc}, k.span);
    }
    if (k.is_special("(")) {
      std::vector<LocId> locs{advance().loc};
      if (cur().is_special(")")) {
        locs.push_back(advance().loc);
        return make_pat(PUnit{}, locs, span_from(start));
      }
      PatPtr first = pattern();
      if (cur().is_special(",")) {
        PTuple tup;
        tup.elems.push_back(std::move(first));
        while (cur().is_special(",")) {
          locs.push_back(advance().loc);
          tup.elems.push_back(pattern());
        }
        locs.push_back(expect_special(")").loc);
        return make_pat(std::move(tup), locs, span_from(start));
      }
      expect_special(")");
      return first;
    }
    if (k.is_special("[")) {
      std::vector<LocId> locs{advance().loc};
      PList list;
      if (!cur().is_special("]")) {
        list.elems.push_back(pattern());
        while (cur().is_special(",")) {
          locs.push_back(advance().loc);
          list.elems.push_back(pattern());
        }
      }
      locs.push_back(expect_special("]").loc);
      return make_pat(std::move(list), locs, span_from(start));
    }
    if (k.kind == TokKind::ConId) fail("constructor patterns are not supported: '" + k.text + "'");
    expected("pattern");
  }

  // ---- expressions ---------------------------------------------------------

  ExprPtr exp() {
    size_t start = p_;
    ExprPtr e = infix(nullptr);
    return exp_tail(std::move(e), start);
  }

  ExprPtr exp_tail(ExprPtr e, size_t start) {
    if (cur().is_reserved("::") && !at_stop()) {
      advance();
      SchemeExpr s = scheme();
      std::vector<LocId> locs = s.locs;
      e = make_expr(EAnnot{std::move(e), std::move(s)}, std::move(locs), span_from(start));
    }
    if (cur().is_reserved("::?") && !at_stop()) {
      LocId q = advance().loc;
      EQuery query;
      query.expr = std::move(e);
      if (can_start_type() && !at_stop()) {
        size_t ps = p_;
        query.pattern = scheme();
        query.pattern_text = join_tokens(t_, ps, p_);
      }
      e = make_expr(std::move(query), {q}, span_from(start));
    }
    return e;
  }

  bool at_operator() const { return cur().kind == TokKind::Operator && !at_stop(); }

  // Operator-precedence parse of `e1 op e2 op ...`. When `trailing` is
  // non-null an operator directly followed by `)` ends the chain and is
  // handed back (left section).
  ExprPtr infix(ExprPtr* trailing) {
    std::vector<ExprPtr> operands;
    std::vector<ExprPtr> ops;
    std::vector<OpInfo> infos;

    auto reduce = [&] {
      ExprPtr rhs = std::move(operands.back());
      operands.pop_back();
      ExprPtr lhs = std::move(operands.back());
      operands.pop_back();
      ExprPtr op = std::move(ops.back());
      ops.pop_back();
      infos.pop_back();
      Span sp = merge_spans(lhs->span, rhs->span);
      operands.push_back(make_expr(EOp{std::move(op), std::move(lhs), std::move(rhs)}, {}, sp));
    };

    while (true) {
      operands.push_back(operand());
      if (!at_operator()) break;
      if (trailing && peek().is_special(")")) {
        const Token& k = advance();
        *trailing = make_expr(EVar{op_name(k)}, {k.loc}, k.span);
        break;
      }
      const Token& k = advance();
      OpInfo info = op_info(op_name(k));
      while (!infos.empty() && (infos.back().prec > info.prec ||
                                (infos.back().prec == info.prec && info.assoc != OpInfo::Assoc::Right))) {
        reduce();
      }
      ops.push_back(make_expr(EVar{op_name(k)}, {k.loc}, k.span));
      infos.push_back(info);
    }
    while (!ops.empty()) reduce();
    return std::move(operands.back());
  }

  ExprPtr operand() {
    size_t start = p_;
    if (cur().kind == TokKind::Operator && cur().text == "-") {
      LocId minus = advance().loc;
      ExprPtr e = operand();
      return make_expr(ENeg{std::move(e)}, {minus}, span_from(start));
    }
    return lexp();
  }

  ExprPtr lexp() {
    size_t start = p_;
    const Token& k = cur();
    if (k.is_reserved("\\")) {
      LocId lam = advance().loc;
      ELam lam_node;
      while (!cur().is_reserved("->")) {
        if (!can_start_apat()) expected("lambda parameter or '->'");
        lam_node.params.push_back(apat());
      }
      if (lam_node.params.empty()) expected("lambda parameter");
      advance();
      lam_node.body = exp();
      return make_expr(std::move(lam_node), {lam}, span_from(start));
    }
    if (k.is_keyword("let")) {
      LocId let = advance().loc;
      ELet let_node;
      let_node.decls = decl_block();
      expect_keyword("in");
      let_node.body = exp();
      return make_expr(std::move(let_node), {let}, span_from(start));
    }
    if (k.is_keyword("if")) {
      LocId if_loc = advance().loc;
      EIf node;
      node.cond = exp();
      while (cur().is_special(";")) advance();
      node.then_loc = expect_keyword("then").loc;
      node.then_branch = exp();
      while (cur().is_special(";")) advance();
      node.else_loc = expect_keyword("else").loc;
      node.else_branch = exp();
      return make_expr(std::move(node), {if_loc}, span_from(start));
    }
    return fexp();
  }

  bool can_start_aexp() const {
    const Token& k = cur();
    return k.kind == TokKind::VarId || k.kind == TokKind::ConId || is_literal(k.kind) || k.is_special("(") ||
           k.is_special("[");
  }

  ExprPtr fexp() {
    size_t start = p_;
    ExprPtr f = aexp();
    while (can_start_aexp() && !at_stop()) {
      ExprPtr a = aexp();
      f = make_expr(EApp{std::move(f), std::move(a)}, {}, span_from(start));
    }
    return f;
  }

  ExprPtr aexp() {
    const Token& k = cur();
    if (k.kind == TokKind::VarId || k.kind == TokKind::ConId) {
      advance();
      return make_expr(EVar{k.text}, {k.loc}, k.span);
    }
    if (is_literal(k.kind)) {
      advance();
      return make_expr(ELit{Literal{literal_kind(k.kind), k.text}}, {k.loc}, k.span);
    }
    if (k.is_special("(")) return paren_expr();
    if (k.is_special("[")) return bracket_expr();
    expected("expression");
  }

  ExprPtr paren_expr() {
    size_t start = p_;
    LocId open = advance().loc;
    if (cur().is_special(")")) {
      LocId close = advance().loc;
      return make_expr(ETuple{}, {open, close}, span_from(start));
    }
    // `(op)` and right sections `(op e)`; `(- e)` is negation.
    if (cur().kind == TokKind::Operator) {
      const Token& k = cur();
      if (peek().is_special(")")) {
        advance();
        LocId close = advance().loc;
        ESection s;
        s.op = make_expr(EVar{op_name(k)}, {k.loc}, k.span);
        return make_expr(std::move(s), {open, close}, span_from(start));
      }
      if (k.text != "-") {
        advance();
        ESection s;
        s.op = make_expr(EVar{op_name(k)}, {k.loc}, k.span);
        s.right = exp();
        LocId close = expect_special(")").loc;
        return make_expr(std::move(s), {open, close}, span_from(start));
      }
    }
    size_t inner = p_;
    ExprPtr trailing;
    ExprPtr first = infix(&trailing);
    if (trailing) {
      LocId close = expect_special(")").loc;
      ESection s;
      s.op = std::move(trailing);
      s.left = std::move(first);
      return make_expr(std::move(s), {open, close}, span_from(start));
    }
    first = exp_tail(std::move(first), inner);
    if (cur().is_special(",")) {
      std::vector<LocId> locs{open};
      ETuple tup;
      tup.elems.push_back(std::move(first));
      while (cur().is_special(",")) {
        locs.push_back(advance().loc);
        tup.elems.push_back(exp());
      }
      locs.push_back(expect_special(")").loc);
      return make_expr(std::move(tup), std::move(locs), span_from(start));
    }
    expect_special(")");
    first->span = span_from(start);
    return first;
  }

  ExprPtr bracket_expr() {
    size_t start = p_;
    LocId open = advance().loc;
    if (cur().is_special("]")) {
      LocId close = advance().loc;
      return make_expr(EList{}, {open, close}, span_from(start));
    }
    ExprPtr first = exp();
    if (cur().is_reserved("..")) {
      EEnum en;
      en.from = std::move(first);
      en.dots_loc = advance().loc;
      if (!cur().is_special("]")) en.to = exp();
      LocId close = expect_special("]").loc;
      return make_expr(std::move(en), {open, close}, span_from(start));
    }
    if (cur().is_reserved("|")) {
      EComp comp;
      comp.head = std::move(first);
      do {
        LocId sep = advance().loc;
        comp.quals.push_back(qualifier(sep));
      } while (cur().is_special(","));
      LocId close = expect_special("]").loc;
      return make_expr(std::move(comp), {open, close}, span_from(start));
    }
    std::vector<LocId> locs{open};
    EList list;
    list.elems.push_back(std::move(first));
    while (cur().is_special(",")) {
      LocId comma = advance().loc;
      ExprPtr next = exp();
      if (list.elems.size() == 1 && cur().is_reserved("..")) {
        EEnum en;
        en.from = std::move(list.elems[0]);
        en.then = std::move(next);
        en.dots_loc = advance().loc;
        if (!cur().is_special("]")) en.to = exp();
        LocId close = expect_special("]").loc;
        return make_expr(std::move(en), {open, comma, close}, span_from(start));
      }
      locs.push_back(comma);
      list.elems.push_back(std::move(next));
    }
    locs.push_back(expect_special("]").loc);
    return make_expr(std::move(list), std::move(locs), span_from(start));
  }

  bool generator_ahead() const {
    int depth = 0;
    for (size_t i = p_; i < t_.size(); ++i) {
      const Token& k = t_[i];
      if (k.kind == TokKind::End) return false;
      if (k.is_special("(") || k.is_special("[")) {
        ++depth;
      } else if (k.is_special(")") || k.is_special("]")) {
        if (--depth < 0) return false;
      } else if (depth == 0) {
        if (k.is_reserved("<-")) return true;
        if (k.is_special(",") || k.is_reserved("=") || k.is_reserved("|")) return false;
      }
    }
    return false;
  }

  Qualifier qualifier(LocId sep) {
    Qualifier q;
    if (cur().is_keyword("let")) {
      q.kind = Qualifier::Kind::Let;
      q.loc = advance().loc;
      q.decls = decl_block();
      return q;
    }
    if (generator_ahead()) {
      q.kind = Qualifier::Kind::Generator;
      q.pat = pattern();
      q.loc = expect_reserved("<-").loc;
      q.expr = exp();
      return q;
    }
    q.kind = Qualifier::Kind::Guard;
    q.loc = sep;
    q.expr = exp();
    return q;
  }

  const std::vector<Token>& t_;
  std::string file_;
  size_t p_ = 0;
  size_t item_start_ = std::numeric_limits<size_t>::max();
  std::vector<int> layout_;
};

}  // namespace

Module parse_program(const std::vector<Token>& tokens, const std::string& file) {
  return Parser(tokens, file).module();
}

ExprPtr parse_expression_text(const std::string& text, const std::string& file, LocTable& locs) {
  auto toks = tokenize(file, text, locs);
  return Parser(toks, file).whole_expression();
}

SchemeExpr parse_scheme_text(const std::string& text, const std::string& file, LocTable& locs) {
  auto toks = tokenize(file, text, locs);
  return Parser(toks, file).whole_scheme();
}

std::optional<RefPath> parse_refpath(std::string_view text) {
  RefPath path;
  size_t i = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return std::nullopt;
  while (i <= text.size()) {
    size_t j = text.find(';', i);
    if (j == std::string_view::npos) j = text.size();
    std::string_view seg = trim(text.substr(i, j - i));
    if (seg.empty()) return std::nullopt;
    if (std::isdigit(static_cast<unsigned char>(seg[0]))) {
      int n = 0;
      auto [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), n);
      if (ec != std::errc() || ptr != seg.data() + seg.size() || n < 1) return std::nullopt;
      if (path.segments.empty()) return std::nullopt;
      path.segments.emplace_back(n);
    } else {
      if (!path.segments.empty() && std::holds_alternative<int>(path.segments.back())) return std::nullopt;
      if (!(std::islower(static_cast<unsigned char>(seg[0])) || seg[0] == '_')) return std::nullopt;
      for (char c : seg) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return std::nullopt;
      }
      if (is_keyword(seg)) return std::nullopt;
      path.segments.emplace_back(std::string(seg));
    }
    i = j + 1;
  }
  return path;
}

std::string print_refpath(const RefPath& path) {
  std::string out;
  for (size_t i = 0; i < path.segments.size(); ++i) {
    if (i) out += ';';
    if (auto* s = std::get_if<std::string>(&path.segments[i])) out += *s;
    else out += std::to_string(std::get<int>(path.segments[i]));
  }
  return out;
}

}  // namespace tydb
