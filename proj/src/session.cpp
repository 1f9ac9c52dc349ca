#include "tydb/session.hpp"

#include <algorithm>
#include <cctype>

#include "tydb/desugar.hpp"
#include "tydb/explain.hpp"
#include "tydb/parser.hpp"
#include "tydb/solver.hpp"

namespace tydb {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Index just past the parenthesis matching the one at `open`, or npos.
size_t matching_paren(std::string_view s, size_t open) {
  int depth = 0;
  char quote = 0;
  for (size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"') quote = c;
    if (c == '(') ++depth;
    if (c == ')' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

// `(x)` -> `x` when the parentheses enclose the whole text.
std::string strip_parens(const std::string& s) {
  if (s.size() >= 2 && s.front() == '(' && matching_paren(s, 0) == s.size()) return trim(s.substr(1, s.size() - 2));
  return s;
}

// Splits off a leading parenthesized group.
bool take_group(std::string& rest, std::string& group) {
  rest = trim(rest);
  if (rest.empty() || rest.front() != '(') return false;
  size_t end = matching_paren(rest, 0);
  if (end == std::string::npos) return false;
  group = trim(rest.substr(1, end - 2));
  rest = trim(rest.substr(end));
  return true;
}

std::vector<LocId> to_vector(const std::set<LocId>& s) { return std::vector<LocId>(s.begin(), s.end()); }

}  // namespace

QueryResult command_error(const std::string& message) {
  QueryResult r;
  r.status = QueryResult::Status::CommandError;
  r.message = message;
  r.text = "error: " + message + "\n";
  return r;
}

Session::Session(const std::string& file, const std::string& text, const Env& prelude)
    : program_(Program::load(file, text, prelude)), declared_(source_signatures(*program_)) {}

std::vector<const Source*> Session::sources() const {
  std::vector<const Source*> out{&program_->source()};
  for (const auto& [_, s] : pseudo_) out.push_back(&s);
  return out;
}

Session::Subject Session::parse_subject(const std::string& raw) {
  std::string full = trim(raw);
  std::string text = strip_parens(full);
  if (text.empty()) throw ReferenceError("missing subject");
  if (auto path = parse_refpath(text)) {
    const auto& first = std::get<std::string>(path->segments.front());
    bool top = false;
    for (int b : program_->scopes()[0].bindings) {
      for (int n : program_->bindings()[b].names) top = top || program_->names()[n].name == first;
    }
    if (top || path->segments.size() > 1 || !program_->env().globals.count(first)) {
      Subject s;
      s.is_target = true;
      s.target = program_->resolve_reference(*path);
      return s;
    }
  }
  pseudo_.erase("<input>");
  pseudo_.emplace("<input>", Source("<input>", full));
  ast::ExprPtr e = parse_expression_text(full, "<input>", program_->locs());
  desugar(e);
  program_->resolve_expression(*e);
  Subject s;
  s.expr = e.get();
  inputs_.push_back(std::move(e));
  return s;
}

Generated Session::generate(const Subject& s) {
  Generator g(*program_, mode, declared_);
  if (s.is_target) return g.target(s.target);
  if (s.program_node) return g.node(*s.expr);
  return g.expression(*s.expr);
}

QueryResult Session::error_result(const ConstraintSet& cs) {
  const Env& env = program_->env();
  ErrorReport rep;
  QueryResult q;
  q.status = QueryResult::Status::TypeError;
  if (solver_level <= 0) {
    SolveResult r = solve(cs, {}, env);
    rep.locs = locs_of(cs.constraints, constraint_indices(r.conflict.just, cs.constraints.size()));
    for (int i : rule_indices(r.conflict.just, cs.constraints.size(), env.rules.size())) {
      rep.rules.push_back(env.rules[i].id);
    }
    q.message = r.conflict.witness;
  } else {
    std::vector<int> mus = find_mus(cs, env);
    rep.locs = conflict_locs(cs, env, mus);
    rep.rules = rules_involved(cs, env, mus);
    q.message = solve(cs, mask(cs.constraints.size(), mus), env).conflict.witness;
    if (solver_level >= 2) rep.common = locs_of(cs.constraints, common_conflict_constraints(cs, env, mus));
  }
  q.locs = to_vector(rep.locs);
  q.common = to_vector(rep.common);
  q.rules = rep.rules;
  q.text = render_error(sources(), program_->locs(), rep);
  return q;
}

QueryResult Session::solve_type(const Generated& gen, bool lenient) {
  const Env& env = program_->env();
  SolveResult r = solve(gen.cs, {}, env, SolveOptions{lenient});
  if (!r.ok) return error_result(gen.cs);
  QueryResult q;
  TypeScheme s = gen.declared ? *gen.declared : residual_scheme(r, gen.cs.result, !lenient);
  q.scheme = pretty_type(s);
  q.text = q.scheme + "\n";
  return q;
}

QueryResult Session::type_of_target(const Target& t) {
  try {
    return solve_type(generate(Subject{true, t, nullptr, false}), t.kind == Target::Kind::Mono);
  } catch (const SourceError& e) {
    return command_error(e.formatted());
  }
}

QueryResult Session::type_of_node(const ast::Expr& e) {
  try {
    return solve_type(generate(Subject{false, {}, &e, true}), false);
  } catch (const SourceError& err) {
    return command_error(err.formatted());
  }
}

QueryResult Session::type_of(const std::string& subject) {
  try {
    Subject s = parse_subject(subject);
    return solve_type(generate(s), s.is_target && s.target.kind == Target::Kind::Mono);
  } catch (const ReferenceError& e) {
    return command_error(e.what());
  } catch (const SourceError& e) {
    return command_error(e.formatted());
  }
}

SchemePattern Session::parse_pattern(const std::string& raw) {
  std::string text = trim(raw);
  std::string stripped = strip_parens(text);
  pseudo_.erase("<pattern>");
  auto convert = [&](const std::string& t) {
    ast::SchemeExpr se = parse_scheme_text(t, "<pattern>", program_->locs());
    TypeConversion conv;
    conv.next_var = 1 << 20;
    SchemePattern p;
    p.scheme = convert_scheme(se, conv, program_->env(), program_->locs());
    p.wildcards = conv.wildcards;
    p.has_context = se.has_context;
    pseudo_.erase("<pattern>");
    pseudo_.emplace("<pattern>", Source("<pattern>", t));
    return p;
  };
  if (stripped != text) {
    try {
      return convert(stripped);
    } catch (const SourceError&) {
    }
  }
  return convert(text);
}

QueryResult Session::explain_generated(const Generated& gen, const SchemePattern& pattern) {
  try {
    Implicant imp = minimal_implicant(gen.cs, program_->env(), pattern);
    QueryResult q;
    std::set<LocId> locs = locs_of(gen.cs.constraints, imp.constraints);
    q.locs = to_vector(locs);
    if (imp.had_error) {
      q.message = "this definition also contains a type error; explaining a satisfiable part of it";
      q.text = "note: " + q.message + "\n";
    }
    q.text += render_underlines(sources(), program_->locs(), locs);
    return q;
  } catch (const ExplainError& e) {
    return command_error(e.what());
  }
}

QueryResult Session::explain(const std::string& subject, const std::string& pattern) {
  try {
    Subject s = parse_subject(subject);
    SchemePattern p = parse_pattern(pattern);
    return explain_generated(generate(s), p);
  } catch (const ReferenceError& e) {
    return command_error(e.what());
  } catch (const SourceError& e) {
    return command_error(e.formatted());
  }
}

QueryResult Session::explain_node(const ast::Expr& e, const SchemePattern& pattern) {
  try {
    return explain_generated(generate(Subject{false, {}, &e, true}), pattern);
  } catch (const SourceError& err) {
    return command_error(err.formatted());
  }
}

QueryResult Session::explain_target(const Target& t, const SchemePattern& pattern) {
  try {
    return explain_generated(generate(Subject{true, t, nullptr, false}), pattern);
  } catch (const SourceError& err) {
    return command_error(err.formatted());
  }
}

QueryResult Session::declare(const std::string& ref, const std::string& scheme) {
  auto path = parse_refpath(trim(ref));
  if (!path) return command_error("malformed reference '" + trim(ref) + "'");
  try {
    Target t = program_->resolve_reference(*path);
    if (t.kind != Target::Kind::Binding) return command_error(":declare needs a definition, not a clause or variable");
    const std::string file = "<declare:" + print_refpath(*path) + ">";
    std::string text = trim(scheme);
    ast::SchemeExpr se = parse_scheme_text(text, file, program_->locs());
    TypeConversion conv;
    Declared d;
    d.scheme = convert_scheme(se, conv, program_->env(), program_->locs());
    d.locs = se.locs;
    pseudo_.erase(file);
    pseudo_.emplace(file, Source(file, text));
    QueryResult q;
    q.scheme = pretty_type(d.scheme);
    q.text = program_->names()[t.name].name + " :: " + q.scheme + "\n";
    declared_[t.name] = std::move(d);
    return q;
  } catch (const ReferenceError& e) {
    return command_error(e.what());
  } catch (const SourceError& e) {
    return command_error(e.formatted());
  }
}

QueryResult Session::set(const std::string& args) {
  std::string a = trim(args);
  QueryResult q;
  if (a == "global" || a == "local") {
    mode = a == "global" ? Mode::Global : Mode::Local;
    q.text = "mode: " + a + "\n";
    return q;
  }
  if (a.rfind("solver", 0) == 0) {
    std::string n = trim(a.substr(6));
    if (n == "0" || n == "1" || n == "2") {
      solver_level = n[0] - '0';
      q.text = "solver level: " + n + "\n";
      return q;
    }
  }
  return command_error("usage: :set global|local|solver <0|1|2>");
}

QueryResult Session::print() const {
  QueryResult q;
  q.text = program_->source().text();
  return q;
}

std::string Session::help() {
  return ":type <ref-or-expr>                    infer and display the type (also :t, or a bare expression)\n"
         ":explain (<ref-or-expr>) (<pattern>)   underline the locations forcing the type to match the pattern\n"
         ":declare (<ref>) (<type>)              assume the definition has the given type\n"
         ":print                                 show the loaded program\n"
         ":set global|local                      choose the explanation mode\n"
         ":set solver <0|1|2>                    0 raw conflict, 1 minimal conflict, 2 also common locations\n"
         ":help                                  this text\n"
         ":quit                                  leave the debugger\n"
         "references name nested definitions with ';', e.g. plot;getYs;centre or reverse;rev;2\n";
}

std::string Session::execute(const std::string& raw, bool& quit, QueryResult* result) {
  std::string line = trim(raw);
  QueryResult q;
  if (line.empty()) return "";
  if (line.front() != ':') {
    q = type_of(line);
  } else {
    size_t sp = line.find_first_of(" \t(");
    std::string cmd = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    if (cmd == ":type" || cmd == ":t") {
      q = rest.empty() ? command_error("usage: :type <ref-or-expr>") : type_of(rest);
    } else if (cmd == ":explain") {
      std::string subject;
      if (!take_group(rest, subject) || rest.empty()) {
        q = command_error("usage: :explain (<ref-or-expr>) (<pattern>)");
      } else {
        q = explain(subject, rest);
      }
    } else if (cmd == ":declare") {
      std::string ref;
      if (!take_group(rest, ref) || rest.empty()) {
        q = command_error("usage: :declare (<ref>) (<type>)");
      } else {
        q = declare(ref, strip_parens(rest));
      }
    } else if (cmd == ":print") {
      q = print();
    } else if (cmd == ":set") {
      q = set(rest);
    } else if (cmd == ":help") {
      q.text = help();
    } else if (cmd == ":quit") {
      quit = true;
    } else {
      q = command_error("unknown command '" + cmd + "'; type :help for the list of commands");
    }
  }
  if (result) *result = q;
  return q.text;
}

Session::Batch Session::run_batch() {
  Batch b;
  const Program& p = *program_;
  for (const auto& q : p.queries()) {
    QueryResult r;
    std::string label;
    try {
    if (q.name >= 0) {
      const NameInfo& n = p.names()[q.name];
      Target t;
      t.binding = n.binding;
      t.name = n.id;
      label = n.name;
      if (q.kind == EmbeddedQuery::Kind::Type) {
        r = type_of_target(t);
      } else {
        TypeConversion conv;
        conv.next_var = 1 << 20;
        SchemePattern pat;
        pat.scheme = convert_scheme(*q.pattern, conv, p.env(), p.locs());
        pat.wildcards = conv.wildcards;
        pat.has_context = q.pattern->has_context;
        r = explain_target(t, pat);
      }
    } else {
      const ast::Expr& inner = *std::get<ast::EQuery>(q.expr->node).expr;
      const Span& sp = inner.span;
      for (int l = sp.start_line; l <= sp.end_line; ++l) {
        std::string_view text = p.source().line(l);
        size_t from = l == sp.start_line ? static_cast<size_t>(sp.start_col - 1) : 0;
        size_t to = l == sp.end_line ? static_cast<size_t>(sp.end_col - 1) : text.size();
        if (!label.empty()) label += " ";
        label += trim(text.substr(from, to - from));
      }
      if (q.kind == EmbeddedQuery::Kind::Type) {
        r = type_of_node(*q.expr);
      } else {
        TypeConversion conv;
        conv.next_var = 1 << 20;
        SchemePattern pat;
        pat.scheme = convert_scheme(*q.pattern, conv, p.env(), p.locs());
        pat.wildcards = conv.wildcards;
        pat.has_context = q.pattern->has_context;
        r = explain_node(*q.expr, pat);
      }
    }
    } catch (const SourceError& e) {
      r = command_error(e.formatted());
    }
    if (q.kind == EmbeddedQuery::Kind::Type && r.status == QueryResult::Status::Ok) {
      b.output += label + " :: " + r.scheme + "\n";
    } else {
      b.output += r.text;
    }
  }
  for (int bi : p.scopes()[0].bindings) {
    const Binding& bd = p.bindings()[bi];
    for (int n : bd.names) {
      Target t;
      t.binding = bi;
      t.name = n;
      Generator g(p, Mode::Local, declared_);
      Generated gen = g.target(t);
      if (!satisfiable(gen.cs, {}, p.env())) b.ill_typed.push_back(p.names()[n].name);
    }
  }
  b.status = b.ill_typed.empty() ? 0 : 1;
  return b;
}

}  // namespace tydb
