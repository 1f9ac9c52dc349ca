#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tydb/env.hpp"
#include "tydb/generate.hpp"
#include "tydb/program.hpp"
#include "tydb/render.hpp"

namespace tydb {

struct QueryResult {
  enum class Status { Ok, TypeError, CommandError };
  Status status = Status::Ok;
  std::string scheme;  // :type on a well-typed subject
  std::vector<LocId> locs;    // conflict or explanation tokens
  std::vector<LocId> common;  // locations in all conflicts (solver level 2)
  std::vector<std::string> rules;
  std::string message;
  std::string text;  // what the REPL prints, newline-terminated
};

// A debugging session over one loaded program.
class Session {
 public:
  // Throws SourceError when the program does not load.
  Session(const std::string& file, const std::string& text, const Env& prelude);

  Mode mode = Mode::Local;
  int solver_level = 1;

  const Program& program() const { return *program_; }
  std::string prompt() const { return program_->source().name() + "> "; }
  // The loaded file first, then pseudo sources for declarations and input.
  std::vector<const Source*> sources() const;

  QueryResult type_of(const std::string& subject);
  QueryResult type_of_target(const Target& t);
  QueryResult type_of_node(const ast::Expr& e);
  QueryResult explain(const std::string& subject, const std::string& pattern);
  QueryResult explain_node(const ast::Expr& e, const SchemePattern& pattern);
  QueryResult explain_target(const Target& t, const SchemePattern& pattern);
  QueryResult declare(const std::string& ref, const std::string& scheme);
  QueryResult set(const std::string& args);
  QueryResult print() const;
  static std::string help();

  // One REPL line. `result` receives the query result for JSON output.
  std::string execute(const std::string& line, bool& quit, QueryResult* result = nullptr);

  struct Batch {
    std::string output;
    int status = 0;
    std::vector<std::string> ill_typed;  // top-level names
  };
  Batch run_batch();

  SchemePattern parse_pattern(const std::string& text);

 private:
  struct Subject {
    bool is_target = false;
    Target target;
    const ast::Expr* expr = nullptr;
    bool program_node = false;
  };

  Subject parse_subject(const std::string& text);
  Generated generate(const Subject& s);
  QueryResult solve_type(const Generated& gen, bool lenient);
  QueryResult error_result(const ConstraintSet& cs);
  QueryResult explain_generated(const Generated& gen, const SchemePattern& pattern);

  std::unique_ptr<Program> program_;
  std::map<int, Declared> declared_;
  std::map<std::string, Source> pseudo_;
  std::vector<ast::ExprPtr> inputs_;
};

QueryResult command_error(const std::string& message);

}  // namespace tydb
