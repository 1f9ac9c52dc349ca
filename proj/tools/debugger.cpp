#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tydb/api.hpp"
#include "tydb/session.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive type debugger"};
  std::string file, prelude_path;
  bool global = false, batch = false, json = false;
  int solver = 1, port = 0;
  app.add_option("FILE", file, "program to debug")->required();
  app.add_flag("--global", global, "start in global explanation mode");
  app.add_option("--solver", solver, "solver level")->check(CLI::Range(0, 2));
  app.add_flag("--batch", batch, "answer the embedded ::? queries and exit");
  app.add_option("--prelude", prelude_path, "prelude signature file");
  app.add_flag("--json", json, "print query results as JSON documents");
  app.add_option("--serve", port, "serve the HTTP API on this port");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<tydb::Session> session;
  try {
    tydb::Env prelude = prelude_path.empty() ? tydb::load_prelude(tydb::default_prelude_text())
                                             : tydb::load_prelude(read_file(prelude_path), prelude_path);
    session = std::make_unique<tydb::Session>(file, read_file(file), prelude);
  } catch (const tydb::SourceError& e) {
    std::cerr << e.formatted() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  session->mode = global ? tydb::Mode::Global : tydb::Mode::Local;
  session->solver_level = solver;

  if (batch) {
    tydb::Session::Batch b = session->run_batch();
    std::cout << b.output;
    for (const auto& name : b.ill_typed) std::cerr << file << ": type error in definition of " << name << "\n";
    return b.status;
  }
  if (port > 0) {
    try {
      tydb::serve(*session, port);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    return 0;
  }

  bool quit = false;
  std::string line;
  while (!quit) {
    std::cout << session->prompt() << std::flush;
    if (!std::getline(std::cin, line)) break;
    tydb::QueryResult r;
    std::string out = session->execute(line, quit, &r);
    bool query = line.find_first_not_of(" \t") != std::string::npos &&
                 (line.rfind(":t", 0) == 0 || line.rfind(":explain", 0) == 0 || line.rfind(":declare", 0) == 0 ||
                  line.front() != ':');
    if (json && query) {
      std::cout << tydb::result_document(*session, r) << "\n";
    } else {
      std::cout << out;
    }
  }
  return 0;
}
