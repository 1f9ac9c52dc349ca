#include "tydb/api.hpp"

#include <httplib.h>

#include <json.hpp>
#include <stdexcept>

namespace tydb {

using nlohmann::json;

namespace {

json span_json(const Session& s, LocId id) {
  const Loc& l = s.program().locs()[id];
  json j = {{"startLine", l.span.start_line},
            {"startCol", l.span.start_col},
            {"endLine", l.span.end_line},
            {"endCol", l.span.end_col}};
  if (l.file != s.program().source().name()) j["file"] = l.file;
  return j;
}

const char* status_text(QueryResult::Status st) {
  switch (st) {
    case QueryResult::Status::Ok:
      return "ok";
    case QueryResult::Status::TypeError:
      return "type-error";
    case QueryResult::Status::CommandError:
      return "command-error";
  }
  return "command-error";
}

json result_json(const Session& s, const QueryResult& r) {
  json j;
  j["status"] = status_text(r.status);
  if (!r.scheme.empty()) j["scheme"] = r.scheme;
  j["spans"] = json::array();
  for (LocId l : r.locs) j["spans"].push_back(span_json(s, l));
  j["rules"] = r.rules;
  if (!r.common.empty()) {
    j["common_spans"] = json::array();
    for (LocId l : r.common) j["common_spans"].push_back(span_json(s, l));
  }
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

ApiResponse bad_request(const std::string& message) { return {400, json{{"error", message}}.dump()}; }

bool read_span(const json& j, Span& out) {
  for (const char* k : {"startLine", "startCol", "endLine", "endCol"}) {
    if (!j.contains(k) || !j[k].is_number_integer()) return false;
  }
  out = Span{j["startLine"].get<int>(), j["startCol"].get<int>(), j["endLine"].get<int>(), j["endCol"].get<int>()};
  return true;
}

json source_json(const Session& s) {
  json tokens = json::array();
  for (const auto& t : s.program().tokens()) {
    if (t.kind == TokKind::End) continue;
    tokens.push_back({{"id", t.loc},
                      {"text", t.text},
                      {"startLine", t.span.start_line},
                      {"startCol", t.span.start_col},
                      {"endLine", t.span.end_line},
                      {"endCol", t.span.end_col}});
  }
  return {{"file", s.program().source().name()}, {"text", s.program().source().text()}, {"tokens", tokens}};
}

ApiResponse query(Session& s, const json& req) {
  if (!req.is_object() || !req.contains("kind") || !req["kind"].is_string() || !req.contains("subject")) {
    return bad_request("expected {kind, subject, pattern?}");
  }
  std::string kind = req["kind"];
  if (kind != "type" && kind != "explain") return bad_request("kind must be \"type\" or \"explain\"");
  std::string pattern;
  if (kind == "explain") {
    if (!req.contains("pattern") || !req["pattern"].is_string()) return bad_request("explain needs a pattern");
    pattern = req["pattern"];
  }
  const json& subject = req["subject"];
  QueryResult r;
  if (subject.is_string()) {
    r = kind == "type" ? s.type_of(subject.get<std::string>()) : s.explain(subject.get<std::string>(), pattern);
  } else if (subject.is_object()) {
    Span span;
    if (!read_span(subject, span)) return bad_request("subject span needs startLine, startCol, endLine, endCol");
    const ast::Expr* e = s.program().expression_at(span);
    if (!e) {
      r = command_error("the span does not cover exactly one expression");
    } else if (kind == "type") {
      r = s.type_of_node(*e);
    } else {
      try {
        r = s.explain_node(*e, s.parse_pattern(pattern));
      } catch (const SourceError& err) {
        r = command_error(err.formatted());
      }
    }
  } else {
    return bad_request("subject must be a reference, an expression or a span");
  }
  return {200, result_json(s, r).dump()};
}

}  // namespace

std::string result_document(const Session& s, const QueryResult& r) { return result_json(s, r).dump(); }

ApiResponse handle_request(Session& s, const std::string& method, const std::string& path, const std::string& body) {
  if (method == "GET" && path == "/source") return {200, source_json(s).dump()};
  if (method != "POST" || (path != "/query" && path != "/set" && path != "/declare")) {
    return {404, json{{"error", "no such endpoint"}}.dump()};
  }
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return bad_request("body is not a JSON object");
  if (path == "/query") return query(s, req);
  if (path == "/set") {
    QueryResult r;
    if (req.contains("mode") && req["mode"].is_string()) {
      r = s.set(req["mode"].get<std::string>());
    } else if (req.contains("solver") && req["solver"].is_number_integer()) {
      r = s.set("solver " + std::to_string(req["solver"].get<int>()));
    } else {
      return bad_request("expected {mode: local|global} or {solver: 0|1|2}");
    }
    if (r.status == QueryResult::Status::CommandError) return bad_request(r.message);
    return {200, result_json(s, r).dump()};
  }
  if (!req.contains("ref") || !req["ref"].is_string() || !req.contains("scheme") || !req["scheme"].is_string()) {
    return bad_request("expected {ref, scheme}");
  }
  return {200, result_json(s, s.declare(req["ref"], req["scheme"])).dump()};
}

void serve(Session& s, int port, const std::string& host) {
  httplib::Server svr;
  svr.new_task_queue = [] { return new httplib::ThreadPool(1); };
  auto route = [&s](const httplib::Request& req, httplib::Response& res) {
    ApiResponse r = handle_request(s, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  svr.Get("/source", route);
  svr.Post("/query", route);
  svr.Post("/set", route);
  svr.Post("/declare", route);
  if (!svr.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace tydb
