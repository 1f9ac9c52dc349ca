#pragma once

#include <string>

#include "tydb/session.hpp"

namespace tydb {

// JSON wire document for a query result:
// {status, scheme?, spans, rules, common_spans?, message?}.
std::string result_document(const Session& s, const QueryResult& r);

struct ApiResponse {
  int status = 200;
  std::string body;
};

// Routes one request: GET /source, POST /query, POST /set, POST /declare.
// Malformed documents give HTTP 400; query-level errors are reported in a
// QueryResult with HTTP 200.
ApiResponse handle_request(Session& s, const std::string& method, const std::string& path, const std::string& body);

// Serves the session on localhost until the process is stopped. Requests
// are executed one at a time in arrival order.
void serve(Session& s, int port, const std::string& host = "127.0.0.1");

}  // namespace tydb
