#pragma once

#include <memory>
#include <string>

#include "askdb/engine.hpp"

namespace askdb {

// REST surface over the engine:
//   POST /v1/query                   {question, datasource_id, verbosity?}
//   GET  /v1/schema/{datasource_id}
//   GET  /v1/audit?session=&since=&status=
//   GET  /v1/health
// 200 answered/exhausted, 403 compliance refusals, 422 out-of-scope routing,
// 400 malformed bodies, 404 unknown datasource, 503 datasource/provider
// unavailable. No endpoint accepts raw SQL.
class QueryService {
public:
    explicit QueryService(Engine& engine);
    ~QueryService();

    // Blocks until stop() is called from another thread.
    bool listen(const std::string& bind, int port);
    // Binds to an OS-assigned port and serves on a background thread; returns
    // the port. Test harness entry point.
    int listen_on_any_port(const std::string& bind);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace askdb
