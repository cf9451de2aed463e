#include "askdb/service.hpp"

#include <httplib.h>

#include <thread>

#include "askdb/errors.hpp"
#include "askdb/json_io.hpp"

namespace askdb {

struct QueryService::Impl {
    Engine* engine = nullptr;
    httplib::Server server;
    std::thread worker;

    explicit Impl(Engine& e) : engine(&e) { wire(); }

    ~Impl() {
        server.stop();
        if (worker.joinable()) worker.join();
    }

    static void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    void wire() {
        server.Post("/v1/query", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::exception& e) {
                reply_json(res, 400, {{"error", "malformed JSON body"}, {"detail", e.what()}});
                return;
            }
            if (!body.contains("question") || !body["question"].is_string() ||
                !body.contains("datasource_id") || !body["datasource_id"].is_string()) {
                reply_json(res, 400,
                           {{"error", "body needs string fields 'question' and "
                                      "'datasource_id'"}});
                return;
            }
            std::optional<std::string> verbosity;
            if (body.contains("verbosity") && body["verbosity"].is_string()) {
                verbosity = body["verbosity"].get<std::string>();
            }
            const std::string session =
                body.contains("session_id") && body["session_id"].is_string()
                    ? body["session_id"].get<std::string>()
                    : "";
            try {
                const AskOutcome outcome =
                    engine->ask(body["question"].get<std::string>(),
                                body["datasource_id"].get<std::string>(), session, verbosity);
                if (!outcome.answer) {
                    reply_json(res, 422, to_json(outcome.route));
                    return;
                }
                nlohmann::json answer = to_json(*outcome.answer);
                const int status =
                    outcome.answer->final_status == FinalStatus::refused ? 403 : 200;
                reply_json(res, status, answer);
            } catch (const DatasourceUnavailable& e) {
                reply_json(res, 503, {{"error", "datasource_unavailable"}, {"detail", e.what()}});
            } catch (const ProviderUnavailable& e) {
                reply_json(res, 503, {{"error", "provider_unavailable"}, {"detail", e.what()}});
            } catch (const AuditError& e) {
                reply_json(res, 503, {{"error", "audit_unavailable"}, {"detail", e.what()}});
            } catch (const ConfigError& e) {
                reply_json(res, 404, {{"error", "unknown_datasource"}, {"detail", e.what()}});
            }
        });

        server.Get(R"(/v1/schema/([^/]+))", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            const std::string datasource_id = req.matches[1];
            try {
                reply_json(res, 200, to_json(engine->catalog(datasource_id)));
            } catch (const DatasourceUnavailable& e) {
                reply_json(res, 503, {{"error", "datasource_unavailable"}, {"detail", e.what()}});
            } catch (const ConfigError& e) {
                reply_json(res, 404, {{"error", "unknown_datasource"}, {"detail", e.what()}});
            }
        });

        server.Get("/v1/audit", [this](const httplib::Request& req, httplib::Response& res) {
            AuditFilter filter;
            if (req.has_param("session")) filter.session_id = req.get_param_value("session");
            if (req.has_param("since")) {
                const auto ts = parse_timestamp(req.get_param_value("since"));
                if (!ts) {
                    reply_json(res, 400, {{"error", "unreadable 'since' timestamp"}});
                    return;
                }
                filter.since = ts;
            }
            if (req.has_param("status")) {
                const auto status = final_status_from_string(req.get_param_value("status"));
                if (!status) {
                    reply_json(res, 400, {{"error", "unknown 'status' value"}});
                    return;
                }
                filter.final_status = status;
            }
            nlohmann::json records = nlohmann::json::array();
            for (const AuditRecord& record : engine->audit().query(filter)) {
                records.push_back(audit_record_to_json(record));
            }
            reply_json(res, 200, {{"records", std::move(records)}});
        });

        server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200, {{"status", "ok"}});
        });
    }
};

QueryService::QueryService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

QueryService::~QueryService() = default;

bool QueryService::listen(const std::string& bind, int port) {
    return impl_->server.listen(bind, port);
}

int QueryService::listen_on_any_port(const std::string& bind) {
    const int port = impl_->server.bind_to_any_port(bind);
    impl_->worker = std::thread([this]() { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void QueryService::stop() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace askdb
