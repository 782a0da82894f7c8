// Same macro set as http_client.cpp so both TUs see one httplib.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "geoqa/service/http_server.hpp"

#include "geoqa/error.hpp"

namespace geoqa::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json error_json(const std::string& message) { return {{"kind", "error"}, {"message", message}}; }

}  // namespace

struct HttpServer::Impl {
    std::shared_ptr<Engine> engine;
    httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<Engine> engine) : impl_(std::make_unique<Impl>()) {
    impl_->engine = std::move(engine);
    auto& srv = impl_->server;
    Engine* eng = impl_->engine.get();
    // httplib also sets SO_REUSEPORT, which would let a second server share a taken port
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });

    srv.Post("/api/query", [eng](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            return send(res, 400, error_json(std::string("body is not JSON: ") + e.what()));
        }
        if (!body.is_object() || !body.contains("prompt") || !body["prompt"].is_string()) {
            return send(res, 400, error_json("body needs a string \"prompt\""));
        }
        std::string session;
        if (body.contains("session_id") && body["session_id"].is_string()) {
            session = body["session_id"].get<std::string>();
        }
        try {
            auto out = eng->query(session, body["prompt"].get<std::string>());
            send(res, out.status, out.body);
        } catch (const std::exception& e) {
            send(res, 500, error_json(e.what()));
        }
    });

    srv.Get(R"(/api/steps/([^/]+))", [eng](const httplib::Request& req, httplib::Response& res) {
        auto snap = eng->step(req.matches[1]);
        if (!snap) {
            return send(res, 404, error_json("unknown step " + std::string(req.matches[1])));
        }
        send(res, 200, *snap);
    });

    srv.Post("/api/data", [eng](const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data() || !req.has_file("name") || !req.has_file("file")) {
            return send(res, 400, error_json("multipart fields \"name\" and \"file\" are required"));
        }
        const std::string table = req.has_file("table") ? req.get_file_value("table").content : "";
        try {
            auto report = eng->ingest(req.get_file_value("name").content, req.get_file_value("file").content, table);
            send(res, 200, report.to_json());
        } catch (const Error& e) {
            json j = error_json(e.what());
            j["code"] = std::string(to_string(e.code()));
            send(res, 422, j);
        }
    });

    srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"ok", true}}); });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int p = impl_->server.bind_to_any_port(host);
        if (p < 0) {
            throw Error(ErrorCode::Io, "cannot bind " + host);
        }
        return p;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::serve() {
    if (!impl_->server.listen_after_bind()) {
        throw Error(ErrorCode::Io, "server stopped with an error");
    }
}

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
}

}  // namespace geoqa::service
