#pragma once

#include "geoqa/service/engine.hpp"

#include <memory>
#include <string>

namespace geoqa::service {

/// POST /api/query, GET /api/steps/{id}, POST /api/data and GET /api/health
/// over an Engine.
class HttpServer {
public:
    explicit HttpServer(std::shared_ptr<Engine> engine);
    ~HttpServer();

    /// Binds without serving yet; port 0 picks a free port. Throws
    /// Error(Io) when the address is taken.
    int bind(const std::string& host, int port);

    /// Blocks until stop().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace geoqa::service
