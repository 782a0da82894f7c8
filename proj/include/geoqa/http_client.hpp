#pragma once

#include <map>
#include <string>

namespace geoqa {

struct HttpResponse {
    int status = 0;      // 0 when the request never got a response
    std::string body;
    std::string error;   // transport error description when status == 0
};

/// Minimal blocking client for http:// and https:// base URLs. The base may
/// carry a path prefix ("https://host/v1"), which is prepended to every
/// request path.
class HttpClient {
public:
    HttpClient(std::string base_url, double timeout_s, std::map<std::string, std::string> headers = {});

    HttpResponse get(const std::string& path, const std::map<std::string, std::string>& query = {}) const;
    HttpResponse post_json(const std::string& path, const std::string& body) const;

    const std::string& base_url() const noexcept { return base_url_; }

private:
    std::string base_url_;
    std::string origin_;
    std::string prefix_;
    double timeout_s_;
    std::map<std::string, std::string> headers_;
};

}  // namespace geoqa
