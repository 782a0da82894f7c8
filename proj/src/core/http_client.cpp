#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "geoqa/http_client.hpp"

#include "geoqa/error.hpp"

namespace geoqa {

namespace {

httplib::Headers to_headers(const std::map<std::string, std::string>& in) {
    httplib::Headers out;
    for (const auto& [k, v] : in) {
        out.emplace(k, v);
    }
    return out;
}

HttpResponse convert(const httplib::Result& res) {
    HttpResponse out;
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

}  // namespace

HttpClient::HttpClient(std::string base_url, double timeout_s, std::map<std::string, std::string> headers)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s), headers_(std::move(headers)) {
    const auto scheme_end = base_url_.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "base URL needs a scheme: '" + base_url_ + "'");
    }
    const auto path_start = base_url_.find('/', scheme_end + 3);
    origin_ = base_url_.substr(0, path_start);
    if (path_start != std::string::npos) {
        prefix_ = base_url_.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') {
            prefix_.pop_back();
        }
    }
}

HttpResponse HttpClient::get(const std::string& path, const std::map<std::string, std::string>& query) const {
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
    client.set_read_timeout(std::chrono::duration<double>(timeout_s_));
    httplib::Params params(query.begin(), query.end());
    return convert(client.Get(prefix_ + path, params, to_headers(headers_)));
}

HttpResponse HttpClient::post_json(const std::string& path, const std::string& body) const {
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
    client.set_read_timeout(std::chrono::duration<double>(timeout_s_));
    return convert(client.Post(prefix_ + path, to_headers(headers_), body, "application/json"));
}

}  // namespace geoqa
