#pragma once

#include <string>
#include <thread>

#include "httplib.h"

#include "gqw/server/api.hpp"

namespace gqw {

/// Binds an ApiService to an HTTP listener.
class ApiServer {
public:
    explicit ApiServer(ApiService& service) : service_(service) {
        auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            auto out = service_.handle(req.method, req.path, req.body);
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
        server_.Get(".*", forward);
        server_.Post(".*", forward);
        server_.Put(".*", forward);
        server_.Delete(".*", forward);
    }

    ~ApiServer() { stop(); }

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds host:port (port 0 picks a free one) and serves on a background thread.
    int start(const std::string& host, int port) {
        const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (bound < 0) throw Error(ErrorCode::Network, "cannot listen on " + host + ":" + std::to_string(port));
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return bound;
    }

    /// Serves on the calling thread until stop() is called from elsewhere.
    void run(const std::string& host, int port) {
        if (!server_.listen(host, port)) throw Error(ErrorCode::Network, "cannot listen on " + host + ":" + std::to_string(port));
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

private:
    ApiService& service_;
    httplib::Server server_;
    std::thread thread_;
};

} // namespace gqw
