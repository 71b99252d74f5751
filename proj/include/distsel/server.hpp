#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace distsel {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path session_dir = "sessions";
    std::uint64_t default_seed = 0;  // seed of newly created sessions
};

// JSON API over HTTP. Sessions live in config.session_dir; scan and fit run as
// background jobs polled through GET /jobs/<id> (or synchronously with "wait": true).
class ApiServer {
public:
    explicit ApiServer(ServerConfig config);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    // Binds the socket and returns the bound port.
    int bind();
    // Serves until stop(); call bind() first.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// bind + run, logging the address to stderr.
void serve(const ServerConfig& config);

} // namespace distsel
