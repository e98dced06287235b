#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hextiles/tileset.hpp"

namespace hextiles {

struct HttpRequest {
    std::string method = "GET";
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
};

struct ServerOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;
    bool cors = true;
};

/// Read-only view over loaded tilesets.
///
///   GET /tilesets                                   summaries
///   GET /tilesets/{name}                            full meta (legend, palette)
///   GET /tilesets/{name}/tiles?resolution=R[&bbox=x1,y1,x2,y2]
///   GET /tilesets/{name}/cell/{index}               drill-down
///
/// Every response carries an ETag derived from the content hashes. The state
/// never changes after construction, so handle() is safe to call from any
/// number of threads.
class TileServer {
public:
    explicit TileServer(std::vector<TileSet> tilesets, bool cors = true);

    HttpResponse handle(const HttpRequest& request) const;

    const std::map<std::string, TileSet>& tilesets() const noexcept { return tilesets_; }

    /// Blocks serving HTTP until stop() is called from another thread.
    void listen(const std::string& bind, int port);
    /// Binds an ephemeral port and returns it; serve with run().
    int bind_any(const std::string& bind);
    void run();
    void stop();
    bool running() const;

    ~TileServer();
    TileServer(TileServer&&) = delete;
    TileServer& operator=(TileServer&&) = delete;

private:
    HttpResponse tiles(const TileSet& ts, const HttpRequest& request) const;
    HttpResponse cell(const TileSet& ts, const std::string& index) const;
    HttpResponse finish(HttpResponse response, const std::string& validator) const;
    void install_routes();

    std::map<std::string, TileSet> tilesets_;
    std::string list_validator_;
    bool cors_;
    struct Http;
    std::unique_ptr<Http> http_;
};

}  // namespace hextiles
