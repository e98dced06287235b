#include "hextiles/server.hpp"

#include <charconv>
#include <sstream>

#include <httplib.h>

#include "hextiles/error.hpp"
#include "hextiles/hash.hpp"

namespace hextiles {

namespace {

HttpResponse json_response(int status, const ojson& body)
{
    HttpResponse r;
    r.status = status;
    r.body = canonical_dump(body);
    r.body.push_back('\n');
    r.headers["Content-Type"] = "application/json";
    return r;
}

HttpResponse error_response(int status, const std::string& message, ojson extra = ojson::object())
{
    ojson body;
    body["error"] = message;
    for (auto& [k, v] : extra.items()) {
        body[k] = v;
    }
    return json_response(status, body);
}

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) {
                parts.push_back(std::move(cur));
            }
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        parts.push_back(std::move(cur));
    }
    return parts;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<BBox> parse_bbox(const std::string& text)
{
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const auto d = parse_double(std::string_view(text).substr(pos, comma - pos));
        if (!d) {
            return std::nullopt;
        }
        v.push_back(*d);
        pos = comma + 1;
    }
    if (v.size() != 4) {
        return std::nullopt;
    }
    BBox b{{std::min(v[0], v[2]), std::min(v[1], v[3])}, {std::max(v[0], v[2]), std::max(v[1], v[3])}};
    return b;
}

}  // namespace

struct TileServer::Http {
    httplib::Server server;
};

TileServer::TileServer(std::vector<TileSet> tilesets, bool cors) : cors_(cors)
{
    std::string all;
    for (auto& ts : tilesets) {
        const std::string name = ts.meta.name;
        if (tilesets_.contains(name)) {
            throw ConflictError("two tilesets are named '" + name + "'");
        }
        tilesets_.emplace(name, std::move(ts));
    }
    for (const auto& [name, ts] : tilesets_) {
        all += name + ":" + ts.meta.content_hash + "\n";
    }
    list_validator_ = sha256_hex(all);
}

TileServer::~TileServer() = default;

HttpResponse TileServer::finish(HttpResponse response, const std::string& validator) const
{
    response.headers["ETag"] = "\"" + validator + "\"";
    response.headers["Cache-Control"] = "no-cache";
    if (cors_) {
        response.headers["Access-Control-Allow-Origin"] = "*";
    }
    return response;
}

HttpResponse TileServer::handle(const HttpRequest& request) const
{
    if (request.method != "GET") {
        return finish(error_response(405, "only GET is supported"), list_validator_);
    }
    const auto parts = split_path(request.path);
    if (parts.empty() || parts[0] != "tilesets") {
        return finish(error_response(404, "no such endpoint"), list_validator_);
    }

    HttpResponse response;
    std::string validator = list_validator_;
    if (parts.size() == 1) {
        ojson list = ojson::array();
        for (const auto& [_, ts] : tilesets_) {
            list.push_back(meta_summary_json(ts.meta));
        }
        response = json_response(200, list);
    } else {
        auto it = tilesets_.find(parts[1]);
        if (it == tilesets_.end()) {
            return finish(error_response(404, "unknown tileset '" + parts[1] + "'"), list_validator_);
        }
        const TileSet& ts = it->second;
        validator = ts.meta.content_hash;
        if (parts.size() == 2) {
            response = json_response(200, meta_to_json(ts.meta));
        } else if (parts.size() == 3 && parts[2] == "tiles") {
            response = tiles(ts, request);
        } else if (parts.size() == 4 && parts[2] == "cell") {
            response = cell(ts, parts[3]);
        } else {
            response = error_response(404, "no such endpoint");
        }
    }

    if (response.status == 200) {
        auto inm = request.headers.find("If-None-Match");
        if (inm != request.headers.end() && inm->second == "\"" + validator + "\"") {
            response.status = 304;
            response.body.clear();
        }
    }
    return finish(std::move(response), validator);
}

HttpResponse TileServer::tiles(const TileSet& ts, const HttpRequest& request) const
{
    const ojson range = {ts.meta.r_min, ts.meta.r_max};
    auto rq = request.query.find("resolution");
    if (rq == request.query.end()) {
        return error_response(400, "missing resolution parameter", {{"valid_range", range}});
    }
    int res = 0;
    const auto pr = std::from_chars(rq->second.data(), rq->second.data() + rq->second.size(), res);
    if (pr.ec != std::errc{} || pr.ptr != rq->second.data() + rq->second.size()) {
        return error_response(400, "resolution must be an integer", {{"valid_range", range}});
    }
    if (res < ts.meta.r_min || res > ts.meta.r_max) {
        return error_response(400, "resolution " + std::to_string(res) + " outside the tileset's range",
                              {{"valid_range", range}});
    }
    std::optional<BBox> box;
    if (auto bq = request.query.find("bbox"); bq != request.query.end()) {
        box = parse_bbox(bq->second);
        if (!box) {
            return error_response(400, "bbox must be x1,y1,x2,y2 in projected meters");
        }
    }
    ojson list = ojson::array();
    for (const auto& tile : ts.layer(res)) {
        if (!box || box->contains(tile.boundary.center)) {
            list.push_back(tile_geometry_json(tile, ts.meta.projection_id));
        }
    }
    ojson body;
    body["tileset"] = ts.meta.name;
    body["resolution"] = res;
    body["count"] = list.size();
    body["tiles"] = std::move(list);
    return json_response(200, body);
}

HttpResponse TileServer::cell(const TileSet& ts, const std::string& index) const
{
    HexIndex h;
    try {
        h = HexIndex::parse(index);
    } catch (const ParseError& e) {
        return error_response(400, e.what());
    }
    if (h.resolution > ts.meta.grid.max_resolution) {
        return error_response(400, "resolution beyond the grid's maximum");
    }
    auto report = cell_report(ts, h);
    if (!report) {
        return error_response(404, "no tile at " + h.to_string());
    }
    return json_response(200, *report);
}

void TileServer::install_routes()
{
    if (http_) {
        return;
    }
    http_ = std::make_unique<Http>();
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        HttpRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) {
            r.query.emplace(k, v);
        }
        for (const auto& [k, v] : req.headers) {
            r.headers.emplace(k, v);
        }
        const HttpResponse out = handle(r);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) {
            if (k != "Content-Type") {
                res.set_header(k, v);
            }
        }
        auto ct = out.headers.find("Content-Type");
        res.set_content(out.body, ct == out.headers.end() ? "text/plain" : ct->second.c_str());
    };
    http_->server.Get(R"(/.*)", handler);
    http_->server.Post(R"(/.*)", handler);
    http_->server.Put(R"(/.*)", handler);
    http_->server.Delete(R"(/.*)", handler);
}

void TileServer::listen(const std::string& bind, int port)
{
    install_routes();
    if (!http_->server.listen(bind, port)) {
        throw Error("cannot listen on " + bind + ":" + std::to_string(port));
    }
}

int TileServer::bind_any(const std::string& bind)
{
    install_routes();
    const int port = http_->server.bind_to_any_port(bind);
    if (port < 0) {
        throw Error("cannot bind " + bind);
    }
    return port;
}

void TileServer::run()
{
    install_routes();
    http_->server.listen_after_bind();
}

void TileServer::stop()
{
    if (http_) {
        http_->server.stop();
    }
}

bool TileServer::running() const
{
    return http_ && http_->server.is_running();
}

}  // namespace hextiles
