#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "hextiles/cli.hpp"
#include "hextiles/error.hpp"
#include "hextiles/server.hpp"
#include "oracle.hpp"

using namespace hextiles;

namespace {

TileSet maup_tileset(const std::string& which, const std::string& name)
{
    const std::string dir = hextiles::testing::data_dir() + "/maup/";
    TilesetConfig c = load_tileset_config(dir + "config.toml");
    c.name = name;
    return compile(load_dataset(dir + which + ".geojson", dir + "variables.toml"), c, {std::string("t")});
}

const TileServer& server()
{
    static const TileServer s({maup_tileset("high_variance", "high"), maup_tileset("low_variance", "low")});
    return s;
}

HttpResponse get(const std::string& path, std::map<std::string, std::string> query = {},
                 std::map<std::string, std::string> headers = {})
{
    HttpRequest r;
    r.path = path;
    r.query = std::move(query);
    r.headers = std::move(headers);
    return server().handle(r);
}

ojson body(const HttpResponse& r)
{
    return ojson::parse(r.body);
}

}  // namespace

TEST_CASE("listing summarizes every tileset")
{
    const auto r = get("/tilesets");
    CHECK(r.status == 200);
    CHECK(r.headers.at("Content-Type") == "application/json");
    CHECK(r.headers.at("Access-Control-Allow-Origin") == "*");
    const auto j = body(r);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["name"] == "high");
    CHECK(j[0]["resolutions"] == ojson::array({3, 5}));
    CHECK(j[0]["variables"].size() == 3);
    CHECK(j[0]["variables"][0]["domain"].size() == 2);
    CHECK(j[0]["zoom_policy"]["delta"] == 1.5);
    CHECK(j[1]["content_hash"].get<std::string>().size() == 64);
}

TEST_CASE("tileset meta carries the legend")
{
    const auto j = body(get("/tilesets/low"));
    CHECK(j["name"] == "low");
    CHECK(j["encoding"]["palette"]["bins_per_tier"] == ojson::array({8, 4, 2}));
    CHECK(j["encoding"]["palette"]["colors"].size() == 3);
    CHECK(j["encoding"]["icons"] == "demand");
}

TEST_CASE("tiles endpoint returns one resolution with geometry")
{
    const auto r = get("/tilesets/low/tiles", {{"resolution", "4"}});
    REQUIRE(r.status == 200);
    const auto j = body(r);
    CHECK(j["resolution"] == 4);
    CHECK(j["count"] == j["tiles"].size());
    CHECK(j["count"].get<std::size_t>() == server().tilesets().at("low").layer(4).size());
    const auto& t = j["tiles"][0];
    CHECK(t["vertices"].size() == 6);
    CHECK(t["vertices_lonlat"].size() == 6);
    CHECK(t["center"].size() == 2);
    CHECK(t.contains("base"));
    CHECK(t.contains("ring"));
    CHECK(t.contains("icons"));
    CHECK(t["aggregates"].contains("score"));
}

TEST_CASE("bbox narrows the tiles to centers inside it")
{
    const auto all = body(get("/tilesets/low/tiles", {{"resolution", "4"}}));
    const auto some = body(get("/tilesets/low/tiles", {{"resolution", "4"}, {"bbox", "-3000,-3000,3000,3000"}}));
    CHECK(some["count"].get<int>() < all["count"].get<int>());
    CHECK(some["count"].get<int>() >= 1);
    for (const auto& t : some["tiles"]) {
        CHECK(std::abs(t["center"][0].get<double>()) <= 3000.0);
        CHECK(std::abs(t["center"][1].get<double>()) <= 3000.0);
    }
    const auto swapped = body(get("/tilesets/low/tiles", {{"resolution", "4"}, {"bbox", "3000,3000,-3000,-3000"}}));
    CHECK(swapped["count"] == some["count"]);
}

TEST_CASE("bad tile queries are client errors")
{
    CHECK(get("/tilesets/low/tiles").status == 400);
    const auto out = get("/tilesets/low/tiles", {{"resolution", "9"}});
    CHECK(out.status == 400);
    CHECK(body(out)["valid_range"] == ojson::array({3, 5}));
    CHECK(get("/tilesets/low/tiles", {{"resolution", "four"}}).status == 400);
    CHECK(get("/tilesets/low/tiles", {{"resolution", "4"}, {"bbox", "1,2,3"}}).status == 400);
    CHECK(get("/tilesets/low/tiles", {{"resolution", "4"}, {"bbox", "a,b,c,d"}}).status == 400);
}

TEST_CASE("cell drill-down")
{
    const auto r = get("/tilesets/high/cell/r4:0:0");
    REQUIRE(r.status == 200);
    const auto j = body(r);
    CHECK(j["cell"] == "r4:0:0");
    CHECK(j["tile"]["aggregates"]["score"]["variance"].get<double>() == doctest::Approx(900.0));
    CHECK(get("/tilesets/high/cell/r4:9999:0").status == 404);
    CHECK(get("/tilesets/high/cell/garbage").status == 400);
    CHECK(get("/tilesets/high/cell/r40:0:0").status == 400);
}

TEST_CASE("unknown names, paths and methods")
{
    CHECK(get("/tilesets/nope").status == 404);
    CHECK(get("/tilesets/nope/tiles", {{"resolution", "4"}}).status == 404);
    CHECK(get("/").status == 404);
    CHECK(get("/tilesets/low/unknown").status == 404);
    HttpRequest post;
    post.method = "POST";
    post.path = "/tilesets";
    CHECK(server().handle(post).status == 405);
}

TEST_CASE("etags follow the content hash and allow revalidation")
{
    const auto first = get("/tilesets/low");
    const std::string etag = first.headers.at("ETag");
    CHECK(etag == "\"" + server().tilesets().at("low").meta.content_hash + "\"");
    const auto again = get("/tilesets/low/tiles", {{"resolution", "3"}}, {{"If-None-Match", etag}});
    CHECK(again.status == 304);
    CHECK(again.body.empty());
    CHECK(get("/tilesets/low", {}, {{"If-None-Match", "\"stale\""}}).status == 200);
    CHECK(get("/tilesets").headers.at("ETag") != etag);
    CHECK(get("/tilesets/high").headers.at("ETag") != etag);
}

TEST_CASE("cors header can be switched off")
{
    const TileServer quiet({maup_tileset("low_variance", "low")}, false);
    HttpRequest r;
    r.path = "/tilesets";
    CHECK_FALSE(quiet.handle(r).headers.contains("Access-Control-Allow-Origin"));
}

TEST_CASE("duplicate tileset names conflict")
{
    CHECK_THROWS_AS(TileServer({maup_tileset("low_variance", "x"), maup_tileset("high_variance", "x")}),
                    ConflictError);
}

TEST_CASE("round trip over a socket")
{
    TileServer live({maup_tileset("low_variance", "low")});
    const int port = live.bind_any("127.0.0.1");
    std::thread worker([&] { live.run(); });
    for (int i = 0; i < 200 && !live.running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    httplib::Client client("127.0.0.1", port);
    const auto list = client.Get("/tilesets");
    REQUIRE(list);
    CHECK(list->status == 200);
    CHECK(list->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(ojson::parse(list->body)[0]["name"] == "low");
    const auto tiles = client.Get("/tilesets/low/tiles?resolution=4&bbox=-3000,-3000,3000,3000");
    REQUIRE(tiles);
    CHECK(tiles->status == 200);
    CHECK(ojson::parse(tiles->body)["count"].get<int>() >= 1);
    const auto bad = client.Get("/tilesets/low/tiles?resolution=12");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    const auto cached = client.Get("/tilesets/low", {{"If-None-Match", list->get_header_value("ETag")}});
    REQUIRE(cached);
    CHECK(cached->status == 200);
    const auto posted = client.Post("/tilesets", "", "text/plain");
    REQUIRE(posted);
    CHECK(posted->status == 405);
    live.stop();
    worker.join();
}

TEST_CASE("listing size follows the number of tilesets")
{
    const TileServer empty(std::vector<TileSet>{});
    HttpRequest r;
    r.path = "/tilesets";
    const auto none = empty.handle(r);
    CHECK(none.status == 200);
    CHECK(ojson::parse(none.body) == ojson::array());
    const TileServer one({maup_tileset("low_variance", "solo")});
    CHECK(ojson::parse(one.handle(r).body).size() == 1);
}

TEST_CASE("served meta and cells match the inspect command")
{
    const TileSet& low = server().tilesets().at("low");
    const auto path = std::filesystem::temp_directory_path() / "hextiles_server_inspect.hxt";
    save(low, path);
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(run_cli({"inspect", path.string()}, out, err) == 0);
    const std::string text = out.str();
    CHECK(ojson::parse(text.substr(0, text.find('\n'))) == body(get("/tilesets"))[1]);

    std::ostringstream cell_out;
    REQUIRE(run_cli({"inspect", path.string(), "--cell", "r4:1:0"}, cell_out, err) == 0);
    CHECK(ojson::parse(cell_out.str()) == body(get("/tilesets/low/cell/r4:1:0")));
    std::filesystem::remove(path);
}

TEST_CASE("bbox filtering agrees with filtering the full layer")
{
    const auto all = body(get("/tilesets/low/tiles", {{"resolution", "5"}}));
    const double x0 = -7000, y0 = -2500, x1 = 4000, y1 = 9000;
    ojson expected = ojson::array();
    for (const auto& t : all["tiles"]) {
        const double x = t["center"][0].get<double>();
        const double y = t["center"][1].get<double>();
        if (x >= x0 && x <= x1 && y >= y0 && y <= y1) {
            expected.push_back(t);
        }
    }
    const auto got = body(get("/tilesets/low/tiles", {{"resolution", "5"}, {"bbox", "-7000,-2500,4000,9000"}}));
    CHECK(got["tiles"] == expected);

    const auto nothing = get("/tilesets/low/tiles", {{"resolution", "5"}, {"bbox", "9e8,9e8,9.1e8,9.1e8"}});
    CHECK(nothing.status == 200);
    CHECK(body(nothing)["tiles"] == ojson::array());
    CHECK(body(nothing)["count"] == 0);
}

TEST_CASE("drill-down links stay within the tileset")
{
    std::set<std::string> finer;
    const auto layer = body(get("/tilesets/low/tiles", {{"resolution", "5"}}));
    for (const auto& t : layer["tiles"]) {
        finer.insert(t["cell"].get<std::string>());
    }
    const auto j = body(get("/tilesets/low/cell/r4:1:0"));
    REQUIRE(j["children"].size() > 0);
    for (const auto& child : j["children"]) {
        CHECK(finer.contains(child.get<std::string>()));
        const auto down = get("/tilesets/low/cell/" + child.get<std::string>());
        REQUIRE(down.status == 200);
        CHECK(body(down)["parent"] == "r4:1:0");
    }
    CHECK(get("/tilesets/low/cell/r5:3").status == 400);
}
