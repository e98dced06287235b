#include <doctest.h>

#include <string>

#include "hextiles/config_text.hpp"
#include "hextiles/error.hpp"

using namespace hextiles;

TEST_CASE("tables, dotted keys and scalar types")
{
    const auto j = parse_config_text(R"(
title = "demo"   # trailing comment
count = 3
ratio = -0.25
big = 1_000
exp = 1.5e3
on = true
path = 'C:\raw\path'

[grid]
resolutions = [3, 5]
zoom.z0 = 6.0

[encoding.palette]
bins_per_tier = [
  8,
  4,  # comments inside arrays
  2,
]
ramp = { stops = ["#000000", "#ffffff"] }
)");
    CHECK(j["title"] == "demo");
    CHECK(j["count"] == 3);
    CHECK(j["count"].is_number_integer());
    CHECK(j["ratio"] == -0.25);
    CHECK(j["big"] == 1000);
    CHECK(j["exp"] == 1500.0);
    CHECK(j["on"] == true);
    CHECK(j["path"] == "C:\\raw\\path");
    CHECK(j["grid"]["resolutions"] == nlohmann::json::array({3, 5}));
    CHECK(j["grid"]["zoom"]["z0"] == 6.0);
    CHECK(j["encoding"]["palette"]["bins_per_tier"].size() == 3);
    CHECK(j["encoding"]["palette"]["ramp"]["stops"][1] == "#ffffff");
}

TEST_CASE("arrays of tables")
{
    const auto j = parse_config_text(R"(
[[variable]]
name = "a"
[[variable]]
name = "b"
domain = [0.0, 1.0]
)");
    REQUIRE(j["variable"].is_array());
    CHECK(j["variable"].size() == 2);
    CHECK(j["variable"][1]["name"] == "b");
}

TEST_CASE("string escapes")
{
    const auto j = parse_config_text(R"(s = "tab\there \"quoted\" \\ done")");
    CHECK(j["s"] == "tab\there \"quoted\" \\ done");
}

TEST_CASE("errors carry source and line")
{
    auto message = [](const char* text) {
        try {
            parse_config_text(text, "cfg.toml");
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("a = 1\nb = \n") == "cfg.toml:2: expected a value");
    CHECK(message("a = 1\na = 2\n").find("cfg.toml:2: duplicate key 'a'") == 0);
    CHECK(message("[grid\n").find("cfg.toml:1:") == 0);
    CHECK(message("x = \"open\n").find("unterminated string") != std::string::npos);
    CHECK(message("x = [1, 2\n").find("cfg.toml:") == 0);
    CHECK(message("x = 1 2\n").find("trailing") != std::string::npos);
    CHECK(message("x = nope\n").find("invalid value") != std::string::npos);
    CHECK(message("a = 1\n[a]\n").find("cfg.toml:2:") == 0);
}

TEST_CASE("missing files are reported")
{
    CHECK_THROWS_AS(read_config_file("/nonexistent/path/config.toml"), ParseError);
}
