#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hextiles/error.hpp"
#include "hextiles/tileset.hpp"
#include "oracle.hpp"

using namespace hextiles;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"(
[tileset]
name = "demo"

[grid]
e0 = 65536.0
max_resolution = 10
resolutions = [3, 4]
z0 = 5.0
delta = 2.0
min_coverage = 0.1

[encoding]
base = "value"
ring = "context"
icons = "demand"
height = "value"
icon_unit = 0.15
icon_max = 7
icon_symbol = "drop"
ring_thickness_range = [0.05, 0.2]
icon_opacity_range = [0.25, 1.0]
ring_ramp = ["#ffffff", "#000000"]
height_max = 1000.0
height_reference_resolution = 4

[encoding.palette]
tiers = 2
bins_per_tier = [6, 3]
diverging = false

[[variables.variable]]
name = "value"
domain = [0.0, 100.0]

[[variables.variable]]
name = "context"
domain = [0.0, 100.0]

[[variables.variable]]
name = "demand"
domain = [0.0, 1.5]
zero_anchored = true
)";

Dataset maup(const std::string& which)
{
    const std::string dir = hextiles::testing::data_dir() + "/maup/";
    return load_dataset(dir + which + ".geojson", dir + "variables.toml");
}

TilesetConfig maup_config()
{
    return load_tileset_config(hextiles::testing::data_dir() + "/maup/config.toml");
}

struct TempFile {
    fs::path path = fs::temp_directory_path() / ("hextiles_test_" + std::to_string(std::rand()) + ".hxt");
    ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("tileset config reads every field")
{
    const TilesetConfig c = parse_tileset_config(kConfig);
    CHECK(c.name == "demo");
    CHECK(c.grid.max_resolution == 10);
    CHECK(c.grid.r_min == 3);
    CHECK(c.grid.r_max == 4);
    CHECK(c.grid.zoom.z0 == 5.0);
    CHECK(c.grid.zoom.delta == 2.0);
    CHECK(c.grid.min_coverage == 0.1);
    const EncodingConfig& e = c.encoding;
    CHECK(e.base_variable == "value");
    CHECK(e.height_variable == "value");
    CHECK(e.icon_unit == 0.15);
    CHECK(e.icon_max == 7);
    CHECK(e.icon_symbol == "drop");
    CHECK(e.ring_thickness_min == 0.05);
    CHECK(e.icon_opacity_min == 0.25);
    CHECK(e.ring_ramp.stops().size() == 2);
    CHECK(e.height_reference_resolution == 4);
    CHECK(e.palette.bins_per_tier == std::vector<int>{6, 3});
    CHECK(e.palette.colors[0].size() == 6);
    CHECK(c.variables.size() == 3);
    CHECK(validate_config(c, c.variables).empty());
}

TEST_CASE("defaults apply when keys are omitted")
{
    const TilesetConfig c = parse_tileset_config("[encoding]\nbase = \"a\"\nring = \"b\"\nicons = \"c\"\n");
    CHECK(c.grid.e0 == 65536.0);
    CHECK(c.grid.r_min == 3);
    CHECK(c.grid.r_max == 5);
    CHECK(c.grid.zoom.z0 == 6.0);
    CHECK(c.grid.zoom.delta == 1.5);
    CHECK(c.grid.min_coverage == 0.05);
    CHECK(c.encoding.icon_max == 9);
    CHECK(c.encoding.palette.bins_per_tier == std::vector<int>{8, 4, 2});
    CHECK(c.encoding.ring_thickness_min == 0.04);
    CHECK(c.encoding.ring_thickness_max == 0.16);
    CHECK(c.encoding.icon_opacity_min == 0.3);
}

TEST_CASE("config errors are collected into one report")
{
    try {
        parse_tileset_config(R"(
[tilesets]
name = "x"
[grid]
resolution = [3, 5]
delta = "fast"
[encoding]
base = "a"
icon_opacity_range = [0.3, 0.9]
colour = "red"
[encoding.palette]
bins_per_tier = [4, 0]
)");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems().size() == 6);
    }
}

TEST_CASE("semantic validation of a parsed config")
{
    TilesetConfig c = parse_tileset_config(kConfig);
    c.grid.r_min = 5;
    c.grid.r_max = 4;
    c.grid.zoom.delta = 0.0;
    c.grid.min_coverage = 2.0;
    c.name.clear();
    c.encoding.icon_variable = "context";
    const auto problems = validate_config(c, c.variables);
    CHECK(problems.size() >= 6);
}

TEST_CASE("a non zero-anchored icon variable is rejected by validation and compile")
{
    TilesetConfig c = maup_config();
    c.encoding.icon_variable = "context";
    c.encoding.ring_variable = "demand";
    const Dataset ds = maup("low_variance");
    bool flagged = false;
    for (const auto& p : validate_config(c, ds.variables())) {
        flagged = flagged || p.find("zero_anchored") != std::string::npos;
    }
    CHECK(flagged);
    CHECK_THROWS_AS(compile(ds, c), ConfigError);
}

TEST_CASE("zoom policy bands")
{
    TileSetMeta m;
    m.r_min = 3;
    m.r_max = 5;
    CHECK(resolution_for_zoom(0.0, m) == 3);
    CHECK(resolution_for_zoom(6.0, m) == 3);
    CHECK(resolution_for_zoom(7.49, m) == 3);
    CHECK(resolution_for_zoom(7.5, m) == 4);
    CHECK(resolution_for_zoom(9.0, m) == 5);
    CHECK(resolution_for_zoom(22.0, m) == 5);
}

TEST_CASE("compile filters by coverage and records counts")
{
    const Dataset ds = maup("high_variance");
    TilesetConfig c = maup_config();
    CompileOptions o;
    o.created_at = "2024-01-01T00:00:00Z";
    const TileSet ts = compile(ds, c, o);
    CHECK(ts.meta.name == "maup");
    CHECK(ts.meta.projection_id == "web-mercator");
    CHECK(ts.meta.created_at == "2024-01-01T00:00:00Z");
    CHECK(ts.meta.content_hash.size() == 64);
    for (int r = 3; r <= 5; ++r) {
        CHECK(ts.meta.tile_counts.at(r) == ts.layer(r).size());
        CHECK(std::is_sorted(ts.layer(r).begin(), ts.layer(r).end(),
                             [](const auto& a, const auto& b) { return a.cell < b.cell; }));
        for (const auto& t : ts.layer(r)) {
            CHECK(t.coverage_fraction >= c.grid.min_coverage);
        }
    }
    const EncodedTile* origin = ts.find({4, 0, 0});
    REQUIRE(origin);
    CHECK(origin->aggregates.find("score")->weighted_mean == doctest::Approx(70.0));
    CHECK_FALSE(ts.find({4, 100000, 0}));
    CHECK(ts.layer(9).empty());

    c.grid.min_coverage = 1.0;
    std::vector<std::string> warnings;
    const TileSet strict = compile(ds, c, o, &warnings);
    CHECK(strict.tile_count() < ts.tile_count());
}

TEST_CASE("an empty compile warns")
{
    TilesetConfig c = maup_config();
    const Dataset ds = maup("high_variance");
    VariableFile vf;
    vf.variables = ds.variables();
    const Dataset empty = parse_dataset(R"({"type":"FeatureCollection","features":[]})", vf);
    std::vector<std::string> warnings;
    const TileSet ts = compile(empty, c, {}, &warnings);
    CHECK(ts.tile_count() == 0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("empty") != std::string::npos);
}

TEST_CASE("serialize and load round-trip exactly")
{
    const TileSet ts = compile(maup("low_variance"), maup_config(), {std::string("t0")});
    const std::string bytes = serialize(ts);
    CHECK(bytes.rfind("HEXT 1\n", 0) == 0);
    const TileSet back = deserialize(bytes);
    CHECK(back == ts);
    CHECK(serialize(back) == bytes);

    TempFile tmp;
    save(ts, tmp.path);
    CHECK(load(tmp.path) == ts);
}

TEST_CASE("the content hash ignores the timestamp but not the data")
{
    const Dataset ds = maup("low_variance");
    const TileSet a = compile(ds, maup_config(), {std::string("one")});
    const TileSet b = compile(ds, maup_config(), {std::string("two")});
    CHECK(a.meta.content_hash == b.meta.content_hash);
    CHECK(serialize(a) != serialize(b));
    const TileSet c = compile(maup("high_variance"), maup_config(), {std::string("one")});
    CHECK(a.meta.content_hash != c.meta.content_hash);
    TileSet d = a;
    d.meta.name = "renamed";
    CHECK(compute_content_hash(d) != a.meta.content_hash);
}

TEST_CASE("damaged files are rejected")
{
    const TileSet ts = compile(maup("low_variance"), maup_config(), {std::string("t0")});
    const std::string bytes = serialize(ts);

    CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() - 1)), CorruptionError);
    CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() / 2)), CorruptionError);
    CHECK_THROWS_AS(deserialize("NOPE 1\n"), CorruptionError);
    CHECK_THROWS_AS(deserialize(""), CorruptionError);

    std::string v2 = bytes;
    v2[5] = '2';
    CHECK_THROWS_AS(deserialize(v2), UnsupportedVersion);

    // Flip one digit inside a tile line.
    std::string flipped = bytes;
    const auto pos = flipped.find("\"mean\":", flipped.find("\n", flipped.find("\n") + 1));
    REQUIRE(pos != std::string::npos);
    char& digit = flipped[pos + 8];
    digit = digit == '1' ? '2' : '1';
    CHECK_THROWS_AS(deserialize(flipped), CorruptionError);

    // Drop one tile line.
    const auto l2 = bytes.find('\n', bytes.find('\n') + 1);
    const auto l3 = bytes.find('\n', l2 + 1);
    CHECK_THROWS_AS(deserialize(bytes.substr(0, l2 + 1) + bytes.substr(l3 + 1)), CorruptionError);

    CHECK_THROWS_AS(load("/nonexistent/file.hxt"), Error);
}

TEST_CASE("canonical dump is compact and round-trips doubles")
{
    ojson j;
    j["a"] = 0.1;
    j["b"] = -0.0;
    j["c"] = 3;
    j["d"] = {1.0, "x", nullptr, true};
    const std::string s = canonical_dump(j);
    CHECK(s == R"({"a":0.10000000000000001,"b":0,"c":3,"d":[1,"x",null,true]})");
    CHECK(ojson::parse(s)["a"].get<double>() == 0.1);
}

TEST_CASE("cell reports name parent and present children")
{
    const TileSet ts = compile(maup("low_variance"), maup_config(), {std::string("t0")});
    const auto r = cell_report(ts, {4, 0, 0});
    REQUIRE(r);
    CHECK((*r)["cell"] == "r4:0:0");
    CHECK((*r)["parent"] == "r3:0:0");
    CHECK((*r)["children"].size() == 7);
    CHECK((*r)["tile"]["aggregates"]["score"]["features"] == 2);
    CHECK_FALSE(cell_report(ts, {4, 999, 999}));
    const auto top = cell_report(ts, {3, 0, 0});
    REQUIRE(top);
    CHECK((*top)["parent"] == "r2:0:0");
}

TEST_CASE("a uniform dataset encodes every tile the same way")
{
    const Dataset src = maup("high_variance");
    std::vector<Feature> features = src.features();
    for (auto& f : features) {
        for (auto& [name, value] : f.attributes) {
            value = name == "demand" ? 0.6 : 55.0;
        }
    }
    const TileSet ts = compile(Dataset::create(features, src.variables(), src.projection_id()), maup_config(), {});
    REQUIRE(ts.tile_count() > 0);
    for (int r = ts.meta.r_min; r <= ts.meta.r_max; ++r) {
        for (const auto& t : ts.layer(r)) {
            const EncodedTile& first = ts.layer(ts.meta.r_min).front();
            CHECK(t.base == first.base);
            CHECK(t.ring == first.ring);
            CHECK(t.icons == first.icons);
        }
    }
}

TEST_CASE("raising min_coverage never adds tiles")
{
    const Dataset ds = maup("low_variance");
    TilesetConfig c = maup_config();
    std::size_t previous = compile(ds, c, {}).tile_count();
    REQUIRE(c.grid.min_coverage > 0.0);
    for (double m = 2.0 * c.grid.min_coverage; m <= 1.0; m *= 2.0) {
        c.grid.min_coverage = m;
        const std::size_t n = compile(ds, c, {}).tile_count();
        CHECK(n <= previous);
        previous = n;
    }
}

TEST_CASE("zoom policy endpoints")
{
    TileSetMeta m;
    m.r_min = 2;
    m.r_max = 7;
    m.zoom = {4.0, 1.25};
    CHECK(resolution_for_zoom(m.zoom.z0, m) == m.r_min);
    CHECK(resolution_for_zoom(m.zoom.z0 + m.zoom.delta * (m.r_max - m.r_min), m) == m.r_max);
}
