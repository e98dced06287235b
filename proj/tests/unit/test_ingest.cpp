#include <doctest.h>

#include <string>

#include "hextiles/error.hpp"
#include "hextiles/ingest.hpp"
#include "oracle.hpp"

using namespace hextiles;

namespace {

const char* kSpec = R"(
projection = "planar"

[[variable]]
name = "rate"
domain = [0.0, 100.0]
units_label = "%"

[[variable]]
name = "people"
kind = "extensive"
domain = [0.0, 1e6]
zero_anchored = true
)";

std::string square_feature(const std::string& id, double x0, double side, const std::string& props)
{
    const auto s = [](double v) { return std::to_string(v); };
    return R"({"type":"Feature","id":")" + id + R"(","properties":{)" + props +
           R"(},"geometry":{"type":"Polygon","coordinates":[[[)" + s(x0) + ",0],[" + s(x0 + side) + ",0],[" +
           s(x0 + side) + "," + s(side) + "],[" + s(x0) + "," + s(side) + "],[" + s(x0) + ",0]]]}}";
}

std::string collection(const std::vector<std::string>& features)
{
    std::string out = R"({"type":"FeatureCollection","features":[)";
    for (std::size_t i = 0; i < features.size(); ++i) {
        out += (i ? "," : "") + features[i];
    }
    return out + "]}";
}

}  // namespace

TEST_CASE("variable files declare kinds, domains and a projection")
{
    const VariableFile vf = parse_variable_file(kSpec);
    CHECK(vf.projection_id == "planar");
    REQUIRE(vf.variables.size() == 2);
    CHECK(vf.variables[0].kind == VariableKind::intensive);
    CHECK(vf.variables[0].units_label == "%");
    CHECK(vf.variables[1].kind == VariableKind::extensive);
    CHECK(vf.variables[1].zero_anchored);
    CHECK(vf.variables[1].domain_max == 1e6);
    CHECK(vf.variables[0].reference_sigma() == 25.0);
}

TEST_CASE("variable file problems are all reported")
{
    try {
        parse_variable_file(R"(
[[variable]]
name = "a"
domain = [1.0, 0.0]
colour = "red"

[[variable]]
name = "b"
domain = [1.0, 2.0]
zero_anchored = true
density_weight_of = "missing"
)");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.problems().size() >= 1);
        const std::string all = e.what();
        CHECK(all.find("colour") != std::string::npos);
    }
    try {
        parse_variable_file(R"(
[[variable]]
name = "b"
domain = [1.0, 2.0]
zero_anchored = true
density_weight_of = "missing"
sigma_ref = -1.0
)");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.problems().size() == 3);
    }
    CHECK_THROWS_WITH_AS(parse_variable_file("[[variable]]\nname = \"x\"\nkind = \"rate\"\ndomain = [0, 1]\n"),
                         doctest::Contains("unknown variable kind 'rate'"), ValidationError);
}

TEST_CASE("geojson polygons become features with attributes")
{
    const Dataset ds = parse_dataset(
        collection({square_feature("a", 0, 10, R"("rate": 40, "people": 500, "name": "Alpha")"),
                    square_feature("b", 20, 5, R"("rate": null, "people": 20)")}),
        parse_variable_file(kSpec), "test");
    REQUIRE(ds.features().size() == 2);
    CHECK(ds.projection_id() == "planar");
    const Feature& a = ds.features()[0];
    CHECK(a.id == "a");
    CHECK(a.source == "test");
    CHECK(a.area() == doctest::Approx(100.0));
    CHECK(a.parts[0].outer.size() == 4);
    CHECK(a.attribute("rate") == 40.0);
    CHECK_FALSE(ds.features()[1].attribute("rate"));
    REQUIRE(ds.bbox());
    CHECK(ds.bbox()->max.x == doctest::Approx(25.0));
    CHECK(ds.diagnostics().warnings.empty());
}

TEST_CASE("multipolygons, holes and lon/lat projection")
{
    const std::string geo = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"id":"m1","v":1},"geometry":{"type":"MultiPolygon","coordinates":[
        [[[0,0],[1,0],[1,1],[0,1],[0,0]],[[0.25,0.25],[0.25,0.75],[0.75,0.75],[0.75,0.25],[0.25,0.25]]],
        [[[2,0],[3,0],[3,1],[2,0]]]
      ]}}]})";
    VariableFile vf;
    VariableSpec v;
    v.name = "v";
    v.domain_max = 10.0;
    vf.variables = {v};
    const Dataset ds = parse_dataset(geo, vf);
    REQUIRE(ds.features().size() == 1);
    const Feature& f = ds.features()[0];
    CHECK(f.id == "m1");
    CHECK(f.parts.size() == 2);
    CHECK(f.parts[0].holes.size() == 1);
    const double deg = 6378137.0 * 3.14159265358979323846 / 180.0;
    CHECK(f.parts[1].outer[1].x == doctest::Approx(3.0 * deg));
    CHECK(f.area() > 0.0);
}

TEST_CASE("values outside the domain or of the wrong type are counted and dropped")
{
    const Dataset ds = parse_dataset(collection({square_feature("a", 0, 10, R"("rate": 140, "people": 5)"),
                                                 square_feature("b", 20, 5, R"("rate": "high", "people": true)"),
                                                 square_feature("c", 40, 5, R"("rate": -1)")}),
                                     parse_variable_file(kSpec), "t");
    CHECK(ds.diagnostics().out_of_domain == 2);
    CHECK(ds.diagnostics().non_numeric == 2);
    CHECK(ds.diagnostics().warnings.size() == 2);
    CHECK_FALSE(ds.features()[0].attribute("rate"));
    CHECK(ds.features()[0].attribute("people") == 5.0);
}

TEST_CASE("undeclared attributes are rejected")
{
    CHECK_THROWS_AS(parse_dataset(collection({square_feature("a", 0, 10, R"("rate": 1, "colour": 3)")}),
                                  parse_variable_file(kSpec)),
                    ValidationError);
}

TEST_CASE("zero-area features are skipped with a warning")
{
    const Dataset ds = parse_dataset(
        collection({square_feature("a", 0, 10, R"("rate": 1)"), square_feature("flat", 0, 0, R"("rate": 1)"),
                    R"({"type":"Feature","id":"nogeom","properties":{},"geometry":null})"}),
        parse_variable_file(kSpec));
    CHECK(ds.features().size() == 1);
    CHECK(ds.diagnostics().skipped_features == 2);
    CHECK(ds.diagnostics().warnings.size() == 2);
}

TEST_CASE("malformed input names the location")
{
    const VariableFile vf = parse_variable_file(kSpec);
    try {
        parse_dataset("{\"type\":\n\"FeatureCollection\",\n\"features\": [,]}", vf, "bad");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad:3:") == 0);
    }
    CHECK_THROWS_AS(parse_dataset(R"({"type":"Feature"})", vf), ParseError);
    CHECK_THROWS_AS(parse_dataset(collection({R"({"type":"Feature","id":"x","geometry":{"type":"Point","coordinates":[0,0]}})"}), vf),
                    ParseError);
    CHECK_THROWS_AS(parse_dataset(collection({R"({"type":"Feature","id":"x","geometry":{"type":"Polygon"}})"}), vf),
                    ParseError);
    CHECK_THROWS_AS(parse_dataset(collection({square_feature("a", 0, 1, ""), square_feature("a", 5, 1, "")}), vf),
                    ValidationError);
}

TEST_CASE("Dataset::create validates its inputs")
{
    VariableSpec v;
    v.name = "v";
    Feature f;
    f.id = "f";
    f.parts.push_back({{{0, 0}, {1, 0}, {1, 1}}, {}});
    f.attributes["v"] = 0.5;
    CHECK_NOTHROW(Dataset::create({f}, {v}, "planar"));
    CHECK_THROWS_AS(Dataset::create({f}, {v}, "lambert"), InvalidArgument);
    Feature g = f;
    g.attributes["w"] = 1.0;
    CHECK_THROWS_AS(Dataset::create({g}, {v}, "planar"), ValidationError);
    Feature h = f;
    h.parts.clear();
    CHECK_THROWS_AS(Dataset::create({h}, {v}, "planar"), ValidationError);
    CHECK(Dataset().empty());
}

TEST_CASE("merging layers with different discretizations")
{
    const VariableFile vf = parse_variable_file(kSpec);
    const Dataset a = parse_dataset(collection({square_feature("a", 0, 10, R"("rate": 1)")}), vf, "layer_a");
    VariableFile other;
    other.projection_id = "planar";
    VariableSpec level;
    level.name = "level";
    other.variables = {level};
    const Dataset b = parse_dataset(collection({square_feature("b", 3, 4, R"("level": 0.5)")}), other, "layer_b");

    const Dataset m = merge_datasets(a, b);
    CHECK(m.features().size() == 2);
    CHECK(m.variables().size() == 3);
    CHECK(m.features()[1].source == "layer_b");
    CHECK(m.find_variable("level"));

    CHECK(merge_datasets(a, Dataset()).features().size() == 1);
    CHECK(merge_datasets(Dataset(), b).features().size() == 1);
    CHECK_THROWS_AS(merge_datasets(a, a), ConflictError);

    VariableFile merc = other;
    merc.projection_id = "web-mercator";
    const Dataset c = parse_dataset(collection({square_feature("c", 0, 1, R"("level": 0.5)")}), merc);
    CHECK_THROWS_AS(merge_datasets(a, c), IncompatibleError);
}

TEST_CASE("bundled datasets load")
{
    const std::string dir = hextiles::testing::data_dir();
    const Dataset e = load_dataset(dir + "/election/election.geojson", dir + "/election/variables.toml");
    CHECK(e.features().size() == 168);
    CHECK(e.variables().size() == 3);
    CHECK(e.features()[0].source == "election");
    CHECK(e.diagnostics().out_of_domain == 0);
    const Dataset w = merge_datasets(
        load_dataset(dir + "/water/demand_units.geojson", dir + "/water/demand_units.toml"),
        load_dataset(dir + "/water/groundwater.geojson", dir + "/water/groundwater.toml"));
    CHECK(w.variables().size() == 3);
    CHECK(w.features().size() == 72 + 20);
}
