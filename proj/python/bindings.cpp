#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hextiles/aggregate.hpp"
#include "hextiles/cli.hpp"
#include "hextiles/error.hpp"
#include "hextiles/hexgrid.hpp"
#include "hextiles/ingest.hpp"
#include "hextiles/tileset.hpp"

namespace py = pybind11;
using namespace hextiles;

namespace {

py::tuple point(const ProjectedPoint& p)
{
    return py::make_tuple(p.x, p.y);
}

py::object to_python(const ojson& j)
{
    return py::module_::import("json").attr("loads")(canonical_dump(j));
}

py::dict aggregate_dict(const VariableAggregate& a)
{
    py::dict d;
    d["mean"] = a.weighted_mean;
    d["variance"] = a.weighted_variance;
    d["confidence"] = a.confidence;
    d["coverage"] = a.coverage_fraction;
    d["features"] = a.contributing_features;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hextiles, m)
{
    m.doc() = "Hierarchical hexagonal tiles for multivariate polygon data";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error);
    py::register_exception<HierarchyExhausted>(m, "HierarchyExhausted", error);
    py::register_exception<RootHasNoParent>(m, "RootHasNoParent", error);
    py::register_exception<ParseError>(m, "ParseError", error);
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<ConfigError>(m, "ConfigError", validation);
    py::register_exception<ConflictError>(m, "ConflictError", error);
    py::register_exception<IncompatibleError>(m, "IncompatibleError", error);
    py::register_exception<UnsupportedVersion>(m, "UnsupportedVersion", error);
    py::register_exception<CorruptionError>(m, "CorruptionError", error);

    py::class_<HexIndex>(m, "HexIndex")
        .def(py::init<int, std::int64_t, std::int64_t>(), py::arg("resolution"), py::arg("q"), py::arg("r"))
        .def_readonly("resolution", &HexIndex::resolution)
        .def_readonly("q", &HexIndex::q)
        .def_readonly("r", &HexIndex::r)
        .def_static("parse", &HexIndex::parse)
        .def("__str__", &HexIndex::to_string)
        .def("__repr__", [](const HexIndex& h) { return "HexIndex('" + h.to_string() + "')"; })
        .def("__eq__", [](const HexIndex& a, const HexIndex& b) { return a == b; })
        .def("__lt__", [](const HexIndex& a, const HexIndex& b) { return a < b; })
        .def("__hash__", [](const HexIndex& h) { return std::hash<HexIndex>{}(h); });

    py::class_<HexGrid>(m, "HexGrid")
        .def(py::init([](double root_edge, int max_resolution) { return HexGrid(GridSpec{root_edge, max_resolution}); }),
             py::arg("root_edge") = 65536.0, py::arg("max_resolution") = 12)
        .def_property_readonly("max_resolution", &HexGrid::max_resolution)
        .def("edge_length", &HexGrid::edge_length)
        .def("rotation", &HexGrid::rotation)
        .def("cell_area", &HexGrid::cell_area)
        .def("center", [](const HexGrid& g, const HexIndex& h) { return point(g.center(h)); })
        .def("boundary",
             [](const HexGrid& g, const HexIndex& h) {
                 py::list out;
                 for (const auto& v : g.boundary(h).vertices) {
                     out.append(point(v));
                 }
                 return out;
             })
        .def("cell_of_point", [](const HexGrid& g, double x, double y, int res) { return g.cell_of_point({x, y}, res); })
        .def("children",
             [](const HexGrid& g, const HexIndex& h) {
                 const auto c = g.children(h);
                 return std::vector<HexIndex>(c.begin(), c.end());
             })
        .def("parent", &HexGrid::parent)
        .def("cells_covering",
             [](const HexGrid& g, double x0, double y0, double x1, double y1, int res) {
                 return g.cells_covering(BBox{{x0, y0}, {x1, y1}}, res);
             })
        .def_static("neighbors", [](const HexIndex& h) {
            const auto n = HexGrid::neighbors(h);
            return std::vector<HexIndex>(n.begin(), n.end());
        });

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("feature_count", [](const Dataset& d) { return d.features().size(); })
        .def_property_readonly("variables",
                               [](const Dataset& d) {
                                   std::vector<std::string> names;
                                   for (const auto& v : d.variables()) {
                                       names.push_back(v.name);
                                   }
                                   return names;
                               })
        .def_property_readonly("projection", &Dataset::projection_id)
        .def_property_readonly("warnings", [](const Dataset& d) { return d.diagnostics().warnings; });

    m.def("load_dataset", &load_dataset, py::arg("geojson"), py::arg("spec"));
    m.def("merge_datasets", &merge_datasets);
    m.def(
        "aggregate",
        [](const Dataset& d, int resolution, double root_edge) {
            py::dict out;
            for (const auto& rec : aggregate_resolution(d, HexGrid(GridSpec{root_edge, 30}), resolution)) {
                py::dict vars;
                for (const auto& [name, a] : rec.per_variable) {
                    vars[name.c_str()] = aggregate_dict(a);
                }
                out[py::cast(rec.cell)] = vars;
            }
            return out;
        },
        py::arg("dataset"), py::arg("resolution"), py::arg("root_edge") = 65536.0);

    py::class_<TilesetConfig>(m, "TilesetConfig")
        .def_readwrite("name", &TilesetConfig::name)
        .def_property_readonly("resolutions",
                               [](const TilesetConfig& c) { return py::make_tuple(c.grid.r_min, c.grid.r_max); });
    m.def("load_tileset_config", &load_tileset_config);
    m.def("validate_config", [](const TilesetConfig& c) { return validate_config(c, config_variables(c)); });

    py::class_<TileSet>(m, "TileSet")
        .def_property_readonly("name", [](const TileSet& t) { return t.meta.name; })
        .def_property_readonly("content_hash", [](const TileSet& t) { return t.meta.content_hash; })
        .def_property_readonly("created_at", [](const TileSet& t) { return t.meta.created_at; })
        .def_property_readonly("resolutions", [](const TileSet& t) { return py::make_tuple(t.meta.r_min, t.meta.r_max); })
        .def_property_readonly("tile_count", &TileSet::tile_count)
        .def_property_readonly("meta", [](const TileSet& t) { return to_python(meta_to_json(t.meta)); })
        .def("tiles",
             [](const TileSet& t, int resolution) {
                 py::list out;
                 for (const auto& tile : t.layer(resolution)) {
                     out.append(to_python(tile_geometry_json(tile, t.meta.projection_id)));
                 }
                 return out;
             })
        .def("cell",
             [](const TileSet& t, const HexIndex& h) -> py::object {
                 const auto r = cell_report(t, h);
                 return r ? to_python(*r) : py::none();
             })
        .def("resolution_for_zoom", [](const TileSet& t, double z) { return resolution_for_zoom(z, t.meta); })
        .def("serialize", [](const TileSet& t) { return py::bytes(serialize(t)); })
        .def("__eq__", [](const TileSet& a, const TileSet& b) { return a == b; });

    m.def(
        "compile",
        [](const Dataset& d, const TilesetConfig& c, std::optional<std::string> created_at) {
            std::vector<std::string> warnings;
            TileSet ts = compile(d, c, {std::move(created_at)}, &warnings);
            return py::make_tuple(std::move(ts), warnings);
        },
        py::arg("dataset"), py::arg("config"), py::arg("created_at") = py::none());
    m.def("save", &save);
    m.def("load", &load);
    m.def("deserialize", [](const py::bytes& b) { return deserialize(std::string(b)); });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}
