#include "hextiles/ingest.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "hextiles/config_text.hpp"
#include "hextiles/error.hpp"
#include "hextiles/projection.hpp"

namespace hextiles {

using nlohmann::json;

namespace {

// Property keys that label a feature rather than measure it.
bool is_reserved_property(const std::string& key)
{
    return key == "id" || key == "name";
}

std::size_t line_of_offset(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

Ring read_ring(const json& coords, const Projection& proj, const std::string& context)
{
    if (!coords.is_array()) {
        throw ParseError(context + ": ring is not an array of positions");
    }
    Ring pts;
    pts.reserve(coords.size());
    for (const auto& pos : coords) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw ParseError(context + ": position is not [lon, lat]");
        }
        try {
            pts.push_back(proj.forward({pos[0].get<double>(), pos[1].get<double>()}));
        } catch (const InvalidArgument& e) {
            throw ParseError(context + ": " + e.what());
        }
    }
    return normalize_ring(pts);
}

std::optional<PolygonGeometry> read_polygon(const json& rings, const Projection& proj, const std::string& context)
{
    if (!rings.is_array() || rings.empty()) {
        throw ParseError(context + ": polygon has no rings");
    }
    PolygonGeometry poly;
    poly.outer = read_ring(rings[0], proj, context);
    if (poly.outer.size() < 3) {
        return std::nullopt;
    }
    for (std::size_t i = 1; i < rings.size(); ++i) {
        Ring hole = read_ring(rings[i], proj, context);
        if (hole.size() >= 3) {
            poly.holes.push_back(std::move(hole));
        }
    }
    return poly;
}

std::string feature_id(const json& feature, const std::string& source, std::size_t index)
{
    const auto from = [](const json& v) -> std::optional<std::string> {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_number_integer()) {
            return std::to_string(v.get<std::int64_t>());
        }
        return std::nullopt;
    };
    if (auto it = feature.find("id"); it != feature.end()) {
        if (auto id = from(*it)) {
            return *id;
        }
    }
    if (auto props = feature.find("properties"); props != feature.end() && props->is_object()) {
        if (auto it = props->find("id"); it != props->end()) {
            if (auto id = from(*it)) {
                return *id;
            }
        }
    }
    return source + "-" + std::to_string(index);
}

template <class T>
T required(const json& node, const char* key, const std::string& context)
{
    auto it = node.find(key);
    if (it == node.end()) {
        throw ValidationError({context + ": missing key '" + key + "'"});
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ValidationError({context + ": key '" + key + "' has the wrong type"});
    }
}

}  // namespace

std::string_view to_string(VariableKind kind)
{
    return kind == VariableKind::extensive ? "extensive" : "intensive";
}

VariableKind variable_kind_from_string(std::string_view text)
{
    if (text == "intensive") {
        return VariableKind::intensive;
    }
    if (text == "extensive") {
        return VariableKind::extensive;
    }
    throw ValidationError({"unknown variable kind '" + std::string(text) + "'"});
}

double VariableSpec::reference_sigma() const
{
    return sigma_ref ? *sigma_ref : (domain_max - domain_min) / 4.0;
}

std::vector<std::string> validate_variables(std::span<const VariableSpec> specs)
{
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (const auto& s : specs) {
        const std::string label = "variable '" + s.name + "'";
        if (s.name.empty()) {
            problems.push_back("variable with empty name");
        }
        if (!names.insert(s.name).second) {
            problems.push_back(label + " declared twice");
        }
        if (!std::isfinite(s.domain_min) || !std::isfinite(s.domain_max) || !(s.domain_min < s.domain_max)) {
            problems.push_back(label + ": domain_min must be below domain_max");
        }
        if (s.zero_anchored && !(s.domain_min <= 0.0 && 0.0 <= s.domain_max)) {
            problems.push_back(label + ": zero_anchored requires 0 within the domain");
        }
        if (s.sigma_ref && !(*s.sigma_ref > 0.0)) {
            problems.push_back(label + ": sigma_ref must be positive");
        }
    }
    for (const auto& s : specs) {
        if (!s.density_weight_of) {
            continue;
        }
        if (*s.density_weight_of == s.name) {
            problems.push_back("variable '" + s.name + "': density_weight_of cannot name itself");
        } else if (!names.contains(*s.density_weight_of)) {
            problems.push_back("variable '" + s.name + "': density_weight_of names undeclared variable '" +
                               *s.density_weight_of + "'");
        }
    }
    return problems;
}

double Feature::area() const
{
    double total = 0.0;
    for (const auto& part : parts) {
        total += polygon_area(part);
    }
    return total;
}

BBox Feature::bounds() const
{
    BBox b = parts.front().bounds();
    for (const auto& part : parts) {
        b.expand(part.bounds());
    }
    return b;
}

std::optional<double> Feature::attribute(const std::string& name) const
{
    if (auto it = attributes.find(name); it != attributes.end()) {
        return it->second;
    }
    return std::nullopt;
}

Dataset Dataset::create(std::vector<Feature> features, std::vector<VariableSpec> variables,
                        std::string projection_id, IngestDiagnostics diagnostics)
{
    Projection::by_id(projection_id);
    std::vector<std::string> problems = validate_variables(variables);
    std::set<std::string> declared;
    for (const auto& v : variables) {
        declared.insert(v.name);
    }
    std::set<std::string> ids;
    std::set<std::string> undeclared;
    for (const auto& f : features) {
        if (!ids.insert(f.id).second) {
            problems.push_back("duplicate feature id '" + f.id + "'");
        }
        if (f.parts.empty() || !(f.area() > 0.0)) {
            problems.push_back("feature '" + f.id + "' has no area");
        }
        for (const auto& [key, value] : f.attributes) {
            if (!declared.contains(key)) {
                undeclared.insert(key);
            } else if (!std::isfinite(value)) {
                problems.push_back("feature '" + f.id + "': attribute '" + key + "' is not finite");
            }
        }
    }
    for (const auto& key : undeclared) {
        problems.push_back("undeclared attribute '" + key + "'");
    }
    if (!problems.empty()) {
        throw ValidationError(std::move(problems));
    }

    Dataset ds;
    ds.features_ = std::move(features);
    ds.variables_ = std::move(variables);
    ds.projection_id_ = std::move(projection_id);
    ds.diagnostics_ = std::move(diagnostics);
    for (const auto& f : ds.features_) {
        const BBox fb = f.bounds();
        if (ds.bbox_) {
            ds.bbox_->expand(fb);
        } else {
            ds.bbox_ = fb;
        }
    }
    return ds;
}

const VariableSpec* Dataset::find_variable(std::string_view name) const
{
    for (const auto& v : variables_) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

VariableSpec variable_from_json(const json& node)
{
    static const std::set<std::string> known{"name", "kind", "domain", "zero_anchored",
                                             "density_weight_of", "units_label", "sigma_ref"};
    if (!node.is_object()) {
        throw ValidationError({"variable entry is not a table"});
    }
    VariableSpec spec;
    spec.name = required<std::string>(node, "name", "variable");
    const std::string context = "variable '" + spec.name + "'";
    std::vector<std::string> problems;
    for (const auto& [key, _] : node.items()) {
        if (!known.contains(key)) {
            problems.push_back(context + ": unknown key '" + key + "'");
        }
    }
    if (!problems.empty()) {
        throw ValidationError(std::move(problems));
    }
    spec.kind = variable_kind_from_string(node.value("kind", std::string("intensive")));
    const auto domain = required<std::vector<double>>(node, "domain", context);
    if (domain.size() != 2) {
        throw ValidationError({context + ": domain must be [min, max]"});
    }
    spec.domain_min = domain[0];
    spec.domain_max = domain[1];
    spec.zero_anchored = node.value("zero_anchored", false);
    if (node.contains("density_weight_of")) {
        spec.density_weight_of = required<std::string>(node, "density_weight_of", context);
    }
    spec.units_label = node.value("units_label", std::string());
    if (node.contains("sigma_ref")) {
        spec.sigma_ref = required<double>(node, "sigma_ref", context);
    }
    return spec;
}

json variable_to_json(const VariableSpec& spec)
{
    json j = {{"name", spec.name},
              {"kind", std::string(to_string(spec.kind))},
              {"domain", {spec.domain_min, spec.domain_max}},
              {"zero_anchored", spec.zero_anchored},
              {"units_label", spec.units_label}};
    if (spec.density_weight_of) {
        j["density_weight_of"] = *spec.density_weight_of;
    }
    if (spec.sigma_ref) {
        j["sigma_ref"] = *spec.sigma_ref;
    }
    return j;
}

VariableFile parse_variable_file(std::string_view text, std::string_view source)
{
    const json root = parse_config_text(text, source);
    VariableFile out;
    std::vector<std::string> problems;
    for (const auto& [key, value] : root.items()) {
        if (key != "projection" && key != "variable") {
            problems.push_back(std::string(source) + ": unknown key '" + key + "'");
        }
    }
    if (root.contains("projection")) {
        if (!root["projection"].is_string()) {
            throw ValidationError({std::string(source) + ": projection must be a string"});
        }
        out.projection_id = root["projection"].get<std::string>();
    }
    if (root.contains("variable")) {
        if (!root["variable"].is_array()) {
            throw ValidationError({std::string(source) + ": use [[variable]] sections"});
        }
        for (const auto& node : root["variable"]) {
            try {
                out.variables.push_back(variable_from_json(node));
            } catch (const ValidationError& e) {
                problems.insert(problems.end(), e.problems().begin(), e.problems().end());
            }
        }
    }
    auto more = validate_variables(out.variables);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) {
        throw ValidationError(std::move(problems));
    }
    return out;
}

VariableFile load_variable_file(const std::filesystem::path& path)
{
    return parse_variable_file(read_text_file(path), path.string());
}

Dataset parse_dataset(std::string_view geojson, const VariableFile& spec, std::string source)
{
    json doc;
    try {
        doc = json::parse(geojson);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ":" + std::to_string(line_of_offset(geojson, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("type", std::string()) != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array()) {
        throw ParseError(source + ": expected a FeatureCollection with a features array");
    }

    const Projection proj = Projection::by_id(spec.projection_id);
    std::map<std::string, const VariableSpec*> declared;
    for (const auto& v : spec.variables) {
        declared[v.name] = &v;
    }

    IngestDiagnostics diag;
    std::vector<Feature> features;
    std::set<std::string> undeclared;
    const auto& list = doc["features"];
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& jf = list[i];
        if (!jf.is_object()) {
            throw ParseError(source + ": feature #" + std::to_string(i) + " is not an object");
        }
        Feature f;
        f.id = feature_id(jf, source, i);
        f.source = source;
        const std::string context = source + ": feature #" + std::to_string(i) + " (id '" + f.id + "')";

        const json* geom = jf.contains("geometry") ? &jf["geometry"] : nullptr;
        if (geom && !geom->is_null()) {
            const std::string type = geom->value("type", std::string());
            if (!geom->contains("coordinates")) {
                throw ParseError(context + ": geometry has no coordinates");
            }
            const json& coords = (*geom)["coordinates"];
            std::vector<std::optional<PolygonGeometry>> polys;
            if (type == "Polygon") {
                polys.push_back(read_polygon(coords, proj, context));
            } else if (type == "MultiPolygon") {
                if (!coords.is_array()) {
                    throw ParseError(context + ": MultiPolygon coordinates are not an array");
                }
                for (const auto& c : coords) {
                    polys.push_back(read_polygon(c, proj, context));
                }
            } else {
                throw ParseError(context + ": unsupported geometry type '" + type + "'");
            }
            for (auto& p : polys) {
                if (p && polygon_area(*p) > 0.0) {
                    f.parts.push_back(std::move(*p));
                }
            }
        }
        if (f.parts.empty()) {
            ++diag.skipped_features;
            diag.warnings.push_back(context + ": zero-area geometry, feature skipped");
            continue;
        }

        if (auto props = jf.find("properties"); props != jf.end() && props->is_object()) {
            for (const auto& [key, value] : props->items()) {
                if (is_reserved_property(key)) {
                    continue;
                }
                auto it = declared.find(key);
                if (it == declared.end()) {
                    undeclared.insert(key);
                    continue;
                }
                if (value.is_null()) {
                    continue;
                }
                if (!value.is_number() || value.is_boolean() || !std::isfinite(value.get<double>())) {
                    ++diag.non_numeric;
                    continue;
                }
                const double v = value.get<double>();
                if (!it->second->in_domain(v)) {
                    ++diag.out_of_domain;
                    continue;
                }
                f.attributes[key] = v;
            }
        }
        features.push_back(std::move(f));
    }

    if (!undeclared.empty()) {
        std::vector<std::string> problems;
        for (const auto& key : undeclared) {
            problems.push_back(source + ": undeclared attribute '" + key + "'");
        }
        throw ValidationError(std::move(problems));
    }
    if (diag.out_of_domain > 0) {
        diag.warnings.push_back(source + ": " + std::to_string(diag.out_of_domain) +
                                " attribute value(s) outside the declared domain marked missing");
    }
    if (diag.non_numeric > 0) {
        diag.warnings.push_back(source + ": " + std::to_string(diag.non_numeric) +
                                " non-numeric attribute value(s) marked missing");
    }
    return Dataset::create(std::move(features), spec.variables, spec.projection_id, std::move(diag));
}

Dataset load_dataset(const std::filesystem::path& geo_file, const std::filesystem::path& spec_file)
{
    const VariableFile spec = load_variable_file(spec_file);
    return parse_dataset(read_text_file(geo_file), spec, geo_file.stem().string());
}

Dataset merge_datasets(const Dataset& a, const Dataset& b)
{
    if (b.empty()) {
        return a;
    }
    if (a.empty()) {
        return b;
    }
    if (a.projection_id() != b.projection_id()) {
        throw IncompatibleError("cannot merge datasets in projections '" + a.projection_id() + "' and '" +
                                b.projection_id() + "'");
    }
    std::vector<VariableSpec> variables = a.variables();
    for (const auto& v : b.variables()) {
        if (a.find_variable(v.name)) {
            throw ConflictError("variable '" + v.name + "' is declared by both datasets");
        }
        variables.push_back(v);
    }
    std::set<std::string> ids;
    for (const auto& f : a.features()) {
        ids.insert(f.id);
    }
    std::vector<Feature> features = a.features();
    for (const auto& f : b.features()) {
        if (ids.contains(f.id)) {
            throw ConflictError("feature id '" + f.id + "' appears in both datasets");
        }
        features.push_back(f);
    }
    IngestDiagnostics diag = a.diagnostics();
    diag.out_of_domain += b.diagnostics().out_of_domain;
    diag.non_numeric += b.diagnostics().non_numeric;
    diag.skipped_features += b.diagnostics().skipped_features;
    diag.warnings.insert(diag.warnings.end(), b.diagnostics().warnings.begin(), b.diagnostics().warnings.end());
    return Dataset::create(std::move(features), std::move(variables), a.projection_id(), std::move(diag));
}

}  // namespace hextiles
