#include "hextiles/tileset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include "hextiles/aggregate.hpp"
#include "hextiles/config_text.hpp"
#include "hextiles/error.hpp"
#include "hextiles/hash.hpp"
#include "hextiles/projection.hpp"

namespace hextiles {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "HEXT";
constexpr int kFormatVersion = 1;

// Typed access to one config section; collects problems instead of throwing
// so a single pass reports everything.
class Section {
public:
    Section(const json* node, std::string name, std::vector<std::string>& problems)
        : node_(node), name_(std::move(name)), problems_(problems)
    {
        if (node_ && !node_->is_object()) {
            problems_.push_back("[" + name_ + "] is not a table");
            node_ = nullptr;
        }
    }

    bool has(const char* key) const { return node_ && node_->contains(key); }

    template <class T>
    T get(const char* key, T fallback) const
    {
        if (!has(key)) {
            return fallback;
        }
        try {
            return (*node_)[key].get<T>();
        } catch (const json::exception&) {
            problems_.push_back(name_ + "." + key + " has the wrong type");
            return fallback;
        }
    }

    template <class T>
    std::optional<T> optional(const char* key) const
    {
        if (!has(key)) {
            return std::nullopt;
        }
        return get<T>(key, T{});
    }

    const json* child(const char* key) const { return has(key) ? &(*node_)[key] : nullptr; }

    void reject_unknown(std::initializer_list<std::string_view> known) const
    {
        if (!node_) {
            return;
        }
        for (const auto& [key, _] : node_->items()) {
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                problems_.push_back("unknown key " + name_ + "." + key);
            }
        }
    }

    std::vector<std::string>& problems() const { return problems_; }
    const std::string& name() const { return name_; }

private:
    const json* node_;
    std::string name_;
    std::vector<std::string>& problems_;
};

std::optional<ColorRamp> read_ramp(const Section& s, const char* key)
{
    const auto hexes = s.optional<std::vector<std::string>>(key);
    if (!hexes) {
        return std::nullopt;
    }
    if (hexes->empty()) {
        s.problems().push_back(s.name() + "." + key + " needs at least one color");
        return std::nullopt;
    }
    std::vector<Rgb> stops;
    for (const auto& h : *hexes) {
        try {
            stops.push_back(Rgb::from_hex(h));
        } catch (const ParseError& e) {
            s.problems().push_back(s.name() + "." + key + ": " + e.what());
            return std::nullopt;
        }
    }
    return ColorRamp(std::move(stops));
}

std::optional<std::array<double, 2>> read_pair(const Section& s, const char* key)
{
    const auto v = s.optional<std::vector<double>>(key);
    if (!v) {
        return std::nullopt;
    }
    if (v->size() != 2) {
        s.problems().push_back(s.name() + "." + key + " must be a two-element array");
        return std::nullopt;
    }
    return std::array<double, 2>{(*v)[0], (*v)[1]};
}

std::string utc_timestamp()
{
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void dump_into(const ojson& v, std::string& out)
{
    switch (v.type()) {
    case ojson::value_t::null: out += "null"; break;
    case ojson::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case ojson::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case ojson::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    case ojson::value_t::number_float: {
        double d = v.get<double>();
        if (d == 0.0) {
            d = 0.0;  // "-0" would reload as integer 0
        }
        if (!std::isfinite(d)) {
            out += "null";
            break;
        }
        char buf[40];
        const auto res = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::general, 17);
        out.append(buf, res.ptr);
        break;
    }
    case ojson::value_t::string: out += v.dump(); break;
    case ojson::value_t::array: {
        out.push_back('[');
        bool first = true;
        for (const auto& e : v) {
            if (!first) {
                out.push_back(',');
            }
            first = false;
            dump_into(e, out);
        }
        out.push_back(']');
        break;
    }
    case ojson::value_t::object: {
        out.push_back('{');
        bool first = true;
        for (const auto& [key, e] : v.items()) {
            if (!first) {
                out.push_back(',');
            }
            first = false;
            out += ojson(key).dump();
            out.push_back(':');
            dump_into(e, out);
        }
        out.push_back('}');
        break;
    }
    default: throw InvalidArgument("cannot serialize binary or discarded JSON values");
    }
}

ojson variable_ojson(const VariableSpec& v)
{
    ojson j;
    j["name"] = v.name;
    j["kind"] = std::string(to_string(v.kind));
    j["domain"] = {v.domain_min, v.domain_max};
    j["zero_anchored"] = v.zero_anchored;
    j["density_weight_of"] = v.density_weight_of ? ojson(*v.density_weight_of) : ojson(nullptr);
    j["units_label"] = v.units_label;
    j["sigma_ref"] = v.sigma_ref ? ojson(*v.sigma_ref) : ojson(nullptr);
    return j;
}

VariableSpec variable_from_ojson(const ojson& j)
{
    VariableSpec v;
    v.name = j.at("name").get<std::string>();
    v.kind = variable_kind_from_string(j.at("kind").get<std::string>());
    v.domain_min = j.at("domain").at(0).get<double>();
    v.domain_max = j.at("domain").at(1).get<double>();
    v.zero_anchored = j.at("zero_anchored").get<bool>();
    if (!j.at("density_weight_of").is_null()) {
        v.density_weight_of = j["density_weight_of"].get<std::string>();
    }
    v.units_label = j.at("units_label").get<std::string>();
    if (!j.at("sigma_ref").is_null()) {
        v.sigma_ref = j["sigma_ref"].get<double>();
    }
    return v;
}

ojson ramp_json(const ColorRamp& ramp)
{
    ojson arr = ojson::array();
    for (const auto& c : ramp.stops()) {
        arr.push_back(c.to_hex());
    }
    return arr;
}

ColorRamp ramp_from_json(const ojson& j)
{
    std::vector<Rgb> stops;
    for (const auto& c : j) {
        stops.push_back(Rgb::from_hex(c.get<std::string>()));
    }
    return ColorRamp(std::move(stops));
}

EncodingConfig encoding_from_json(const ojson& j)
{
    EncodingConfig e;
    e.base_variable = j.at("base").get<std::string>();
    e.ring_variable = j.at("ring").get<std::string>();
    e.icon_variable = j.at("icons").get<std::string>();
    if (!j.at("height").is_null()) {
        e.height_variable = j["height"].get<std::string>();
    }
    e.icon_unit = j.at("icon_unit").get<double>();
    e.icon_max = j.at("icon_max").get<int>();
    e.icon_symbol = j.at("icon_symbol").get<std::string>();
    e.ring_thickness_min = j.at("ring_thickness_range").at(0).get<double>();
    e.ring_thickness_max = j.at("ring_thickness_range").at(1).get<double>();
    e.icon_opacity_min = j.at("icon_opacity_range").at(0).get<double>();
    e.height_max = j.at("height_max").get<double>();
    e.height_reference_resolution = j.at("height_reference_resolution").get<int>();
    e.ring_ramp = ramp_from_json(j.at("ring_ramp"));
    const auto& p = j.at("palette");
    e.palette.bins_per_tier = p.at("bins_per_tier").get<std::vector<int>>();
    e.palette.diverging = p.at("diverging").get<bool>();
    e.palette.colors.clear();
    for (const auto& row : p.at("colors")) {
        e.palette.colors.push_back(ramp_from_json(row).stops());
    }
    return e;
}

ojson meta_hashed_json(const TileSetMeta& meta)
{
    ojson j;
    j["format"] = "hextiles-tileset";
    j["name"] = meta.name;
    j["projection"] = meta.projection_id;
    j["resolutions"] = {meta.r_min, meta.r_max};
    j["zoom_policy"] = {{"z0", meta.zoom.z0}, {"delta", meta.zoom.delta}};
    j["grid"] = {{"e0", meta.grid.root_edge},
                 {"max_resolution", meta.grid.max_resolution},
                 {"min_coverage", meta.min_coverage}};
    ojson vars = ojson::array();
    for (const auto& v : meta.variables) {
        vars.push_back(variable_ojson(v));
    }
    j["variables"] = std::move(vars);
    j["encoding"] = encoding_to_json(meta.encoding);
    ojson counts = ojson::object();
    for (const auto& [res, n] : meta.tile_counts) {
        counts[std::to_string(res)] = n;
    }
    j["tile_counts"] = std::move(counts);
    return j;
}

TileSetMeta meta_from_json(const ojson& j)
{
    TileSetMeta m;
    if (j.at("format").get<std::string>() != "hextiles-tileset") {
        throw CorruptionError("unexpected format tag");
    }
    m.name = j.at("name").get<std::string>();
    m.projection_id = j.at("projection").get<std::string>();
    m.r_min = j.at("resolutions").at(0).get<int>();
    m.r_max = j.at("resolutions").at(1).get<int>();
    m.zoom.z0 = j.at("zoom_policy").at("z0").get<double>();
    m.zoom.delta = j.at("zoom_policy").at("delta").get<double>();
    m.grid.root_edge = j.at("grid").at("e0").get<double>();
    m.grid.max_resolution = j.at("grid").at("max_resolution").get<int>();
    m.min_coverage = j.at("grid").at("min_coverage").get<double>();
    for (const auto& v : j.at("variables")) {
        m.variables.push_back(variable_from_ojson(v));
    }
    m.encoding = encoding_from_json(j.at("encoding"));
    for (const auto& [key, n] : j.at("tile_counts").items()) {
        m.tile_counts[std::stoi(key)] = n.get<std::size_t>();
    }
    m.created_at = j.at("created_at").get<std::string>();
    m.content_hash = j.at("content_hash").get<std::string>();
    return m;
}

ojson color_json(const Rgb& c)
{
    return c.to_hex();
}

EncodedTile tile_from_json(const ojson& j, const HexGrid& grid)
{
    EncodedTile t;
    t.cell = HexIndex::parse(j.at("cell").get<std::string>());
    t.boundary = grid.boundary(t.cell);
    t.coverage_fraction = j.at("coverage").get<double>();
    if (const auto& b = j.at("base"); !b.is_null()) {
        t.base = VsupAssignment{b.at("tier").get<int>(), b.at("bin").get<int>(),
                                Rgb::from_hex(b.at("color").get<std::string>()), b.at("clamped").get<bool>()};
    }
    if (const auto& r = j.at("ring"); !r.is_null()) {
        t.ring = RingChannel{Rgb::from_hex(r.at("color").get<std::string>()), r.at("thickness").get<double>(),
                             r.at("clamped").get<bool>()};
    }
    if (const auto& i = j.at("icons"); !i.is_null()) {
        t.icons = IconChannel{i.at("count").get<int>(), i.at("opacity").get<double>()};
    }
    if (const auto& h = j.at("height"); !h.is_null()) {
        t.height = h.get<double>();
    }
    t.aggregates.cell = t.cell;
    for (const auto& [name, a] : j.at("aggregates").items()) {
        VariableAggregate agg;
        agg.weighted_mean = a.at("mean").get<double>();
        agg.weighted_variance = a.at("variance").get<double>();
        agg.confidence = a.at("confidence").get<double>();
        agg.coverage_fraction = a.at("coverage").get<double>();
        agg.contributing_features = a.at("features").get<int>();
        t.aggregates.per_variable.emplace(name, agg);
    }
    return t;
}

std::string hash_payload_header(const TileSetMeta& meta)
{
    return std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n" + canonical_dump(meta_hashed_json(meta)) +
           "\n";
}

}  // namespace

TilesetConfig parse_tileset_config(std::string_view text, std::string_view source,
                                   const std::filesystem::path& base_dir)
{
    const json root = parse_config_text(text, source);
    std::vector<std::string> problems;
    for (const auto& [key, _] : root.items()) {
        if (key != "tileset" && key != "grid" && key != "encoding" && key != "variables") {
            problems.push_back("unknown section [" + key + "]");
        }
    }
    TilesetConfig cfg;

    const Section ts(root.contains("tileset") ? &root["tileset"] : nullptr, "tileset", problems);
    ts.reject_unknown({"name"});
    cfg.name = ts.get<std::string>("name", cfg.name);

    const Section grid(root.contains("grid") ? &root["grid"] : nullptr, "grid", problems);
    grid.reject_unknown({"e0", "max_resolution", "resolutions", "z0", "delta", "min_coverage"});
    cfg.grid.e0 = grid.get<double>("e0", cfg.grid.e0);
    cfg.grid.max_resolution = grid.get<int>("max_resolution", cfg.grid.max_resolution);
    if (const auto res = grid.optional<std::vector<int>>("resolutions")) {
        if (res->size() == 2) {
            cfg.grid.r_min = (*res)[0];
            cfg.grid.r_max = (*res)[1];
        } else {
            problems.push_back("grid.resolutions must be [r_min, r_max]");
        }
    }
    cfg.grid.zoom.z0 = grid.get<double>("z0", cfg.grid.zoom.z0);
    cfg.grid.zoom.delta = grid.get<double>("delta", cfg.grid.zoom.delta);
    cfg.grid.min_coverage = grid.get<double>("min_coverage", cfg.grid.min_coverage);

    if (!root.contains("encoding")) {
        problems.push_back("missing [encoding] section");
    }
    const Section enc(root.contains("encoding") ? &root["encoding"] : nullptr, "encoding", problems);
    enc.reject_unknown({"base", "ring", "icons", "height", "icon_unit", "icon_max", "icon_symbol",
                        "ring_thickness_range", "icon_opacity_range", "ring_ramp", "height_max",
                        "height_reference_resolution", "palette"});
    EncodingConfig& e = cfg.encoding;
    e.base_variable = enc.get<std::string>("base", "");
    e.ring_variable = enc.get<std::string>("ring", "");
    e.icon_variable = enc.get<std::string>("icons", "");
    e.height_variable = enc.optional<std::string>("height");
    e.icon_unit = enc.get<double>("icon_unit", e.icon_unit);
    e.icon_max = enc.get<int>("icon_max", e.icon_max);
    e.icon_symbol = enc.get<std::string>("icon_symbol", e.icon_symbol);
    if (const auto r = read_pair(enc, "ring_thickness_range")) {
        e.ring_thickness_min = (*r)[0];
        e.ring_thickness_max = (*r)[1];
    }
    if (const auto r = read_pair(enc, "icon_opacity_range")) {
        e.icon_opacity_min = (*r)[0];
        if ((*r)[1] != 1.0) {
            problems.push_back("encoding.icon_opacity_range must end at 1.0");
        }
    }
    if (auto ramp = read_ramp(enc, "ring_ramp")) {
        e.ring_ramp = std::move(*ramp);
    }
    e.height_max = enc.get<double>("height_max", e.height_max);
    e.height_reference_resolution = enc.get<int>("height_reference_resolution", e.height_reference_resolution);

    const Section pal(enc.child("palette"), "encoding.palette", problems);
    pal.reject_unknown({"tiers", "bins_per_tier", "diverging", "ramp", "colors"});
    const auto bins = pal.get<std::vector<int>>("bins_per_tier", {8, 4, 2});
    if (const auto tiers = pal.optional<int>("tiers"); tiers && *tiers != static_cast<int>(bins.size())) {
        problems.push_back("encoding.palette.tiers disagrees with bins_per_tier");
    }
    const bool diverging = pal.get<bool>("diverging", false);
    const ColorRamp ramp =
        read_ramp(pal, "ramp").value_or(diverging ? default_diverging_ramp() : default_sequential_ramp());
    if (std::any_of(bins.begin(), bins.end(), [](int b) { return b < 1; })) {
        problems.push_back("encoding.palette.bins_per_tier entries must be positive");
    } else {
        e.palette = VsupPalette::from_ramp(ramp, bins, diverging);
    }
    if (const auto colors = pal.optional<std::vector<std::vector<std::string>>>("colors")) {
        e.palette.colors.clear();
        try {
            for (const auto& row : *colors) {
                std::vector<Rgb> out;
                for (const auto& c : row) {
                    out.push_back(Rgb::from_hex(c));
                }
                e.palette.colors.push_back(std::move(out));
            }
        } catch (const ParseError& err) {
            problems.push_back(std::string("encoding.palette.colors: ") + err.what());
        }
    }

    const Section vars(root.contains("variables") ? &root["variables"] : nullptr, "variables", problems);
    vars.reject_unknown({"spec", "variable"});
    if (const auto spec = vars.optional<std::string>("spec")) {
        cfg.variables_file = base_dir.empty() ? std::filesystem::path(*spec) : base_dir / *spec;
    }
    if (const json* inline_vars = vars.child("variable")) {
        if (!inline_vars->is_array()) {
            problems.push_back("use [[variables.variable]] for inline variables");
        } else {
            for (const auto& node : *inline_vars) {
                try {
                    cfg.variables.push_back(variable_from_json(node));
                } catch (const ValidationError& err) {
                    problems.insert(problems.end(), err.problems().begin(), err.problems().end());
                }
            }
        }
    }

    if (!problems.empty()) {
        throw ConfigError(std::move(problems));
    }
    return cfg;
}

TilesetConfig load_tileset_config(const std::filesystem::path& path)
{
    return parse_tileset_config(read_text_file(path), path.string(), path.parent_path());
}

std::vector<VariableSpec> config_variables(const TilesetConfig& config)
{
    std::vector<VariableSpec> out;
    if (config.variables_file) {
        out = load_variable_file(*config.variables_file).variables;
    }
    out.insert(out.end(), config.variables.begin(), config.variables.end());
    return out;
}

std::vector<std::string> validate_config(const TilesetConfig& config, std::span<const VariableSpec> variables)
{
    std::vector<std::string> problems;
    const GridConfig& g = config.grid;
    if (config.name.empty()) {
        problems.push_back("tileset.name must not be empty");
    }
    if (!(g.e0 > 0.0) || !std::isfinite(g.e0)) {
        problems.push_back("grid.e0 must be positive");
    }
    if (g.max_resolution < 0 || g.max_resolution > 30) {
        problems.push_back("grid.max_resolution must lie in [0, 30]");
    }
    if (g.r_min < 0 || g.r_min > g.r_max || g.r_max > g.max_resolution) {
        problems.push_back("grid.resolutions must satisfy 0 <= r_min <= r_max <= max_resolution");
    }
    if (!(g.zoom.delta > 0.0) || !std::isfinite(g.zoom.delta)) {
        problems.push_back("grid.delta must be positive");
    }
    if (!std::isfinite(g.zoom.z0)) {
        problems.push_back("grid.z0 must be finite");
    }
    if (!(g.min_coverage >= 0.0 && g.min_coverage <= 1.0)) {
        problems.push_back("grid.min_coverage must lie in [0, 1]");
    }
    if (config.encoding.height_reference_resolution < 0 ||
        config.encoding.height_reference_resolution > g.max_resolution) {
        problems.push_back("encoding.height_reference_resolution must lie in [0, max_resolution]");
    }
    const auto var_problems = validate_variables(variables);
    problems.insert(problems.end(), var_problems.begin(), var_problems.end());
    const auto enc_problems = validate_encoding(config.encoding, variables);
    problems.insert(problems.end(), enc_problems.begin(), enc_problems.end());
    return problems;
}

const EncodedTile* TileSet::find(const HexIndex& cell) const
{
    auto it = tiles.find(cell.resolution);
    if (it == tiles.end()) {
        return nullptr;
    }
    const auto& layer = it->second;
    auto pos = std::lower_bound(layer.begin(), layer.end(), cell,
                                [](const EncodedTile& t, const HexIndex& h) { return t.cell < h; });
    return pos != layer.end() && pos->cell == cell ? &*pos : nullptr;
}

const std::vector<EncodedTile>& TileSet::layer(int resolution) const
{
    static const std::vector<EncodedTile> empty;
    auto it = tiles.find(resolution);
    return it == tiles.end() ? empty : it->second;
}

std::size_t TileSet::tile_count() const
{
    std::size_t n = 0;
    for (const auto& [_, layer] : tiles) {
        n += layer.size();
    }
    return n;
}

TileSet compile(const Dataset& dataset, const TilesetConfig& config, const CompileOptions& options,
                std::vector<std::string>* warnings)
{
    if (auto problems = validate_config(config, dataset.variables()); !problems.empty()) {
        throw ConfigError(std::move(problems));
    }
    const HexGrid grid(GridSpec{config.grid.e0, config.grid.max_resolution});

    TileSet ts;
    TileSetMeta& m = ts.meta;
    m.name = config.name;
    m.projection_id = dataset.projection_id();
    m.r_min = config.grid.r_min;
    m.r_max = config.grid.r_max;
    m.zoom = config.grid.zoom;
    m.grid = grid.spec();
    m.min_coverage = config.grid.min_coverage;
    m.variables = dataset.variables();
    m.encoding = config.encoding;
    m.created_at = options.created_at.value_or(utc_timestamp());

    for (int res = m.r_min; res <= m.r_max; ++res) {
        auto& layer = ts.tiles[res];
        for (const auto& record : aggregate_resolution(dataset, grid, res, warnings)) {
            if (record_coverage(record) < m.min_coverage) {
                continue;
            }
            layer.push_back(encode_record(record, m.encoding, m.variables, grid));
        }
        m.tile_counts[res] = layer.size();
    }
    if (ts.tile_count() == 0 && warnings) {
        warnings->push_back("tileset '" + m.name + "' is empty: no cell reaches min_coverage " +
                            std::to_string(m.min_coverage));
    }
    m.content_hash = compute_content_hash(ts);
    return ts;
}

int resolution_for_zoom(double zoom, const TileSetMeta& meta)
{
    if (!std::isfinite(zoom)) {
        return zoom > 0 ? meta.r_max : meta.r_min;
    }
    const double steps = std::floor((zoom - meta.zoom.z0) / meta.zoom.delta);
    const double r = std::clamp(meta.r_min + steps, static_cast<double>(meta.r_min), static_cast<double>(meta.r_max));
    return static_cast<int>(r);
}

std::string canonical_dump(const ojson& value)
{
    std::string out;
    dump_into(value, out);
    return out;
}

ojson encoding_to_json(const EncodingConfig& e)
{
    ojson j;
    j["base"] = e.base_variable;
    j["ring"] = e.ring_variable;
    j["icons"] = e.icon_variable;
    j["height"] = e.height_variable ? ojson(*e.height_variable) : ojson(nullptr);
    j["icon_unit"] = e.icon_unit;
    j["icon_max"] = e.icon_max;
    j["icon_symbol"] = e.icon_symbol;
    j["ring_thickness_range"] = {e.ring_thickness_min, e.ring_thickness_max};
    j["icon_opacity_range"] = {e.icon_opacity_min, 1.0};
    j["height_max"] = e.height_max;
    j["height_reference_resolution"] = e.height_reference_resolution;
    j["ring_ramp"] = ramp_json(e.ring_ramp);
    ojson colors = ojson::array();
    for (const auto& row : e.palette.colors) {
        colors.push_back(ramp_json(ColorRamp(row)));
    }
    j["palette"] = {{"tiers", e.palette.tiers()},
                    {"bins_per_tier", e.palette.bins_per_tier},
                    {"diverging", e.palette.diverging},
                    {"colors", std::move(colors)}};
    return j;
}

ojson meta_to_json(const TileSetMeta& meta)
{
    ojson j = meta_hashed_json(meta);
    j["created_at"] = meta.created_at;
    j["content_hash"] = meta.content_hash;
    return j;
}

ojson meta_summary_json(const TileSetMeta& meta)
{
    ojson vars = ojson::array();
    for (const auto& v : meta.variables) {
        vars.push_back(variable_ojson(v));
    }
    ojson j;
    j["name"] = meta.name;
    j["resolutions"] = {meta.r_min, meta.r_max};
    j["variables"] = std::move(vars);
    j["zoom_policy"] = {{"z0", meta.zoom.z0}, {"delta", meta.zoom.delta}};
    j["content_hash"] = meta.content_hash;
    return j;
}

ojson tile_to_json(const EncodedTile& t)
{
    ojson j;
    j["cell"] = t.cell.to_string();
    j["coverage"] = t.coverage_fraction;
    if (t.base) {
        j["base"] = {{"tier", t.base->tier},
                     {"bin", t.base->bin},
                     {"color", color_json(t.base->color)},
                     {"clamped", t.base->clamped}};
    } else {
        j["base"] = nullptr;
    }
    if (t.ring) {
        j["ring"] = {{"color", color_json(t.ring->color)},
                     {"thickness", t.ring->thickness},
                     {"clamped", t.ring->clamped}};
    } else {
        j["ring"] = nullptr;
    }
    if (t.icons) {
        j["icons"] = {{"count", t.icons->count}, {"opacity", t.icons->opacity}};
    } else {
        j["icons"] = nullptr;
    }
    j["height"] = t.height ? ojson(*t.height) : ojson(nullptr);
    ojson aggs = ojson::object();
    for (const auto& [name, a] : t.aggregates.per_variable) {
        aggs[name] = {{"mean", a.weighted_mean},
                      {"variance", a.weighted_variance},
                      {"confidence", a.confidence},
                      {"coverage", a.coverage_fraction},
                      {"features", a.contributing_features}};
    }
    j["aggregates"] = std::move(aggs);
    return j;
}

ojson tile_geometry_json(const EncodedTile& tile, std::string_view projection_id)
{
    const Projection proj = Projection::by_id(projection_id);
    ojson j = tile_to_json(tile);
    const LonLat c = proj.inverse(tile.boundary.center);
    j["center"] = {tile.boundary.center.x, tile.boundary.center.y};
    j["center_lonlat"] = {c.lon, c.lat};
    ojson verts = ojson::array();
    ojson verts_ll = ojson::array();
    for (const auto& v : tile.boundary.vertices) {
        verts.push_back({v.x, v.y});
        const LonLat ll = proj.inverse(v);
        verts_ll.push_back({ll.lon, ll.lat});
    }
    j["vertices"] = std::move(verts);
    j["vertices_lonlat"] = std::move(verts_ll);
    return j;
}

std::optional<ojson> cell_report(const TileSet& ts, const HexIndex& cell)
{
    const EncodedTile* tile = ts.find(cell);
    if (!tile) {
        return std::nullopt;
    }
    const HexGrid grid = ts.grid();
    ojson j;
    j["tileset"] = ts.meta.name;
    j["cell"] = cell.to_string();
    j["parent"] = cell.resolution > 0 ? ojson(grid.parent(cell).to_string()) : ojson(nullptr);
    ojson kids = ojson::array();
    if (cell.resolution < grid.max_resolution()) {
        for (const auto& c : grid.children(cell)) {
            if (ts.find(c)) {
                kids.push_back(c.to_string());
            }
        }
    }
    j["children"] = std::move(kids);
    j["tile"] = tile_geometry_json(*tile, ts.meta.projection_id);
    return j;
}

std::string compute_content_hash(const TileSet& ts)
{
    std::string payload = hash_payload_header(ts.meta);
    for (const auto& [_, layer] : ts.tiles) {
        for (const auto& t : layer) {
            payload += canonical_dump(tile_to_json(t));
            payload.push_back('\n');
        }
    }
    return sha256_hex(payload);
}

std::string serialize(const TileSet& ts)
{
    std::string out = std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
    out += canonical_dump(meta_to_json(ts.meta));
    out.push_back('\n');
    for (const auto& [_, layer] : ts.tiles) {
        for (const auto& t : layer) {
            out += canonical_dump(tile_to_json(t));
            out.push_back('\n');
        }
    }
    return out;
}

TileSet deserialize(std::string_view bytes)
{
    if (bytes.substr(0, kMagic.size()) != kMagic) {
        throw CorruptionError("not a tileset file (bad magic)");
    }
    if (bytes.empty() || bytes.back() != '\n') {
        throw CorruptionError("tileset file is truncated");
    }
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < bytes.size();) {
        const std::size_t nl = bytes.find('\n', pos);
        lines.push_back(bytes.substr(pos, nl - pos));
        pos = nl + 1;
    }
    const std::string_view header = lines[0];
    int version = -1;
    if (header.size() < kMagic.size() + 2 || header[kMagic.size()] != ' ') {
        throw CorruptionError("malformed tileset header");
    }
    const char* vfirst = header.data() + kMagic.size() + 1;
    const auto vres = std::from_chars(vfirst, header.data() + header.size(), version);
    if (vres.ec != std::errc{} || vres.ptr != header.data() + header.size()) {
        throw CorruptionError("malformed tileset header");
    }
    if (version != kFormatVersion) {
        throw UnsupportedVersion("tileset format version " + std::to_string(version) + " is not supported (expected " +
                                 std::to_string(kFormatVersion) + ")");
    }
    if (lines.size() < 2) {
        throw CorruptionError("tileset file is truncated");
    }

    TileSet ts;
    try {
        ts.meta = meta_from_json(ojson::parse(lines[1]));
        const HexGrid grid(ts.meta.grid);
        for (int res = ts.meta.r_min; res <= ts.meta.r_max; ++res) {
            ts.tiles[res];
        }
        for (std::size_t i = 2; i < lines.size(); ++i) {
            EncodedTile t = tile_from_json(ojson::parse(lines[i]), grid);
            auto& layer = ts.tiles[t.cell.resolution];
            if (!layer.empty() && !(layer.back().cell < t.cell)) {
                throw CorruptionError("tiles are not sorted and unique");
            }
            layer.push_back(std::move(t));
        }
    } catch (const CorruptionError&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptionError(std::string("tileset file is corrupt: ") + e.what());
    }
    for (const auto& [res, layer] : ts.tiles) {
        auto it = ts.meta.tile_counts.find(res);
        if (it == ts.meta.tile_counts.end() || it->second != layer.size()) {
            throw CorruptionError("tile count mismatch at resolution " + std::to_string(res));
        }
    }
    if (compute_content_hash(ts) != ts.meta.content_hash) {
        throw CorruptionError("content hash mismatch");
    }
    return ts;
}

void save(const TileSet& ts, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidArgument("cannot write '" + path.string() + "'");
    }
    const std::string bytes = serialize(ts);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

TileSet load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot read '" + path.string() + "'");
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace hextiles
