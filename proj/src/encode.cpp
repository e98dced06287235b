#include "hextiles/encode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "hextiles/error.hpp"

namespace hextiles {

namespace {

constexpr Rgb kNeutral{154, 154, 154};
// Share of neutral grey mixed into the least confident tier.
constexpr double kFadeAtLastTier = 0.6;

std::uint8_t channel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb mix(Rgb a, Rgb b, double t)
{
    return {channel(a.r + t * (b.r - a.r)), channel(a.g + t * (b.g - a.g)), channel(a.b + t * (b.b - a.b))};
}

double unit_position(double value, const VariableSpec& spec)
{
    return (value - spec.domain_min) / (spec.domain_max - spec.domain_min);
}

void check_confidence(double c)
{
    if (!(c >= 0.0 && c <= 1.0)) {
        throw InvalidArgument("confidence must lie in [0, 1]");
    }
}

const VariableSpec* lookup(std::span<const VariableSpec> variables, const std::string& name)
{
    for (const auto& v : variables) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

}  // namespace

std::string Rgb::to_hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "#";
    for (const std::uint8_t c : {r, g, b}) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

Rgb Rgb::from_hex(std::string_view text)
{
    if (text.size() != 7 || text[0] != '#') {
        throw ParseError("color '" + std::string(text) + "' is not #rrggbb");
    }
    std::array<std::uint8_t, 3> c{};
    for (std::size_t i = 0; i < 3; ++i) {
        const char* first = text.data() + 1 + 2 * i;
        const auto res = std::from_chars(first, first + 2, c[i], 16);
        if (res.ec != std::errc{} || res.ptr != first + 2) {
            throw ParseError("color '" + std::string(text) + "' is not #rrggbb");
        }
    }
    return {c[0], c[1], c[2]};
}

ColorRamp::ColorRamp(std::vector<Rgb> stops) : stops_(std::move(stops))
{
    if (stops_.empty()) {
        throw InvalidArgument("color ramp needs at least one stop");
    }
}

Rgb ColorRamp::sample(double t) const
{
    if (stops_.size() == 1) {
        return stops_.front();
    }
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    const double pos = t * static_cast<double>(stops_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), stops_.size() - 2);
    return mix(stops_[i], stops_[i + 1], pos - static_cast<double>(i));
}

ColorRamp default_sequential_ramp()
{
    return ColorRamp({{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}});
}

ColorRamp default_diverging_ramp()
{
    return ColorRamp({{33, 102, 172}, {103, 169, 207}, {247, 247, 247}, {239, 138, 98}, {178, 24, 43}});
}

ColorRamp default_ring_ramp()
{
    return ColorRamp({{242, 240, 247}, {158, 154, 200}, {84, 39, 143}});
}

VsupPalette VsupPalette::from_ramp(const ColorRamp& ramp, std::vector<int> bins_per_tier, bool diverging)
{
    VsupPalette p;
    p.bins_per_tier = std::move(bins_per_tier);
    p.diverging = diverging;
    const int tiers = p.tiers();
    for (int t = 0; t < tiers; ++t) {
        const int bins = std::max(p.bins_per_tier[t], 0);
        const double fade = tiers > 1 ? kFadeAtLastTier * t / (tiers - 1) : 0.0;
        std::vector<Rgb> row;
        for (int i = 0; i < bins; ++i) {
            row.push_back(mix(ramp.sample((i + 0.5) / bins), kNeutral, fade));
        }
        p.colors.push_back(std::move(row));
    }
    return p;
}

std::vector<std::string> VsupPalette::validate() const
{
    std::vector<std::string> problems;
    if (bins_per_tier.empty()) {
        problems.push_back("palette needs at least one tier");
        return problems;
    }
    for (std::size_t t = 1; t < bins_per_tier.size(); ++t) {
        if (bins_per_tier[t] >= bins_per_tier[t - 1]) {
            problems.push_back("palette bins_per_tier must be strictly decreasing");
            break;
        }
    }
    if (bins_per_tier.back() < 2) {
        problems.push_back("palette's least confident tier needs at least 2 bins");
    }
    if (colors.size() != bins_per_tier.size()) {
        problems.push_back("palette has " + std::to_string(colors.size()) + " color rows for " +
                           std::to_string(bins_per_tier.size()) + " tiers");
        return problems;
    }
    for (std::size_t t = 0; t < colors.size(); ++t) {
        if (static_cast<int>(colors[t].size()) != bins_per_tier[t]) {
            problems.push_back("palette tier " + std::to_string(t) + " has " + std::to_string(colors[t].size()) +
                               " colors for " + std::to_string(bins_per_tier[t]) + " bins");
            continue;
        }
        const std::set<Rgb> distinct(colors[t].begin(), colors[t].end());
        if (distinct.size() != colors[t].size()) {
            problems.push_back("palette tier " + std::to_string(t) + " repeats a color");
        }
    }
    return problems;
}

std::vector<std::string> validate_encoding(const EncodingConfig& config, std::span<const VariableSpec> variables)
{
    std::vector<std::string> problems;
    const std::vector<std::pair<const char*, const std::string*>> channels{
        {"base", &config.base_variable}, {"ring", &config.ring_variable}, {"icons", &config.icon_variable}};
    std::set<std::string> used;
    for (const auto& [channel_name, var] : channels) {
        if (var->empty()) {
            problems.push_back(std::string("encoding.") + channel_name + " is not set");
            continue;
        }
        if (!used.insert(*var).second) {
            problems.push_back(std::string("encoding.") + channel_name + " reuses variable '" + *var +
                               "'; base, ring and icons must be distinct");
        }
        if (!lookup(variables, *var)) {
            problems.push_back(std::string("encoding.") + channel_name + " names undeclared variable '" + *var + "'");
        }
    }
    if (const VariableSpec* icons = lookup(variables, config.icon_variable); icons && !icons->zero_anchored) {
        problems.push_back("encoding.icons variable '" + config.icon_variable +
                           "' is not zero_anchored; icon counts need a meaningful zero");
    }
    if (config.height_variable && !lookup(variables, *config.height_variable)) {
        problems.push_back("encoding.height names undeclared variable '" + *config.height_variable + "'");
    }
    if (!(config.icon_unit > 0.0) || !std::isfinite(config.icon_unit)) {
        problems.push_back("encoding.icon_unit must be positive");
    }
    if (config.icon_max < 0) {
        problems.push_back("encoding.icon_max must not be negative");
    }
    if (!(0.0 < config.ring_thickness_min && config.ring_thickness_min < config.ring_thickness_max &&
          config.ring_thickness_max <= 0.25)) {
        problems.push_back("encoding.ring_thickness_range must satisfy 0 < min < max <= 0.25");
    }
    if (!(config.icon_opacity_min >= 0.0 && config.icon_opacity_min <= 1.0)) {
        problems.push_back("encoding.icon_opacity_range minimum must lie in [0, 1]");
    }
    if (!(config.height_max > 0.0) || !std::isfinite(config.height_max)) {
        problems.push_back("encoding.height_max must be positive");
    }
    if (config.ring_ramp.stops().empty()) {
        problems.push_back("encoding.ring_ramp needs at least one color");
    }
    for (auto& p : config.palette.validate()) {
        problems.push_back("encoding." + p);
    }
    return problems;
}

VsupAssignment vsup_bin(double value, double confidence, const VariableSpec& spec, const VsupPalette& palette)
{
    if (!std::isfinite(value)) {
        throw InvalidArgument("value is not finite");
    }
    check_confidence(confidence);
    VsupAssignment out;
    const int tiers = palette.tiers();
    out.tier = std::min(tiers - 1, static_cast<int>(std::floor((1.0 - confidence) * tiers)));
    const int bins = palette.bins_per_tier[out.tier];
    out.clamped = !spec.in_domain(value);
    const double raw = std::floor(unit_position(value, spec) * bins);
    out.bin = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(bins - 1)));
    out.color = palette.colors[out.tier][out.bin];
    return out;
}

int icon_count(double value, const VariableSpec& spec, const EncodingConfig& config)
{
    if (!spec.zero_anchored) {
        throw ConfigError({"variable '" + spec.name + "' is not zero_anchored and cannot drive icon counts"});
    }
    if (!(value > 0.0)) {
        return 0;
    }
    const double n = std::round(value / config.icon_unit);
    return static_cast<int>(std::clamp(n, 0.0, static_cast<double>(config.icon_max)));
}

RingChannel ring_attributes(double value, double confidence, const VariableSpec& spec, const EncodingConfig& config)
{
    check_confidence(confidence);
    RingChannel out;
    out.clamped = !spec.in_domain(value);
    out.color = config.ring_ramp.sample(unit_position(value, spec));
    out.thickness = config.ring_thickness_min + confidence * (config.ring_thickness_max - config.ring_thickness_min);
    return out;
}

double icon_opacity(double confidence, const EncodingConfig& config)
{
    check_confidence(confidence);
    return config.icon_opacity_min + confidence * (1.0 - config.icon_opacity_min);
}

double record_coverage(const AggregateRecord& record)
{
    double best = 0.0;
    for (const auto& [_, agg] : record.per_variable) {
        best = std::max(best, agg.coverage_fraction);
    }
    return best;
}

EncodedTile encode_record(const AggregateRecord& record, const EncodingConfig& config,
                          std::span<const VariableSpec> variables, const HexGrid& grid)
{
    EncodedTile tile;
    tile.cell = record.cell;
    tile.boundary = grid.boundary(record.cell);
    tile.aggregates = record;
    tile.coverage_fraction = record_coverage(record);

    const auto channel_inputs = [&](const std::string& name)
        -> std::optional<std::pair<const VariableAggregate*, const VariableSpec*>> {
        const VariableAggregate* agg = record.find(name);
        const VariableSpec* spec = lookup(variables, name);
        if (!agg || !spec) {
            return std::nullopt;
        }
        return std::make_pair(agg, spec);
    };

    if (auto in = channel_inputs(config.base_variable)) {
        tile.base = vsup_bin(in->first->weighted_mean, in->first->confidence, *in->second, config.palette);
    }
    if (auto in = channel_inputs(config.ring_variable)) {
        tile.ring = ring_attributes(in->first->weighted_mean, in->first->confidence, *in->second, config);
    }
    if (auto in = channel_inputs(config.icon_variable)) {
        tile.icons = IconChannel{icon_count(in->first->weighted_mean, *in->second, config),
                                 icon_opacity(in->first->confidence, config)};
    }
    if (config.height_variable) {
        if (auto in = channel_inputs(*config.height_variable)) {
            const double t = std::clamp(unit_position(in->first->weighted_mean, *in->second), 0.0, 1.0);
            const int ref = std::min(config.height_reference_resolution, grid.max_resolution());
            const double scale = grid.edge_length(record.cell.resolution) / grid.edge_length(ref);
            tile.height = t * config.height_max * scale;
        }
    }
    return tile;
}

}  // namespace hextiles
