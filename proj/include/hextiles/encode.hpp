#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hextiles/aggregate.hpp"
#include "hextiles/hexgrid.hpp"
#include "hextiles/ingest.hpp"

namespace hextiles {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend auto operator<=>(const Rgb&, const Rgb&) = default;

    std::string to_hex() const;
    static Rgb from_hex(std::string_view text);
};

/// Piecewise-linear ramp over evenly spaced sRGB stops.
class ColorRamp {
public:
    ColorRamp() = default;
    explicit ColorRamp(std::vector<Rgb> stops);

    const std::vector<Rgb>& stops() const noexcept { return stops_; }
    /// t is clamped to [0, 1]; channels are rounded to the nearest integer.
    Rgb sample(double t) const;

    friend bool operator==(const ColorRamp&, const ColorRamp&) = default;

private:
    std::vector<Rgb> stops_;
};

ColorRamp default_sequential_ramp();
ColorRamp default_diverging_ramp();
ColorRamp default_ring_ramp();

/// Value-suppressing palette: tier 0 is the most confident and has the most
/// value bins; each lower-confidence tier has strictly fewer.
struct VsupPalette {
    std::vector<int> bins_per_tier{8, 4, 2};
    std::vector<std::vector<Rgb>> colors;  // [tier][bin]
    bool diverging = false;

    int tiers() const noexcept { return static_cast<int>(bins_per_tier.size()); }

    /// Tier t, bin i samples the ramp at the bin center and then fades toward
    /// neutral grey in proportion to t, so low-confidence tiers read as washed
    /// out.
    static VsupPalette from_ramp(const ColorRamp& ramp, std::vector<int> bins_per_tier, bool diverging);

    std::vector<std::string> validate() const;

    friend bool operator==(const VsupPalette&, const VsupPalette&) = default;
};

struct EncodingConfig {
    std::string base_variable;
    std::string ring_variable;
    std::string icon_variable;
    std::optional<std::string> height_variable;

    double icon_unit = 1.0;  // variable units per icon
    int icon_max = 9;
    std::string icon_symbol = "circle";
    double ring_thickness_min = 0.04;  // fractions of the circumradius
    double ring_thickness_max = 0.16;
    double icon_opacity_min = 0.3;

    VsupPalette palette = VsupPalette::from_ramp(default_sequential_ramp(), {8, 4, 2}, false);
    ColorRamp ring_ramp = default_ring_ramp();

    // Height at the top of the domain, in projected meters at the reference
    // resolution; scaled with edge length elsewhere.
    double height_max = 30000.0;
    int height_reference_resolution = 5;

    friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

/// All problems with `config` against the declared variables.
std::vector<std::string> validate_encoding(const EncodingConfig& config, std::span<const VariableSpec> variables);

struct VsupAssignment {
    int tier = 0;
    int bin = 0;
    Rgb color;
    bool clamped = false;  // value fell outside the variable's domain

    friend bool operator==(const VsupAssignment&, const VsupAssignment&) = default;
};

VsupAssignment vsup_bin(double value, double confidence, const VariableSpec& spec, const VsupPalette& palette);

/// round(value / icon_unit) clamped to [0, icon_max]. Throws ConfigError for
/// variables without a meaningful zero.
int icon_count(double value, const VariableSpec& spec, const EncodingConfig& config);

struct RingChannel {
    Rgb color;
    double thickness = 0.0;
    bool clamped = false;

    friend bool operator==(const RingChannel&, const RingChannel&) = default;
};

RingChannel ring_attributes(double value, double confidence, const VariableSpec& spec, const EncodingConfig& config);

double icon_opacity(double confidence, const EncodingConfig& config);

struct IconChannel {
    int count = 0;
    double opacity = 1.0;

    friend bool operator==(const IconChannel&, const IconChannel&) = default;
};

struct EncodedTile {
    HexIndex cell;
    HexCell boundary;
    std::optional<VsupAssignment> base;  // absent when the record lacks the variable
    std::optional<RingChannel> ring;
    std::optional<IconChannel> icons;
    std::optional<double> height;
    AggregateRecord aggregates;
    double coverage_fraction = 0.0;

    friend bool operator==(const EncodedTile&, const EncodedTile&) = default;
};

/// Largest per-variable coverage in the record.
double record_coverage(const AggregateRecord& record);

EncodedTile encode_record(const AggregateRecord& record, const EncodingConfig& config,
                          std::span<const VariableSpec> variables, const HexGrid& grid);

}  // namespace hextiles
