#include "hextiles/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hextiles/geometry.hpp"

namespace hextiles {

namespace {

// Overlaps below this fraction of the cell area are clipping round-off from
// boundaries that merely touch the cell.
constexpr double kNegligibleOverlap = 1e-12;

struct Overlap {
    std::size_t feature = 0;
    double area = 0.0;
};

double value_for(const Feature& f, const VariableSpec& spec, double raw)
{
    return spec.kind == VariableKind::extensive ? raw / f.area() : raw;
}

std::vector<WeightedEntry> entries_from_overlaps(const Dataset& dataset, std::span<const Overlap> overlaps,
                                                 const VariableSpec& variable, const HexIndex& cell,
                                                 std::vector<std::string>* diagnostics)
{
    const VariableSpec* density =
        variable.density_weight_of ? dataset.find_variable(*variable.density_weight_of) : nullptr;
    std::vector<WeightedEntry> out;
    for (const auto& o : overlaps) {
        const Feature& f = dataset.features()[o.feature];
        const auto raw = f.attribute(variable.name);
        if (!raw || !(o.area > 0.0)) {
            continue;
        }
        double weight = o.area;
        if (density) {
            const auto d = f.attribute(density->name);
            if (!d) {
                if (diagnostics) {
                    diagnostics->push_back(cell.to_string() + ": feature '" + f.id + "' lacks '" + density->name +
                                           "', excluded from '" + variable.name + "'");
                }
                continue;
            }
            const double dv = value_for(f, *density, *d);
            if (dv < 0.0) {
                if (diagnostics) {
                    diagnostics->push_back(cell.to_string() + ": feature '" + f.id + "' has negative '" +
                                           density->name + "', excluded from '" + variable.name + "'");
                }
                continue;
            }
            weight *= dv;
        }
        if (!(weight > 0.0)) {
            continue;
        }
        out.push_back({f.id, weight, value_for(f, variable, *raw), o.area});
    }
    return out;
}

std::vector<Overlap> overlaps_for(const Dataset& dataset, const HexCell& cell, std::span<const std::size_t> candidates)
{
    const double floor = kNegligibleOverlap * 1.5 * std::sqrt(3.0) * cell.edge_length * cell.edge_length;
    std::vector<Overlap> out;
    for (const std::size_t i : candidates) {
        double area = 0.0;
        for (const auto& part : dataset.features()[i].parts) {
            area += intersection_area(part, cell);
        }
        if (area > floor) {
            out.push_back({i, area});
        }
    }
    return out;
}

}  // namespace

const VariableAggregate* AggregateRecord::find(const std::string& variable) const
{
    auto it = per_variable.find(variable);
    return it == per_variable.end() ? nullptr : &it->second;
}

std::vector<WeightedEntry> weights_for_cell(const Dataset& dataset, const HexGrid& grid, const HexIndex& cell,
                                            const VariableSpec& variable, std::vector<std::string>* diagnostics)
{
    const HexCell hex = grid.boundary(cell);
    const BBox hb = hex.bounds();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < dataset.features().size(); ++i) {
        if (dataset.features()[i].bounds().intersects(hb)) {
            candidates.push_back(i);
        }
    }
    const auto overlaps = overlaps_for(dataset, hex, candidates);
    return entries_from_overlaps(dataset, overlaps, variable, cell, diagnostics);
}

namespace {

bool all_values_equal(std::span<const WeightedEntry> entries)
{
    return std::all_of(entries.begin(), entries.end(),
                       [&](const WeightedEntry& e) { return e.value == entries.front().value; });
}

}  // namespace

std::optional<double> weighted_mean(std::span<const WeightedEntry> entries)
{
    double sw = 0.0;
    double swv = 0.0;
    for (const auto& e : entries) {
        sw += e.weight;
        swv += e.weight * e.value;
    }
    if (!(sw > 0.0)) {
        return std::nullopt;
    }
    if (all_values_equal(entries)) {
        return entries.front().value;
    }
    return swv / sw;
}

std::optional<double> weighted_variance(std::span<const WeightedEntry> entries, double mean)
{
    double sw = 0.0;
    double acc = 0.0;
    for (const auto& e : entries) {
        const double d = e.value - mean;
        sw += e.weight;
        acc += e.weight * d * d;
    }
    if (!(sw > 0.0)) {
        return std::nullopt;
    }
    if (all_values_equal(entries)) {
        return 0.0;
    }
    return std::max(0.0, acc / sw);
}

double confidence(double variance, const VariableSpec& spec)
{
    const double sigma = std::sqrt(std::max(0.0, variance));
    return 1.0 - std::min(1.0, sigma / spec.reference_sigma());
}

std::optional<VariableAggregate> summarize(std::span<const WeightedEntry> entries, const VariableSpec& spec,
                                           double cell_area)
{
    const auto mean = weighted_mean(entries);
    if (!mean) {
        return std::nullopt;
    }
    VariableAggregate agg;
    agg.weighted_mean = *mean;
    agg.contributing_features = static_cast<int>(entries.size());
    agg.weighted_variance = entries.size() > 1 ? *weighted_variance(entries, *mean) : 0.0;
    agg.confidence = confidence(agg.weighted_variance, spec);
    double covered = 0.0;
    for (const auto& e : entries) {
        covered += e.area;
    }
    agg.coverage_fraction = std::clamp(covered / cell_area, 0.0, 1.0);
    return agg;
}

std::vector<AggregateRecord> aggregate_resolution(const Dataset& dataset, const HexGrid& grid, int resolution,
                                                  std::vector<std::string>* diagnostics)
{
    grid.check_index({resolution, 0, 0});

    // Candidate cells come from each part's bounding box; a cell nobody's box
    // reaches cannot receive a contribution.
    std::unordered_map<HexIndex, std::vector<std::size_t>> candidates;
    const auto& features = dataset.features();
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (const auto& part : features[i].parts) {
            for (const auto& h : grid.cells_covering(part.bounds(), resolution)) {
                auto& list = candidates[h];
                if (list.empty() || list.back() != i) {
                    list.push_back(i);
                }
            }
        }
    }
    std::vector<HexIndex> cells;
    cells.reserve(candidates.size());
    for (const auto& [h, _] : candidates) {
        cells.push_back(h);
    }
    std::sort(cells.begin(), cells.end());

    const double cell_area = grid.cell_area(resolution);
    std::vector<AggregateRecord> out;
    for (const auto& h : cells) {
        const HexCell hex = grid.boundary(h);
        const auto overlaps = overlaps_for(dataset, hex, candidates[h]);
        if (overlaps.empty()) {
            continue;
        }
        AggregateRecord rec{h, {}};
        for (const auto& spec : dataset.variables()) {
            const auto entries = entries_from_overlaps(dataset, overlaps, spec, h, diagnostics);
            if (auto agg = summarize(entries, spec, cell_area)) {
                rec.per_variable.emplace(spec.name, *agg);
            }
        }
        if (!rec.per_variable.empty()) {
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace hextiles
