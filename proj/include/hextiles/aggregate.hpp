#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hextiles/hexgrid.hpp"
#include "hextiles/ingest.hpp"

namespace hextiles {

/// One feature's contribution to one variable in one cell.
struct WeightedEntry {
    std::string feature_id;
    double weight = 0.0;  // intersection area, times density when configured
    double value = 0.0;   // attribute, per unit area for extensive variables
    double area = 0.0;    // intersection area alone

    friend bool operator==(const WeightedEntry&, const WeightedEntry&) = default;
};

struct VariableAggregate {
    double weighted_mean = 0.0;
    double weighted_variance = 0.0;
    double confidence = 1.0;
    double coverage_fraction = 0.0;
    int contributing_features = 0;

    friend bool operator==(const VariableAggregate&, const VariableAggregate&) = default;
};

struct AggregateRecord {
    HexIndex cell;
    std::map<std::string, VariableAggregate> per_variable;

    const VariableAggregate* find(const std::string& variable) const;

    friend bool operator==(const AggregateRecord&, const AggregateRecord&) = default;
};

/// Contributions of every feature carrying `variable` that overlaps `cell`.
///
/// Weights are intersection areas. When the variable names a
/// `density_weight_of` variable, the weight is area times that variable's
/// value (itself per unit area if extensive), so a percentage is averaged
/// over people rather than over land. Features lacking the density value are
/// dropped and reported through `diagnostics`. A feature overlapping less
/// than 1e-12 of the cell's area does not contribute.
std::vector<WeightedEntry> weights_for_cell(const Dataset& dataset, const HexGrid& grid, const HexIndex& cell,
                                            const VariableSpec& variable,
                                            std::vector<std::string>* diagnostics = nullptr);

/// sum(w v) / sum(w); nullopt when the total weight is not positive.
std::optional<double> weighted_mean(std::span<const WeightedEntry> entries);

/// Population-style weighted variance sum(w (v - m)^2) / sum(w).
std::optional<double> weighted_variance(std::span<const WeightedEntry> entries, double mean);

/// 1 - min(1, sigma / sigma_ref), sigma_ref defaulting to a quarter of the
/// variable's domain.
double confidence(double variance, const VariableSpec& spec);

/// Summary of a cell's entries; nullopt when nothing contributes.
std::optional<VariableAggregate> summarize(std::span<const WeightedEntry> entries, const VariableSpec& spec,
                                           double cell_area);

/// Records for every cell of `resolution` that any feature touches, sorted by
/// cell index.
std::vector<AggregateRecord> aggregate_resolution(const Dataset& dataset, const HexGrid& grid, int resolution,
                                                  std::vector<std::string>* diagnostics = nullptr);

}  // namespace hextiles
