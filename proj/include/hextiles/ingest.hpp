#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hextiles/geometry.hpp"
#include "hextiles/types.hpp"

namespace hextiles {

enum class VariableKind {
    intensive,  // rates, percentages, levels: area-weighted directly
    extensive,  // counts, volumes: divided by feature area first
};

std::string_view to_string(VariableKind kind);
VariableKind variable_kind_from_string(std::string_view text);

struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::intensive;
    std::optional<std::string> density_weight_of;
    double domain_min = 0.0;
    double domain_max = 1.0;
    bool zero_anchored = false;
    std::string units_label;
    std::optional<double> sigma_ref;  // overrides the range/4 default

    double reference_sigma() const;
    bool in_domain(double v) const noexcept { return v >= domain_min && v <= domain_max; }

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Checks one spec in isolation and a list for cross references. Returns all
/// problems; empty means valid.
std::vector<std::string> validate_variables(std::span<const VariableSpec> specs);

struct Feature {
    std::string id;
    std::string source;  // dataset the feature was loaded from
    std::vector<PolygonGeometry> parts;
    std::map<std::string, double> attributes;  // missing variables are absent

    double area() const;
    BBox bounds() const;
    std::optional<double> attribute(const std::string& name) const;
};

struct IngestDiagnostics {
    std::size_t out_of_domain = 0;
    std::size_t non_numeric = 0;
    std::size_t skipped_features = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const IngestDiagnostics&, const IngestDiagnostics&) = default;
};

/// Immutable collection of features and their variable declarations.
class Dataset {
public:
    Dataset() = default;

    /// Validates ids, attribute keys and geometry. Throws ValidationError.
    static Dataset create(std::vector<Feature> features, std::vector<VariableSpec> variables,
                          std::string projection_id = "web-mercator", IngestDiagnostics diagnostics = {});

    const std::vector<Feature>& features() const noexcept { return features_; }
    const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
    const std::string& projection_id() const noexcept { return projection_id_; }
    const std::optional<BBox>& bbox() const noexcept { return bbox_; }
    const IngestDiagnostics& diagnostics() const noexcept { return diagnostics_; }

    const VariableSpec* find_variable(std::string_view name) const;
    bool empty() const noexcept { return features_.empty() && variables_.empty(); }

private:
    std::vector<Feature> features_;
    std::vector<VariableSpec> variables_;
    std::string projection_id_ = "web-mercator";
    std::optional<BBox> bbox_;
    IngestDiagnostics diagnostics_;
};

struct VariableFile {
    std::string projection_id = "web-mercator";
    std::vector<VariableSpec> variables;
};

VariableSpec variable_from_json(const nlohmann::json& node);
nlohmann::json variable_to_json(const VariableSpec& spec);

/// Variable declarations: an optional top-level `projection` key and one
/// [[variable]] section per variable.
VariableFile parse_variable_file(std::string_view text, std::string_view source = "<spec>");
VariableFile load_variable_file(const std::filesystem::path& path);

/// Geojson FeatureCollection in lon/lat plus declarations. `source` labels
/// the features' provenance.
Dataset parse_dataset(std::string_view geojson, const VariableFile& spec, std::string source = "dataset");
Dataset load_dataset(const std::filesystem::path& geo_file, const std::filesystem::path& spec_file);

/// Concatenates two layers described on different discretizations.
Dataset merge_datasets(const Dataset& a, const Dataset& b);

}  // namespace hextiles
