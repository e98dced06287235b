#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hextiles/encode.hpp"
#include "hextiles/hexgrid.hpp"
#include "hextiles/ingest.hpp"

namespace hextiles {

struct ZoomPolicy {
    double z0 = 6.0;
    double delta = 1.5;

    friend bool operator==(const ZoomPolicy&, const ZoomPolicy&) = default;
};

struct GridConfig {
    double e0 = 65536.0;
    int max_resolution = 12;
    int r_min = 3;
    int r_max = 5;
    ZoomPolicy zoom;
    double min_coverage = 0.05;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Contents of a tileset config file: [tileset], [grid], [encoding] and an
/// optional [variables] section that either points at a variable file
/// (`spec = "..."`, relative to the config) or declares [[variables.variable]]
/// entries inline.
struct TilesetConfig {
    std::string name = "tileset";
    GridConfig grid;
    EncodingConfig encoding;
    std::optional<std::filesystem::path> variables_file;
    std::vector<VariableSpec> variables;

    friend bool operator==(const TilesetConfig&, const TilesetConfig&) = default;
};

/// Throws ConfigError listing every problem found while reading.
TilesetConfig parse_tileset_config(std::string_view text, std::string_view source = "<config>",
                                   const std::filesystem::path& base_dir = {});
TilesetConfig load_tileset_config(const std::filesystem::path& path);

/// Variables the config declares itself or through its `spec` reference.
std::vector<VariableSpec> config_variables(const TilesetConfig& config);

/// Every problem with `config` against `variables`; empty means valid.
std::vector<std::string> validate_config(const TilesetConfig& config, std::span<const VariableSpec> variables);

struct TileSetMeta {
    std::string name;
    std::string projection_id;
    int r_min = 0;
    int r_max = 0;
    ZoomPolicy zoom;
    GridSpec grid;
    double min_coverage = 0.0;
    std::vector<VariableSpec> variables;
    EncodingConfig encoding;
    std::string created_at;
    std::string content_hash;                  // sha-256 hex
    std::map<int, std::size_t> tile_counts;  // per resolution

    friend bool operator==(const TileSetMeta&, const TileSetMeta&) = default;
};

struct TileSet {
    TileSetMeta meta;
    std::map<int, std::vector<EncodedTile>> tiles;  // sorted by cell within a layer

    const EncodedTile* find(const HexIndex& cell) const;
    const std::vector<EncodedTile>& layer(int resolution) const;
    std::size_t tile_count() const;
    HexGrid grid() const { return HexGrid(meta.grid); }

    friend bool operator==(const TileSet&, const TileSet&) = default;
};

struct CompileOptions {
    std::optional<std::string> created_at;  // defaults to SOURCE_DATE_EPOCH or now
};

/// Aggregates each resolution in the configured range, drops tiles below the
/// coverage floor, and encodes the rest.
TileSet compile(const Dataset& dataset, const TilesetConfig& config, const CompileOptions& options = {},
                std::vector<std::string>* warnings = nullptr);

/// clamp(r_min + floor((z - z0) / delta), r_min, r_max)
int resolution_for_zoom(double zoom, const TileSetMeta& meta);

std::string serialize(const TileSet& ts);
TileSet deserialize(std::string_view bytes);
void save(const TileSet& ts, const std::filesystem::path& path);
TileSet load(const std::filesystem::path& path);

/// Digest over the canonical meta (without timestamp and digest) and every
/// tile record.
std::string compute_content_hash(const TileSet& ts);

// Wire forms shared by the file format, the CLI and the HTTP server.
using ojson = nlohmann::ordered_json;

/// Compact JSON; doubles as 17 significant digits, keys in insertion order.
std::string canonical_dump(const ojson& value);

ojson encoding_to_json(const EncodingConfig& encoding);
ojson meta_to_json(const TileSetMeta& meta);
ojson meta_summary_json(const TileSetMeta& meta);
ojson tile_to_json(const EncodedTile& tile);
/// Tile record plus its polygon in projected meters and lon/lat.
ojson tile_geometry_json(const EncodedTile& tile, std::string_view projection_id);

/// Record, channels, parent and the children present in the tileset, or
/// nullopt when the cell has no tile.
std::optional<ojson> cell_report(const TileSet& ts, const HexIndex& cell);

}  // namespace hextiles
