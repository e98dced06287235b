#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hextiles/types.hpp"

namespace hextiles {

/// Identity of one cell: resolution plus axial lattice coordinates at that
/// resolution. Ordering is (resolution, q, r).
struct HexIndex {
    int resolution = 0;
    std::int64_t q = 0;
    std::int64_t r = 0;

    friend auto operator<=>(const HexIndex&, const HexIndex&) = default;

    /// "r{resolution}:{q}:{r}", e.g. "r5:3:-2".
    std::string to_string() const;
    static HexIndex parse(std::string_view text);
};

struct HexCell {
    HexIndex index;
    ProjectedPoint center;
    std::array<ProjectedPoint, 6> vertices;  // counterclockwise
    double edge_length = 0.0;

    BBox bounds() const noexcept;

    friend bool operator==(const HexCell&, const HexCell&) = default;
};

struct GridSpec {
    double root_edge = 65536.0;  // edge length at resolution 0, meters
    int max_resolution = 12;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Planar aperture-7 hexagon hierarchy.
///
/// Resolution 0 is a flat-top lattice with edge `root_edge` centered on the
/// origin. Every step down scales the lattice by 1/sqrt(7) and rotates it
/// counterclockwise by atan(sqrt(3)/5), so each parent center is also a
/// child center and the parent lattice is an index-7 sublattice of the child
/// lattice. All members are const and thread-safe.
class HexGrid {
public:
    explicit HexGrid(GridSpec spec = {});

    const GridSpec& spec() const noexcept { return spec_; }
    int max_resolution() const noexcept { return spec_.max_resolution; }

    double edge_length(int resolution) const;
    double rotation(int resolution) const;  // radians, counterclockwise
    double cell_area(int resolution) const;

    ProjectedPoint center(const HexIndex& h) const;
    HexCell boundary(const HexIndex& h) const;

    /// Cell whose hexagon contains p. Points on a shared edge or vertex go to
    /// the candidate with the smallest (q, r).
    HexIndex cell_of_point(ProjectedPoint p, int resolution) const;

    /// Center child first, then the six ring children counterclockwise,
    /// starting with the one closest to the parent's local +x axis.
    std::array<HexIndex, 7> children(const HexIndex& h) const;

    /// Coarser cell whose center is nearest h's center.
    HexIndex parent(const HexIndex& h) const;

    /// Every cell whose hexagon intersects the closed box, sorted by (q, r).
    std::vector<HexIndex> cells_covering(const BBox& box, int resolution) const;

    /// Same-resolution neighbors, counterclockwise from the +q direction.
    static std::array<HexIndex, 6> neighbors(const HexIndex& h);

    void check_index(const HexIndex& h) const;

private:
    void check_resolution(int resolution) const;
    // Fractional axial coordinates of p in the lattice at `resolution`.
    std::array<double, 2> to_axial(ProjectedPoint p, int resolution) const;

    GridSpec spec_;
    std::vector<double> edge_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Rotation between consecutive resolutions, atan(sqrt(3)/5).
double aperture7_rotation();

}  // namespace hextiles

template <>
struct std::hash<hextiles::HexIndex> {
    std::size_t operator()(const hextiles::HexIndex& h) const noexcept
    {
        std::size_t seed = std::hash<std::int64_t>{}(h.q);
        seed ^= std::hash<std::int64_t>{}(h.r) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        seed ^= std::hash<int>{}(h.resolution) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        return seed;
    }
};
