#pragma once

#include <span>
#include <string>
#include <vector>

#include "hextiles/hexgrid.hpp"
#include "hextiles/types.hpp"

namespace hextiles {

/// Implicitly closed ring; the first point is not repeated at the end.
using Ring = std::vector<ProjectedPoint>;

struct PolygonGeometry {
    Ring outer;
    std::vector<Ring> holes;

    BBox bounds() const;
};

/// Shoelace area, counterclockwise positive.
double ring_area(std::span<const ProjectedPoint> ring);

/// |outer| minus the hole areas. Clamped at zero; when clamping happens a
/// message is appended to `diagnostics` if given.
double polygon_area(const PolygonGeometry& poly, std::vector<std::string>* diagnostics = nullptr);

/// Even-odd point-in-ring test.
bool ring_contains(std::span<const ProjectedPoint> ring, ProjectedPoint p);
bool polygon_contains(const PolygonGeometry& poly, ProjectedPoint p);

/// Clips `subject` against a convex window (either orientation) one edge
/// half-plane at a time. Concave subjects may come back with zero-width
/// bridges along the window boundary; their signed area is still exact.
/// Returns an empty ring when nothing is left.
Ring clip_ring_to_convex(std::span<const ProjectedPoint> subject, std::span<const ProjectedPoint> window);

Ring clip_ring_to_hex(std::span<const ProjectedPoint> subject, const HexCell& cell);

/// Area of poly inside the hexagon, >= 0.
double intersection_area(const PolygonGeometry& poly, const HexCell& cell);

/// Splits a ring by the line through a and b. `left` receives the part on the
/// counterclockwise side of a->b.
struct RingSplit {
    Ring left;
    Ring right;
};
RingSplit split_ring(std::span<const ProjectedPoint> ring, ProjectedPoint a, ProjectedPoint b);

/// Removes a repeated closing point and consecutive duplicates.
Ring normalize_ring(std::span<const ProjectedPoint> points);

}  // namespace hextiles
