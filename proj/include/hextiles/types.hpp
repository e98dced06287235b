#pragma once

#include <algorithm>
#include <cmath>

namespace hextiles {

/// Planar point in projected meters.
struct ProjectedPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const ProjectedPoint&, const ProjectedPoint&) = default;
};

inline bool is_finite(const ProjectedPoint& p) noexcept
{
    return std::isfinite(p.x) && std::isfinite(p.y);
}

/// Axis-aligned box; min <= max componentwise.
struct BBox {
    ProjectedPoint min;
    ProjectedPoint max;

    friend bool operator==(const BBox&, const BBox&) = default;

    double width() const noexcept { return max.x - min.x; }
    double height() const noexcept { return max.y - min.y; }

    bool contains(const ProjectedPoint& p) const noexcept
    {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }

    bool intersects(const BBox& o) const noexcept
    {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
    }

    void expand(const ProjectedPoint& p) noexcept
    {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }

    void expand(const BBox& o) noexcept
    {
        expand(o.min);
        expand(o.max);
    }

    static BBox around(const ProjectedPoint& p) noexcept { return {p, p}; }
};

}  // namespace hextiles
