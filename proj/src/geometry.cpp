#include "hextiles/geometry.hpp"

#include <cmath>

namespace hextiles {

namespace {

// Positive when p lies to the left of the directed line a->b.
double side(ProjectedPoint a, ProjectedPoint b, ProjectedPoint p)
{
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// One Sutherland-Hodgman pass: keep the part of `in` left of a->b.
void clip_halfplane(const Ring& in, ProjectedPoint a, ProjectedPoint b, Ring& out)
{
    out.clear();
    const std::size_t n = in.size();
    if (n == 0) {
        return;
    }
    ProjectedPoint prev = in[n - 1];
    double prev_side = side(a, b, prev);
    for (std::size_t i = 0; i < n; ++i) {
        const ProjectedPoint cur = in[i];
        const double cur_side = side(a, b, cur);
        const bool cur_in = cur_side >= 0.0;
        const bool prev_in = prev_side >= 0.0;
        if (cur_in != prev_in) {
            const double t = prev_side / (prev_side - cur_side);
            out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        if (cur_in) {
            out.push_back(cur);
        }
        prev = cur;
        prev_side = cur_side;
    }
}

Ring shifted(std::span<const ProjectedPoint> ring, ProjectedPoint origin)
{
    Ring out;
    out.reserve(ring.size());
    for (const auto& p : ring) {
        out.push_back({p.x - origin.x, p.y - origin.y});
    }
    return out;
}

BBox bounds_of(std::span<const ProjectedPoint> pts)
{
    BBox b = BBox::around(pts.front());
    for (const auto& p : pts) {
        b.expand(p);
    }
    return b;
}

}  // namespace

BBox PolygonGeometry::bounds() const
{
    return bounds_of(outer);
}

double ring_area(std::span<const ProjectedPoint> ring)
{
    const std::size_t n = ring.size();
    if (n < 3) {
        return 0.0;
    }
    // Shifting to the first vertex keeps the cross terms small for rings far
    // from the origin.
    const ProjectedPoint o = ring[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ax = ring[i].x - o.x;
        const double ay = ring[i].y - o.y;
        const double bx = ring[i + 1].x - o.x;
        const double by = ring[i + 1].y - o.y;
        twice += ax * by - bx * ay;
    }
    return 0.5 * twice;
}

double polygon_area(const PolygonGeometry& poly, std::vector<std::string>* diagnostics)
{
    double area = std::abs(ring_area(poly.outer));
    for (const auto& hole : poly.holes) {
        area -= std::abs(ring_area(hole));
    }
    if (area < 0.0) {
        if (diagnostics) {
            diagnostics->push_back("polygon holes exceed the outer ring; area clamped to 0");
        }
        return 0.0;
    }
    return area;
}

bool ring_contains(std::span<const ProjectedPoint> ring, ProjectedPoint p)
{
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const ProjectedPoint& a = ring[i];
        const ProjectedPoint& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

bool polygon_contains(const PolygonGeometry& poly, ProjectedPoint p)
{
    if (!ring_contains(poly.outer, p)) {
        return false;
    }
    for (const auto& hole : poly.holes) {
        if (ring_contains(hole, p)) {
            return false;
        }
    }
    return true;
}

Ring clip_ring_to_convex(std::span<const ProjectedPoint> subject, std::span<const ProjectedPoint> window)
{
    Ring current(subject.begin(), subject.end());
    Ring next;
    Ring reversed;
    if (ring_area(window) < 0.0) {
        reversed.assign(window.rbegin(), window.rend());
        window = reversed;
    }
    const std::size_t m = window.size();
    for (std::size_t i = 0; i < m && !current.empty(); ++i) {
        clip_halfplane(current, window[i], window[(i + 1) % m], next);
        current.swap(next);
    }
    if (current.size() < 3) {
        current.clear();
    }
    return current;
}

Ring clip_ring_to_hex(std::span<const ProjectedPoint> subject, const HexCell& cell)
{
    return clip_ring_to_convex(subject, cell.vertices);
}

double intersection_area(const PolygonGeometry& poly, const HexCell& cell)
{
    if (poly.outer.size() < 3 || !poly.bounds().intersects(cell.bounds())) {
        return 0.0;
    }
    // Clip in a frame centered on the cell. Projected coordinates reach 1e7 m,
    // where rounding each new vertex to a double swamps small overlaps; the
    // shift itself is exact for points near the cell.
    const Ring window = shifted(cell.vertices, cell.center);
    double area = std::abs(ring_area(clip_ring_to_convex(shifted(poly.outer, cell.center), window)));
    if (area == 0.0) {
        return 0.0;
    }
    for (const auto& hole : poly.holes) {
        area -= std::abs(ring_area(clip_ring_to_convex(shifted(hole, cell.center), window)));
    }
    return std::max(area, 0.0);
}

RingSplit split_ring(std::span<const ProjectedPoint> ring, ProjectedPoint a, ProjectedPoint b)
{
    const Ring in(ring.begin(), ring.end());
    RingSplit out;
    clip_halfplane(in, a, b, out.left);
    clip_halfplane(in, b, a, out.right);
    if (out.left.size() < 3) {
        out.left.clear();
    }
    if (out.right.size() < 3) {
        out.right.clear();
    }
    return out;
}

Ring normalize_ring(std::span<const ProjectedPoint> points)
{
    Ring out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (out.empty() || !(out.back() == p)) {
            out.push_back(p);
        }
    }
    while (out.size() > 1 && out.front() == out.back()) {
        out.pop_back();
    }
    return out;
}

}  // namespace hextiles
