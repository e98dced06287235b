#include "hextiles/hexgrid.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "hextiles/error.hpp"

namespace hextiles {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Axial neighbor offsets in counterclockwise order. For a flat-top lattice
// (+1, 0) points at 30 degrees, (0, +1) at 90 degrees, and so on.
constexpr std::array<std::array<std::int64_t, 2>, 6> kDirections{{
    {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1},
}};

// The child lattice is rotated +19.1 degrees against the parent, so the ring
// child directions sit at 49.1, 109.1, ..., 349.1 degrees in the parent frame.
// The one at 349.1 (-10.9) is closest to the parent's +x axis.
constexpr std::size_t kFirstRingChild = 5;

std::array<std::int64_t, 2> axial_round(double qf, double rf)
{
    const double sf = -qf - rf;
    double q = std::round(qf);
    double r = std::round(rf);
    const double s = std::round(sf);
    const double dq = std::abs(q - qf);
    const double dr = std::abs(r - rf);
    const double ds = std::abs(s - sf);
    if (dq > dr && dq > ds) {
        q = -r - s;
    } else if (dr > ds) {
        r = -q - s;
    }
    return {static_cast<std::int64_t>(q), static_cast<std::int64_t>(r)};
}

// Squared distance in units of the lattice spacing between two points given
// as integer axial offsets.
std::int64_t lattice_norm2(std::int64_t dq, std::int64_t dr)
{
    return dq * dq + dq * dr + dr * dr;
}

// Separating-axis test of a convex polygon against a closed box.
bool hexagon_touches_box(const HexCell& cell, const BBox& box, double tol)
{
    const BBox hb = cell.bounds();
    if (hb.max.x < box.min.x - tol || hb.min.x > box.max.x + tol || hb.max.y < box.min.y - tol ||
        hb.min.y > box.max.y + tol) {
        return false;
    }
    const std::array<ProjectedPoint, 4> corners{{
        box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y},
    }};
    // Opposite edges of a hexagon are parallel: three normals suffice.
    for (std::size_t i = 0; i < 3; ++i) {
        const ProjectedPoint& a = cell.vertices[i];
        const ProjectedPoint& b = cell.vertices[i + 1];
        const double nx = b.y - a.y;
        const double ny = a.x - b.x;
        const double len = std::hypot(nx, ny);
        double hmin = std::numeric_limits<double>::infinity();
        double hmax = -hmin;
        for (const auto& v : cell.vertices) {
            const double d = (v.x * nx + v.y * ny) / len;
            hmin = std::min(hmin, d);
            hmax = std::max(hmax, d);
        }
        double bmin = std::numeric_limits<double>::infinity();
        double bmax = -bmin;
        for (const auto& c : corners) {
            const double d = (c.x * nx + c.y * ny) / len;
            bmin = std::min(bmin, d);
            bmax = std::max(bmax, d);
        }
        if (hmax < bmin - tol || bmax < hmin - tol) {
            return false;
        }
    }
    return true;
}

}  // namespace

double aperture7_rotation()
{
    return std::atan(kSqrt3 / 5.0);
}

std::string HexIndex::to_string() const
{
    return "r" + std::to_string(resolution) + ":" + std::to_string(q) + ":" + std::to_string(r);
}

HexIndex HexIndex::parse(std::string_view text)
{
    const auto fail = [&] { return ParseError("malformed cell index '" + std::string(text) + "'"); };
    if (text.size() < 2 || text.front() != 'r') {
        throw fail();
    }
    HexIndex h;
    const char* p = text.data() + 1;
    const char* end = text.data() + text.size();

    auto res = std::from_chars(p, end, h.resolution);
    if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ':' || h.resolution < 0) {
        throw fail();
    }
    res = std::from_chars(res.ptr + 1, end, h.q);
    if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ':') {
        throw fail();
    }
    res = std::from_chars(res.ptr + 1, end, h.r);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw fail();
    }
    return h;
}

BBox HexCell::bounds() const noexcept
{
    BBox b = BBox::around(vertices[0]);
    for (const auto& v : vertices) {
        b.expand(v);
    }
    return b;
}

HexGrid::HexGrid(GridSpec spec) : spec_(spec)
{
    if (!(spec_.root_edge > 0.0) || !std::isfinite(spec_.root_edge)) {
        throw InvalidArgument("root edge length must be positive and finite");
    }
    if (spec_.max_resolution < 0 || spec_.max_resolution > 30) {
        throw InvalidArgument("max_resolution must lie in [0, 30]");
    }
    const double step = aperture7_rotation();
    for (int k = 0; k <= spec_.max_resolution; ++k) {
        edge_.push_back(spec_.root_edge * std::pow(7.0, -k / 2.0));
        cos_.push_back(std::cos(k * step));
        sin_.push_back(std::sin(k * step));
    }
}

void HexGrid::check_resolution(int resolution) const
{
    if (resolution < 0 || resolution > spec_.max_resolution) {
        throw InvalidArgument("resolution " + std::to_string(resolution) + " outside [0, " +
                              std::to_string(spec_.max_resolution) + "]");
    }
}

void HexGrid::check_index(const HexIndex& h) const
{
    check_resolution(h.resolution);
}

double HexGrid::edge_length(int resolution) const
{
    check_resolution(resolution);
    return edge_[resolution];
}

double HexGrid::rotation(int resolution) const
{
    check_resolution(resolution);
    return resolution * aperture7_rotation();
}

double HexGrid::cell_area(int resolution) const
{
    const double e = edge_length(resolution);
    return 1.5 * kSqrt3 * e * e;
}

ProjectedPoint HexGrid::center(const HexIndex& h) const
{
    check_index(h);
    const double e = edge_[h.resolution];
    const double lx = e * 1.5 * static_cast<double>(h.q);
    const double ly = e * kSqrt3 * (static_cast<double>(h.r) + 0.5 * static_cast<double>(h.q));
    const double c = cos_[h.resolution];
    const double s = sin_[h.resolution];
    return {c * lx - s * ly, s * lx + c * ly};
}

HexCell HexGrid::boundary(const HexIndex& h) const
{
    HexCell cell;
    cell.index = h;
    cell.center = center(h);
    cell.edge_length = edge_[h.resolution];
    const double base = rotation(h.resolution);
    for (int i = 0; i < 6; ++i) {
        const double a = base + i * std::numbers::pi / 3.0;
        cell.vertices[i] = {cell.center.x + cell.edge_length * std::cos(a),
                            cell.center.y + cell.edge_length * std::sin(a)};
    }
    return cell;
}

std::array<double, 2> HexGrid::to_axial(ProjectedPoint p, int resolution) const
{
    const double c = cos_[resolution];
    const double s = sin_[resolution];
    const double e = edge_[resolution];
    const double lx = (c * p.x + s * p.y) / e;
    const double ly = (-s * p.x + c * p.y) / e;
    return {lx * (2.0 / 3.0), -lx / 3.0 + ly / kSqrt3};
}

HexIndex HexGrid::cell_of_point(ProjectedPoint p, int resolution) const
{
    check_resolution(resolution);
    if (!is_finite(p)) {
        throw InvalidArgument("point is not finite");
    }
    const auto [qf, rf] = to_axial(p, resolution);
    const auto [q0, r0] = axial_round(qf, rf);

    // The hexagon is the Voronoi cell of its center, so the containing cell is
    // the nearest center. Rounding only gives a candidate; resolve among it and
    // its ring so boundary points tie-break deterministically.
    const double e = edge_[resolution];
    const double tol = std::max(4e-9 / e, 1e-12);
    HexIndex best{resolution, q0, r0};
    double best_d = std::numeric_limits<double>::infinity();
    std::array<HexIndex, 7> candidates;
    candidates[0] = best;
    const auto ring = neighbors(best);
    std::copy(ring.begin(), ring.end(), candidates.begin() + 1);

    std::array<double, 7> dist{};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const ProjectedPoint cc = center(candidates[i]);
        dist[i] = (std::pow(cc.x - p.x, 2) + std::pow(cc.y - p.y, 2)) / (e * e);
        best_d = std::min(best_d, dist[i]);
    }
    bool found = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (dist[i] <= best_d + tol && (!found || candidates[i] < best)) {
            best = candidates[i];
            found = true;
        }
    }
    return best;
}

std::array<HexIndex, 6> HexGrid::neighbors(const HexIndex& h)
{
    std::array<HexIndex, 6> out;
    for (std::size_t i = 0; i < 6; ++i) {
        out[i] = {h.resolution, h.q + kDirections[i][0], h.r + kDirections[i][1]};
    }
    return out;
}

std::array<HexIndex, 7> HexGrid::children(const HexIndex& h) const
{
    check_index(h);
    if (h.resolution >= spec_.max_resolution) {
        throw HierarchyExhausted("cell " + h.to_string() + " is at the finest resolution");
    }
    // Parent basis vectors expressed in the child lattice: (1,0) -> (3,-1),
    // (0,1) -> (1,2).
    const HexIndex mid{h.resolution + 1, 3 * h.q + h.r, -h.q + 2 * h.r};
    std::array<HexIndex, 7> out;
    out[0] = mid;
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& d = kDirections[(kFirstRingChild + i) % 6];
        out[i + 1] = {mid.resolution, mid.q + d[0], mid.r + d[1]};
    }
    return out;
}

HexIndex HexGrid::parent(const HexIndex& h) const
{
    check_index(h);
    if (h.resolution == 0) {
        throw RootHasNoParent("cell " + h.to_string() + " is a root cell");
    }
    // Inverse of the child embedding (Q,R) -> (3Q+R, -Q+2R); determinant 7.
    const double qf = (2.0 * static_cast<double>(h.q) - static_cast<double>(h.r)) / 7.0;
    const double rf = (static_cast<double>(h.q) + 3.0 * static_cast<double>(h.r)) / 7.0;
    const auto [q0, r0] = axial_round(qf, rf);

    const HexIndex seed{h.resolution - 1, q0, r0};
    std::array<HexIndex, 7> candidates;
    candidates[0] = seed;
    const auto ring = neighbors(seed);
    std::copy(ring.begin(), ring.end(), candidates.begin() + 1);

    HexIndex best = seed;
    std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
    for (const auto& c : candidates) {
        const std::int64_t d = lattice_norm2(h.q - (3 * c.q + c.r), h.r - (-c.q + 2 * c.r));
        if (d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

std::vector<HexIndex> HexGrid::cells_covering(const BBox& box, int resolution) const
{
    check_resolution(resolution);
    if (!is_finite(box.min) || !is_finite(box.max)) {
        throw InvalidArgument("bounding box is not finite");
    }
    if (box.min.x > box.max.x || box.min.y > box.max.y) {
        throw InvalidArgument("bounding box min exceeds max");
    }
    const std::array<ProjectedPoint, 4> corners{{
        box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y},
    }};
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = -qmin;
    double rmin = qmin;
    double rmax = -qmin;
    for (const auto& c : corners) {
        const auto [qf, rf] = to_axial(c, resolution);
        qmin = std::min(qmin, qf);
        qmax = std::max(qmax, qf);
        rmin = std::min(rmin, rf);
        rmax = std::max(rmax, rf);
    }
    // A hexagon reaching the box has its center within one circumradius of it,
    // which moves either axial coordinate by at most 2/3.
    const auto q_lo = static_cast<std::int64_t>(std::floor(qmin)) - 1;
    const auto q_hi = static_cast<std::int64_t>(std::ceil(qmax)) + 1;
    const auto r_lo = static_cast<std::int64_t>(std::floor(rmin)) - 1;
    const auto r_hi = static_cast<std::int64_t>(std::ceil(rmax)) + 1;

    const double tol = 1e-9;
    std::vector<HexIndex> out;
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
        for (std::int64_t r = r_lo; r <= r_hi; ++r) {
            const HexIndex h{resolution, q, r};
            if (hexagon_touches_box(boundary(h), box, tol)) {
                out.push_back(h);
            }
        }
    }
    return out;
}

}  // namespace hextiles
