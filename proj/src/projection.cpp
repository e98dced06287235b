#include "hextiles/projection.hpp"

#include <cmath>
#include <numbers>

#include "hextiles/error.hpp"

namespace hextiles {

namespace {

constexpr double kEarthRadius = 6378137.0;
constexpr double kMaxLatitude = 85.05112877980659;
constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

Projection Projection::by_id(std::string_view id)
{
    if (id == "web-mercator") {
        return {std::string(id), Kind::web_mercator};
    }
    if (id == "planar") {
        return {std::string(id), Kind::planar};
    }
    throw InvalidArgument("unknown projection '" + std::string(id) + "'");
}

ProjectedPoint Projection::forward(LonLat ll) const
{
    if (!std::isfinite(ll.lon) || !std::isfinite(ll.lat)) {
        throw InvalidArgument("coordinate is not finite");
    }
    if (kind_ == Kind::planar) {
        return {ll.lon, ll.lat};
    }
    if (std::abs(ll.lat) > kMaxLatitude || std::abs(ll.lon) > 180.0) {
        throw InvalidArgument("coordinate outside the web-mercator extent");
    }
    const double x = kEarthRadius * ll.lon * kDeg;
    const double y = kEarthRadius * std::log(std::tan(std::numbers::pi / 4.0 + ll.lat * kDeg / 2.0));
    return {x, y};
}

LonLat Projection::inverse(ProjectedPoint p) const
{
    if (kind_ == Kind::planar) {
        return {p.x, p.y};
    }
    const double lon = p.x / kEarthRadius / kDeg;
    const double lat = (2.0 * std::atan(std::exp(p.y / kEarthRadius)) - std::numbers::pi / 2.0) / kDeg;
    return {lon, lat};
}

}  // namespace hextiles
