#pragma once

#include <string>
#include <string_view>

#include "hextiles/types.hpp"

namespace hextiles {

struct LonLat {
    double lon = 0.0;  // degrees
    double lat = 0.0;  // degrees
};

/// Pure forward/inverse mapping between WGS84 lon/lat and the grid plane.
///
/// "web-mercator" is the spherical Mercator used by most web basemaps.
/// "planar" passes coordinates through unchanged and is meant for data that
/// is already in projected meters.
class Projection {
public:
    static Projection by_id(std::string_view id);

    const std::string& id() const noexcept { return id_; }

    ProjectedPoint forward(LonLat ll) const;
    LonLat inverse(ProjectedPoint p) const;

private:
    enum class Kind { web_mercator, planar };

    Projection(std::string id, Kind kind) : id_(std::move(id)), kind_(kind) {}

    std::string id_;
    Kind kind_;
};

inline constexpr std::string_view kDefaultProjection = "web-mercator";

}  // namespace hextiles
