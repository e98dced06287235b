#include <doctest.h>

#include <cmath>

#include "hextiles/error.hpp"
#include "hextiles/projection.hpp"

using namespace hextiles;

TEST_CASE("web mercator reference points")
{
    const auto p = Projection::by_id("web-mercator");
    CHECK(p.id() == "web-mercator");
    const auto origin = p.forward({0.0, 0.0});
    CHECK(origin.x == 0.0);
    CHECK(origin.y == doctest::Approx(0.0));
    // Half the equator of the WGS84 sphere.
    CHECK(p.forward({180.0, 0.0}).x == doctest::Approx(20037508.342789244).epsilon(1e-15));
    // The square extent: the latitude limit maps to the same half width.
    CHECK(p.forward({0.0, 85.05112877980659}).y == doctest::Approx(20037508.342789244).epsilon(1e-12));
    // Reference values from an independent float64 evaluation.
    const auto d = p.forward({-96.8, 32.78});
    CHECK(d.x == doctest::Approx(-10775726.708788881).epsilon(1e-12));
    CHECK(d.y == doctest::Approx(3866138.9184606387).epsilon(1e-12));
}

TEST_CASE("web mercator inverse round-trips")
{
    const auto p = Projection::by_id("web-mercator");
    for (double lon = -179.0; lon <= 179.0; lon += 17.3) {
        for (double lat = -84.0; lat <= 84.0; lat += 12.1) {
            const auto back = p.inverse(p.forward({lon, lat}));
            CHECK(back.lon == doctest::Approx(lon).epsilon(1e-12));
            CHECK(back.lat == doctest::Approx(lat).epsilon(1e-12));
        }
    }
}

TEST_CASE("planar passes coordinates through")
{
    const auto p = Projection::by_id("planar");
    const auto q = p.forward({1234.5, -6789.25});
    CHECK(q.x == 1234.5);
    CHECK(q.y == -6789.25);
    CHECK(p.inverse(q).lon == 1234.5);
}

TEST_CASE("projection errors")
{
    CHECK_THROWS_AS(Projection::by_id("utm"), InvalidArgument);
    const auto p = Projection::by_id("web-mercator");
    CHECK_THROWS_AS(p.forward({0.0, 89.0}), InvalidArgument);
    CHECK_THROWS_AS(p.forward({181.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(p.forward({NAN, 0.0}), InvalidArgument);
}
