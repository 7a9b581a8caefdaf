#include "sectorfhc/error.hpp"
#include "sectorfhc/sector.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace sectorfhc;

TEST_SUITE("sector")
{
    TEST_CASE("half-angle range")
    {
        CHECK_THROWS_AS(Sector(0.0), InputError);
        CHECK_THROWS_AS(Sector(-0.1), InputError);
        CHECK_THROWS_AS(Sector(std::numbers::pi / 2 + 1e-9), InputError);
        CHECK_THROWS_AS(Sector(std::nan("")), InputError);
        CHECK(Sector(std::numbers::pi / 2).is_half_plane());
        CHECK_FALSE(Sector(1.0).is_half_plane());
    }

    TEST_CASE("membership on and off the boundary rays")
    {
        for (double alpha : {0.1, 0.5, std::numbers::pi / 4, 1.2, std::numbers::pi / 2}) {
            const Sector s(alpha);
            for (double n : {1.0, 7.0, 1e4}) {
                if (!s.is_half_plane()) {
                    CHECK(s.contains({n, n * s.tan_alpha()}));
                    CHECK(s.contains({n, -n * s.tan_alpha()}));
                    CHECK_FALSE(s.contains({n, n * s.tan_alpha() * (1 + 1e-6)}));
                }
                CHECK(s.contains({n, 0.0}));
                CHECK_FALSE(s.contains({-n, 0.0}));
            }
            CHECK(s.contains({0.0, 0.0}));
        }
        CHECK(Sector(std::numbers::pi / 2).contains({0.0, 5.0}));
        CHECK_THROWS_AS(Sector(1.0).contains({std::numeric_limits<double>::infinity(), 0.0}), InputError);
    }

    TEST_CASE("truncated area")
    {
        const Sector s(0.3);
        CHECK(s.truncated_area(2.0) == doctest::Approx(0.3 * 4.0));
        CHECK(s.truncated_area(0.0) == 0.0);
    }

    TEST_CASE("segments")
    {
        const Sector s(std::numbers::pi / 4);
        CHECK(s.segment_length(3.0) == doctest::Approx(6.0));
        CHECK_THROWS_AS(Sector(std::numbers::pi / 2).segment_length(3.0), PreconditionError);

        const auto pts = s.segment_points(3.0, 2.0);
        REQUIRE(pts.size() == 4);
        CHECK(pts[0].x == 3.0);
        CHECK(pts[0].y == doctest::Approx(3.0));
        CHECK(pts[3].y == doctest::Approx(-3.0));
        CHECK(s.segment_point_count(3.0, 2.0) == 4);

        // R_n equal to the spacing keeps both endpoints.
        CHECK(s.segment_points(1.0, 2.0).size() == 2);
        CHECK_THROWS_AS(s.segment_points(1.0, 2.5), PreconditionError);
    }

    TEST_CASE("all segment points lie in the sector")
    {
        for (double alpha : {0.2, 0.7, 1.3}) {
            const Sector s(alpha);
            for (double n : {5.0, 40.0, 333.0})
                for (const auto& p : s.segment_points(n, 1.5))
                    CHECK(s.contains(p));
        }
    }
}
