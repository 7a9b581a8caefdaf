#include "sectorfhc/error.hpp"
#include "sectorfhc/weights.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sectorfhc;

namespace {

const double kAlpha = std::numbers::pi / 4;

// Polar midpoint sum of a radial function over the sector, r in [a, b].
double polar_sum(double (*f)(double), double a, double b, int n = 200000)
{
    const double dr = (b - a) / n;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        const double r = a + (i + 0.5) * dr;
        s += f(r) * r * dr;
    }
    return 2 * kAlpha * s;
}

} // namespace

TEST_SUITE("weights")
{
    TEST_CASE("catalog values")
    {
        const auto g = catalog_weight("gauss");
        const auto e = catalog_weight("exp");
        const auto c = catalog_weight("cubic");
        CHECK(g({1, 1}) == doctest::Approx(std::exp(-2.0)));
        CHECK(e({3, 4}) == doctest::Approx(std::exp(-5.0)));
        CHECK(c({0.5, 0}) == 1.0);
        CHECK(c({2, 0}) == doctest::Approx(0.125));
        CHECK(catalog_weight("chaouchi")({2, 1}) > 0.0);
        CHECK_THROWS_AS(catalog_weight("chaouchi", Sector(0.5)), CatalogError);
        CHECK_THROWS_AS(catalog_weight("nope"), CatalogError);
        CHECK(catalog_names().size() == 4);
    }

    TEST_CASE("closed-form tails against polar sums")
    {
        CHECK(catalog_weight("exp").radial_tail(2.0) ==
              doctest::Approx(polar_sum([](double r) { return std::exp(-r); }, 2.0, 60.0)).epsilon(1e-8));
        CHECK(catalog_weight("gauss").radial_tail(0.5) ==
              doctest::Approx(polar_sum([](double r) { return std::exp(-r * r); }, 0.5, 12.0)).epsilon(1e-8));
        const double cubic_tail = polar_sum([](double r) { return r <= 1 ? 1.0 : 1 / (r * r * r); }, 0.5, 1.0) +
                                  2 * kAlpha; // integral of r^-2 from 1 to inf is 1
        CHECK(catalog_weight("cubic").radial_tail(0.5) == doctest::Approx(cubic_tail).epsilon(1e-8));
        CHECK_FALSE(catalog_weight("chaouchi").has_radial_tail());
    }

    TEST_CASE("numeric tail matches the closed form")
    {
        const auto e = catalog_weight("exp");
        const WeightFn bare("exp-numeric", e.sector(), [e](const SectorPoint& p) { return e(p); }, e.admissibility());
        CHECK(tail_mass(bare, 3.0) == doctest::Approx(e.radial_tail(3.0)).epsilon(1e-6));
        CHECK_THROWS_AS(tail_mass(catalog_weight("chaouchi"), 1.0), CriterionInapplicable);
    }

    TEST_CASE("weight integrals")
    {
        const auto g = integrate_weight(catalog_weight("gauss"), 1e-8);
        CHECK(g.status == IntegralStatus::finite);
        CHECK(g.value == doctest::Approx(kAlpha).epsilon(1e-6));
        CHECK(integrate_weight(catalog_weight("exp"), 1e-8).value == doctest::Approx(2 * kAlpha).epsilon(1e-6));
        CHECK(integrate_weight(catalog_weight("cubic"), 1e-8).value == doctest::Approx(3 * kAlpha).epsilon(1e-6));
        CHECK(integrate_weight(catalog_weight("chaouchi"), 1e-8).status == IntegralStatus::divergent);
        CHECK(integrate_annulus(catalog_weight("exp"), 1.0, 2.0, 1e-10) ==
              doctest::Approx(2 * kAlpha * (2 * std::exp(-1.0) - 3 * std::exp(-2.0))).epsilon(1e-9));
    }

    TEST_CASE("admissibility constants")
    {
        CHECK(check_admissibility(catalog_weight("exp"), 1, 5000).pass);
        CHECK(check_admissibility(catalog_weight("cubic"), 1, 5000).pass);
        CHECK(check_admissibility(catalog_weight("chaouchi"), 1, 5000).pass);
        // No finite constants exist for e^{-|t|^2}; the placeholder claim is refuted.
        CHECK_FALSE(check_admissibility(catalog_weight("gauss"), 1, 5000).pass);
        CHECK_THROWS_AS(check_admissibility(catalog_weight("exp"), 1, 0), InputError);
    }

    TEST_CASE("sublevel and erosion sets")
    {
        const auto e = catalog_weight("exp");
        const auto sub = sublevel_set(e, std::exp(-2.0));
        CHECK(sub.contains({2.5, 0}));
        CHECK_FALSE(sub.contains({1.5, 0}));
        const auto ero = erosion_set(e, std::exp(-2.0), 1.0);
        CHECK(ero.contains({2.5, 0}));
        CHECK_FALSE(ero.contains({1.5, 0.5}));
        const auto cover = erosion_cover(e.sector(), 1.0);
        REQUIRE_FALSE(cover.empty());
        CHECK(cover.front() == SectorPoint{0, 0});
    }

    TEST_CASE("verdicts")
    {
        CHECK(check_sufficient(catalog_weight("exp"), 1e-6).status == Verdict::pass);
        CHECK(check_sufficient(catalog_weight("chaouchi"), 1e-6).status == Verdict::fail);

        NecessaryOptions opt;
        opt.samples = 20000;
        opt.seed = 4;
        opt.workers = 1;
        CHECK(check_necessary(catalog_weight("exp"), opt).status == Verdict::pass);
        const auto ch = check_necessary(catalog_weight("chaouchi"), opt);
        CHECK(ch.status == Verdict::fail);
        REQUIRE(ch.failing_epsilon);

        WeightVerdict v{"chaouchi", check_sufficient(catalog_weight("chaouchi"), 1e-6), ch};
        const auto doc = v.to_json();
        CHECK(doc["necessary"]["status"] == "fail");
        CHECK(doc["sufficient"]["integral"] == "divergent");
    }

    TEST_CASE("cone complement density")
    {
        for (double k : {-0.9, -0.5, 0.0, 0.5})
            for (double t : {1.0, 100.0})
                CHECK(cone_complement_density(k, t) ==
                      doctest::Approx((kAlpha + std::atan(k)) / (2 * kAlpha)).epsilon(1e-12));
    }
}
