#include <doctest.h>

#include <cmath>
#include <random>

#include "itep/geometry.hpp"

using namespace itep;

namespace {

bool approx_list(const std::vector<double>& got, const std::vector<double>& want, double tol)
{
    if (got.size() != want.size()) {
        return false;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (std::abs(got[i] - want[i]) > tol) {
            return false;
        }
    }
    return true;
}

SimpleDomain two_balls()
{
    return SimpleDomain::balls({{Vec3(2, 0, 0), 1.0}, {Vec3(5, 0, 0), 1.0}});
}

} // namespace

TEST_CASE("intersect_ray examples")
{
    const auto unit = SimpleDomain::balls({{Vec3::Zero(), 1.0}});
    const auto s = intersect_ray(unit, Vec3(0.6, 0.0, 0.8));
    CHECK(approx_list(s.radii, {1.0}, 1e-14));
    CHECK(s.origin_inside());
    CHECK_FALSE(s.inside.back());

    const auto off = SimpleDomain::balls({{Vec3(2, 0, 0), 1.0}});
    const auto t = intersect_ray(off, Vec3(1, 0, 0));
    CHECK(approx_list(t.radii, {1.0, 3.0}, 1e-14));
    CHECK(t.inside == std::vector<bool>{false, true, false});

    CHECK(intersect_ray(off, Vec3(0, 0, 1)).radii.empty());
}

TEST_CASE("filter_tangent examples")
{
    const auto graze = SimpleDomain::balls({{Vec3(2, 0, 1), 1.0}});
    const auto s = intersect_ray(graze, Vec3(1, 0, 0));
    CHECK(s.radii.empty());
    CHECK(s.inside == std::vector<bool>{false});

    const auto off = SimpleDomain::balls({{Vec3(2, 0, 0), 1.0}});
    const auto both = filter_tangent(off, Vec3(1, 0, 0), {{1.0, false}, {3.0, false}});
    CHECK(approx_list(both.radii, {1.0, 3.0}, 0.0));

    const auto mid = filter_tangent(off, Vec3(1, 0, 0), {{1.0, false}, {2.0, true}, {3.0, false}});
    CHECK(approx_list(mid.radii, {1.0, 3.0}, 0.0));
    CHECK(mid.inside == std::vector<bool>{false, true, false});
}

TEST_CASE("implicit level sets: ellipsoid and torus")
{
    const auto e = SimpleDomain::ellipsoid(Vec3(3, 0, 0), Vec3(1.0, 0.5, 0.5));
    const auto s = intersect_ray(e, Vec3(1, 0, 0));
    CHECK(approx_list(s.radii, {2.0, 4.0}, 1e-11));

    // grazing contact of an implicit sphere is found and discarded
    const auto graze = SimpleDomain::ellipsoid(Vec3(2, 0, 1), Vec3(1, 1, 1));
    CHECK(intersect_ray(graze, Vec3(1, 0, 0)).radii.empty());

    // ray through a torus in its symmetry plane crosses the tube twice
    const auto tor = SimpleDomain::torus(Vec3::Zero(), 2.0, 0.5);
    const auto t = intersect_ray(tor, Vec3(1, 0, 0));
    CHECK(approx_list(t.radii, {1.5, 2.5}, 1e-11));
    CHECK_FALSE(t.origin_inside());
}

TEST_CASE("inside_indicator examples")
{
    const auto unit = SimpleDomain::balls({{Vec3::Zero(), 1.0}});
    CHECK(inside_indicator(unit, Vec3::Zero()));
    CHECK_FALSE(inside_indicator(unit, Vec3(10, 0, 0)));
    CHECK_FALSE(inside_indicator(unit, Vec3(1, 0, 0)));
}

TEST_CASE("covered_length examples")
{
    const auto unit = SimpleDomain::balls({{Vec3::Zero(), 1.0}});
    CHECK(covered_length(unit, Vec3(0, 1, 0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(covered_length(two_balls(), Vec3(1, 0, 0)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(covered_length(two_balls(), Vec3(0, 1, 0)) == 0.0);
}

TEST_CASE("validation")
{
    CHECK_THROWS_AS(SimpleDomain::balls({}), InvalidInput);
    CHECK_THROWS_AS(SimpleDomain::balls({{Vec3::Zero(), 0.0}}), InvalidInput);
    CHECK_THROWS_AS(intersect_ray(two_balls(), Vec3(1, 1, 0)), InvalidInput);
    CHECK_THROWS_AS(SimpleDomain::torus(Vec3::Zero(), 0.5, 1.0), InvalidInput);
}

TEST_CASE("oscillating boundary beyond the crossing cap is reported")
{
    const auto wavy = SimpleDomain::implicit([](const Vec3& x) { return std::sin(60.0 * x.x()); }, 5.0);
    CHECK_THROWS_AS(intersect_ray(wavy, Vec3(1, 0, 0)), NumericError);
}

TEST_CASE("radii are roots, parity alternates, length matches sampling")
{
    const auto dom = SimpleDomain::balls({{Vec3(1.5, 0.3, 0), 1.0}, {Vec3(3.2, -0.2, 0.1), 0.9},
                                          {Vec3(-2, 1, 1), 1.2}, {Vec3(0, 0, 0.2), 0.4}});
    const auto tor = SimpleDomain::torus(Vec3(0.2, 0.1, 0.0), 2.0, 0.6);
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const Vec3 d = Vec3(g(rng), g(rng), 0.3 * g(rng)).normalized();
        for (const SimpleDomain* D : {&dom, &tor}) {
            const auto s = intersect_ray(*D, d);
            for (double r : s.radii) {
                CHECK(std::abs(D->level(r * d)) < 1e-10);
            }
            double left = 0.0;
            for (std::size_t i = 0; i < s.radii.size(); ++i) {
                CHECK(inside_indicator(*D, 0.5 * (left + s.radii[i]) * d) == s.inside[i]);
                CHECK(s.inside[i] != s.inside[i + 1]);
                left = s.radii[i];
            }
            if (!s.origin_inside()) {
                CHECK(s.radii.size() % 2 == 0);
            }
            const int n = 20000;
            const double R0 = D->bounding_radius();
            int hits = 0;
            for (int i = 0; i < n; ++i) {
                hits += inside_indicator(*D, (i + 0.5) / n * R0 * d) ? 1 : 0;
            }
            CHECK(std::abs(hits * R0 / n - covered_length(*D, d)) < 1e-3);
        }
    }
}
