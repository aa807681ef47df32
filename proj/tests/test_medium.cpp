#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "itep/medium.hpp"

using namespace itep;

namespace {

MediumField square_table()
{
    // n(rho) = (1 + rho)^2 sampled on [0, 1]
    std::vector<double> rho;
    std::vector<double> n;
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        rho.push_back(x);
        n.push_back((1 + x) * (1 + x));
    }
    return MediumField::tabulated(Vec3::Zero(), rho, n);
}

} // namespace

TEST_CASE("restrict_to_ray examples")
{
    const auto ball = MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.0);
    const Vec3 d = Vec3(1.0, 2.0, -0.5).normalized();
    const auto p = restrict_to_ray(ball, d);
    CHECK(p(0.5) == 4.0);
    CHECK(p(2.0) == 1.0);
    REQUIRE(p.breakpoints().size() == 1);
    CHECK(p.breakpoints()[0] == doctest::Approx(1.0).epsilon(1e-15));

    const auto two = MediumField::union_of_balls({{Vec3(2, 0, 0), 1.0, 2.25}, {Vec3(5, 0, 0), 1.0, 2.25}});
    const auto q = restrict_to_ray(two, Vec3(1, 0, 0));
    const std::vector<double> expected{1, 3, 4, 6};
    REQUIRE(q.breakpoints().size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(q.breakpoints()[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
    CHECK(q.support_end() == doctest::Approx(6.0));

    const auto bg = restrict_to_ray(MediumField::background(), Vec3(0, 0, 1));
    CHECK(bg.support_end() == 0.0);
    CHECK(bg(0.0) == 1.0);
    CHECK(bg(17.0) == 1.0);

    CHECK_THROWS_AS(restrict_to_ray(ball, Vec3(1.0, 1e-5, 0.0)), InvalidInput);
}

TEST_CASE("medium validation")
{
    CHECK_THROWS_AS(MediumField::uniform_ball(Vec3::Zero(), -1.0, 4.0), InvalidInput);
    CHECK_THROWS_AS(MediumField::uniform_ball(Vec3::Zero(), 1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(MediumField::radially_stratified(Vec3::Zero(), {{0.5, {2.0}}, {1.0, {3.0}}}),
                    InvalidInput);
    CHECK_NOTHROW(MediumField::radially_stratified(Vec3::Zero(), {{0.5, {2.0}}, {1.0, {1.0, 2.0}}}));
    CHECK_THROWS_AS(MediumField::tabulated(Vec3::Zero(), {0.0, 0.5, 0.4}, {1, 1, 1}), InvalidInput);

    // n(0) != 1 is accepted with a warning
    const auto ball = MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.0);
    CHECK(ball.warnings().size() == 1);
    const auto off = MediumField::uniform_ball(Vec3(3, 0, 0), 1.0, 4.0);
    CHECK(off.warnings().empty());
}

TEST_CASE("travel_time examples")
{
    const auto bg = restrict_to_ray(MediumField::background(), Vec3(1, 0, 0));
    CHECK(std::abs(travel_time(bg, 3.7) - 3.7) < 1e-14);

    const auto ball = restrict_to_ray(MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.0), Vec3(0, 1, 0));
    CHECK(std::abs(travel_time(ball, 1.0) - 2.0) < 1e-12);
    CHECK(std::abs(travel_time(ball, 2.5) - 3.5) < 1e-12);

    // antiderivative of (1 + rho) is rho + rho^2 / 2
    const auto table = restrict_to_ray(square_table(), Vec3(0, 0, 1));
    CHECK(std::abs(table(0.37) - 1.37 * 1.37) < 1e-12);
    CHECK(std::abs(travel_time(table, 1.0) - 1.5) < 1e-9);
    CHECK_THROWS_AS(travel_time(table, -1.0), InvalidInput);
}

TEST_CASE("liouville_transform examples")
{
    const std::vector<std::pair<double, Complex>> samples{{0.1, {1, 2}}, {0.5, 1.0}, {1.7, {0, -3}}};
    const auto bg = restrict_to_ray(MediumField::background(), Vec3(1, 0, 0));
    const auto same = liouville_transform(bg, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(std::abs(same[i].first - samples[i].first) < 1e-14);
        CHECK(same[i].second == samples[i].second);
    }

    const auto ball = restrict_to_ray(MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.0), Vec3(1, 0, 0));
    const std::vector<std::pair<double, Complex>> one{{0.5, 1.0}};
    const auto t = liouville_transform(ball, one);
    CHECK(std::abs(t[0].first - 1.0) < 1e-12);
    CHECK(std::abs(t[0].second - std::sqrt(2.0)) < 1e-14);

    const auto table = restrict_to_ray(square_table(), Vec3(1, 0, 0));
    std::vector<std::pair<double, Complex>> grid;
    for (int i = 0; i <= 40; ++i) {
        grid.emplace_back(0.05 * i, 1.0);
    }
    const auto xi = liouville_transform(table, grid);
    for (std::size_t i = 1; i < xi.size(); ++i) {
        CHECK(xi[i].first > xi[i - 1].first);
    }
}

TEST_CASE("travel_time derivative equals sqrt(n)")
{
    const auto field = MediumField::radially_stratified(Vec3::Zero(), {{0.6, {2.0, 0.0, 1.0}}, {1.2, {2.36, 0.0, 0.0}}});
    const auto p = restrict_to_ray(field, Vec3(0, 1, 0));
    const double h = 1e-5;
    for (double r = 0.05; r < 2.0; r += 0.07) {
        if (std::abs(r - 0.6) < 2 * h || std::abs(r - 1.2) < 2 * h) {
            continue;
        }
        const double fd = (travel_time(p, r + h) - travel_time(p, r - h)) / (2 * h);
        CHECK(std::abs(fd - std::sqrt(p(r))) < 1e-6);
    }
}

TEST_CASE("travel_time additivity on random splits")
{
    const auto field = MediumField::union_of_balls({{Vec3(1.5, 0.2, 0), 1.0, 3.0}, {Vec3(4, 0, 0), 0.7, 1.5}});
    const auto p = restrict_to_ray(field, Vec3(1, 0, 0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
        double a = u(rng);
        double b = u(rng);
        if (a > b) {
            std::swap(a, b);
        }
        // piece [a, b] as B on a ray whose support is known: integrate via liouville increments
        const std::vector<std::pair<double, Complex>> pts{{a, 1.0}, {b, 1.0}};
        const auto lt = liouville_transform(p, pts);
        CHECK(std::abs(travel_time(p, b) - (travel_time(p, a) + (lt[1].first - lt[0].first))) < 1e-10);
    }
    CHECK(travel_time(p, 0.0) == 0.0);
    CHECK(std::abs(travel_time(p, 9.0) - (travel_time(p, p.support_end()) + 9.0 - p.support_end())) < 1e-12);
}

TEST_CASE("restricted profile agrees with the field pointwise")
{
    const auto field = MediumField::union_of_balls({{Vec3(0.5, 0.5, 0), 1.0, 3.0}, {Vec3(-2, 1, 1), 1.5, 1.5}});
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 d = Vec3(g(rng), g(rng), g(rng)).normalized();
        const auto p = restrict_to_ray(field, d);
        for (double r = 0.0; r < 5.0; r += 0.01) {
            CHECK(std::abs(p(r) - field(r * d)) <= 1e-14);
        }
    }
}
