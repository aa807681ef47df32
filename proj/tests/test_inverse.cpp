#include <doctest.h>

#include <cmath>
#include <numbers>

#include "itep/inverse.hpp"

using namespace itep;
using std::numbers::pi;

namespace {

const Vec3 ex(1, 0, 0);

SpectrumSample sample(std::vector<SpectrumEntry> entries)
{
    SpectrumSample s;
    s.entries = std::move(entries);
    s.normalize();
    return s;
}

SpectrumSample ball_spectrum(double n0, const SearchRectangle& rect, std::vector<int> ls = {0})
{
    SpectrumSample t;
    t.rect = rect;
    for (int l : ls) {
        t.entries.push_back({1.0, l, 1});
    }
    const std::vector<double> p{n0};
    return family_spectrum(ProfileFamily::constant_ball(), p, t);
}

} // namespace

TEST_CASE("SpectrumSample normalization merges near duplicates")
{
    const auto s = sample({{{2.0, 0.5}, 0, 1}, {{1.0, 0.0}, 0, 1}, {{1.0 + 3e-8, 0.0}, 0, 2}, {{1.0, 0.0}, 1, 1}});
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].multiplicity == 3);
    CHECK(s.entries[1].l == 1);
    CHECK(s.count() == 5);
}

TEST_CASE("spectral_distance examples")
{
    const auto a = sample({{{1.0, 0.0}, 0, 3}, {{2.0, 0.3}, 0, 1}, {{2.0, -0.3}, 0, 1}, {{4.0, 0.0}, 1, 1}});
    CHECK(spectral_distance(a, a, 10.0) == 0.0);
    CHECK(spectral_distance(SpectrumSample{}, SpectrumSample{}, 10.0) == 0.0);

    // resolution 1e-7
    auto b = a;
    b.entries[1].k += Complex(5e-8, 0.0);
    CHECK(spectral_distance(a, b, 10.0) == 0.0);
    b.entries[1].k += Complex(1e-5, 0.0);
    CHECK(spectral_distance(a, b, 10.0) == doctest::Approx(std::sqrt(std::pow(1e-5 + 5e-8, 2) / 6.0)));

    // the same values under a different l are unmatched
    auto c = a;
    c.entries.back().l = 2;
    CHECK(spectral_distance(a, c, 10.0) == doctest::Approx(std::sqrt(2.0 * 100.0 / 6.0)));

    // entries beyond k_cut are ignored
    CHECK(spectral_distance(a, sample({{{1.0, 0.0}, 0, 3}, {{2.0, 0.3}, 0, 1}, {{2.0, -0.3}, 0, 1}}), 3.0) == 0.0);

    CHECK_THROWS_AS(spectral_distance(a, sample({{{1.0, 0.0}, 0, 1}}), 10.0), IncompatibleTruncation);
    CHECK_THROWS_AS(spectral_distance(a, a, 0.0), InvalidInput);
}

TEST_CASE("spectral_distance is symmetric")
{
    const auto a = sample({{{1.0, 0.1}, 0, 1}, {{1.0, -0.1}, 0, 1}, {{3.0, 0.0}, 0, 2}, {{5.5, 0.0}, 1, 1}});
    const auto b = sample({{{1.1, 0.1}, 0, 1}, {{0.9, -0.2}, 0, 1}, {{3.0, 0.05}, 0, 1}, {{3.2, 0.0}, 0, 1}, {{5.0, 0.0}, 1, 1}});
    CHECK(spectral_distance(a, b, 8.0) == spectral_distance(b, a, 8.0));
    CHECK(spectral_distance(a, b, 8.0) > 0.0);
}

TEST_CASE("constant balls with n0 = 4 and 4.41 are far apart")
{
    const SearchRectangle rect{0.5, 12.0, -3.0, 3.0};
    const auto s4 = ball_spectrum(4.0, rect);
    const auto s441 = ball_spectrum(4.41, rect);
    // triple zeros at pi, 2 pi, 3 pi
    REQUIRE(s4.entries.size() == 3);
    for (int m = 1; m <= 3; ++m) {
        CHECK(std::abs(s4.entries[m - 1].k - Complex(m * pi, 0.0)) < 1e-8);
        CHECK(s4.entries[m - 1].multiplicity == 3);
    }
    CHECK(spectral_distance(s4, s441, rect.re_max) > 0.05);
}

TEST_CASE("uniqueness_probe verdicts")
{
    const SearchRectangle rect{0.5, 9.0, -1.5, 1.5};
    const std::vector<int> ls{0};
    const auto f4 = MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.0);
    const auto same = uniqueness_probe(f4, f4, ex, ls, rect, 1e-6);
    CHECK_FALSE(same.distinct);
    CHECK(same.verdict() == "indistinguishable_at_resolution");
    CHECK(same.sample1.count() == 6);

    const auto f441 = MediumField::uniform_ball(Vec3::Zero(), 1.0, 4.41);
    const auto apart = uniqueness_probe(f4, f441, ex, ls, rect, 1e-6);
    CHECK(apart.distinct);
    CHECK(apart.verdict() == "distinct");

    // an extra ball off the x axis changes the medium but not the ray
    const auto one = MediumField::union_of_balls({{Vec3(2, 0, 0), 1.0, 2.25}});
    const auto two = MediumField::union_of_balls({{Vec3(2, 0, 0), 1.0, 2.25}, {Vec3(0, 3, 0), 1.0, 3.0}});
    const auto along_x = uniqueness_probe(one, two, ex, ls, rect, 1e-6);
    CHECK_FALSE(along_x.distinct);
    CHECK(along_x.sample1.count() > 0);
    const auto along_y = uniqueness_probe(one, two, Vec3(0, 1, 0), ls, rect, 1e-6);
    CHECK(along_y.distinct);
}

TEST_CASE("spectrum_mismatch charges unmatched entries by their distance to the edge")
{
    SpectrumSample t = sample({{{2.0, 0.0}, 0, 1}, {{5.0, 0.0}, 0, 1}});
    t.rect = SearchRectangle{0.5, 5.5, -1.0, 1.0};
    SpectrumSample m = sample({{{2.1, 0.0}, 0, 1}});
    CHECK(spectrum_mismatch(t, m) == doctest::Approx(0.01 + 0.25));
    CHECK(spectrum_mismatch(t, t) == 0.0);
}

TEST_CASE("fit_profile input checks")
{
    const auto fam = ProfileFamily::constant_ball();
    const SearchRectangle rect{0.5, 10.0, -2.0, 2.0};
    const auto target = ball_spectrum(4.0, rect);
    CHECK_THROWS_AS(fit_profile(target, fam, {3.0}, {5.0}, {8.0}), InvalidInput);
    CHECK_THROWS_AS(fit_profile(target, fam, {3.0}, {8.0}, {1.5}), InvalidInput);
    CHECK_THROWS_AS(fit_profile(target, fam, {3.0, 1.0}, {1.5}, {8.0}), InvalidInput);
    SpectrumSample small = sample({{{pi, 0.0}, 0, 1}});
    small.rect = rect;
    CHECK_THROWS_AS(fit_profile(small, fam, {3.0}, {1.5}, {8.0}), InvalidInput);
}

TEST_CASE("fit_profile from the exact parameters stops at once")
{
    const auto fam = ProfileFamily::constant_ball();
    const auto target = ball_spectrum(4.0, {0.5, 10.0, -2.0, 2.0});
    const auto res = fit_profile(target, fam, {4.0}, {1.5}, {8.0});
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    CHECK(res.mismatch < 1e-10);
    CHECK(res.parameters[0] == 4.0);
}

TEST_CASE("fit_profile round trip for a constant ball")
{
    const auto fam = ProfileFamily::constant_ball();
    const auto target = ball_spectrum(2.25, {0.5, 12.0, -2.0, 2.0});
    REQUIRE(target.count() >= 3);
    const auto res = fit_profile(target, fam, {3.0}, {1.2}, {8.0});
    CHECK(res.converged);
    CHECK(res.parameters[0] == doctest::Approx(2.25).epsilon(1e-4));
    CHECK(res.parameters[0] >= 1.2);
    CHECK(res.parameters[0] <= 8.0);
    for (std::size_t i = 1; i < res.history.size(); ++i) {
        CHECK(res.history[i] <= res.history[i - 1]);
    }
}

TEST_CASE("fit_profile round trip for two layers")
{
    const auto fam = ProfileFamily::two_layer(0.5);
    SpectrumSample probe;
    probe.rect = SearchRectangle{0.5, 9.0, -1.5, 1.5};
    probe.entries = {{1.0, 0, 1}, {1.0, 1, 1}};
    const std::vector<double> truth{3.0, 1.8};
    const auto target = family_spectrum(fam, truth, probe);
    REQUIRE(target.count() >= 6);
    const auto res = fit_profile(target, fam, {2.7, 2.0}, {1.2, 1.2}, {5.0, 5.0});
    CHECK(res.converged);
    CHECK(res.parameters[0] == doctest::Approx(truth[0]).epsilon(1e-3));
    CHECK(res.parameters[1] == doctest::Approx(truth[1]).epsilon(1e-3));
    for (std::size_t i = 1; i < res.history.size(); ++i) {
        CHECK(res.history[i] <= res.history[i - 1]);
    }
}
