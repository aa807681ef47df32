#include "itep/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

namespace itep {

SimpleDomain SimpleDomain::balls(std::vector<Sphere> balls)
{
    if (balls.empty()) {
        throw InvalidInput("SimpleDomain: at least one ball required");
    }
    double extent = 0.0;
    for (const auto& b : balls) {
        if (!(b.radius > 0.0)) {
            throw InvalidInput("SimpleDomain: ball radius must be positive");
        }
        extent = std::max(extent, b.center.norm() + b.radius);
    }
    SimpleDomain d;
    d.balls_ = std::move(balls);
    d.R0_ = extent * (1.0 + 1e-3) + 1e-9;
    return d;
}

SimpleDomain SimpleDomain::implicit(LevelSet F, double bounding_radius)
{
    if (!F || !(bounding_radius > 0.0)) {
        throw InvalidInput("SimpleDomain: implicit domain needs a level set and a positive bounding radius");
    }
    SimpleDomain d;
    d.F_ = std::move(F);
    d.R0_ = bounding_radius;
    return d;
}

SimpleDomain SimpleDomain::ellipsoid(const Vec3& center, const Vec3& semi_axes)
{
    if ((semi_axes.array() <= 0.0).any()) {
        throw InvalidInput("ellipsoid: semi-axes must be positive");
    }
    // scaled by the smallest semi-axis so the level set has a gradient of order one
    const double s = semi_axes.minCoeff();
    auto F = [center, semi_axes, s](const Vec3& x) {
        return s * (((x - center).array() / semi_axes.array()).matrix().norm() - 1.0);
    };
    return implicit(F, (center.norm() + semi_axes.maxCoeff()) * (1.0 + 1e-3));
}

SimpleDomain SimpleDomain::torus(const Vec3& center, double major, double minor)
{
    if (!(minor > 0.0) || !(major > minor)) {
        throw InvalidInput("torus: need major > minor > 0");
    }
    auto F = [center, major, minor](const Vec3& x) {
        const Vec3 y = x - center;
        const double q = std::hypot(y.x(), y.y()) - major;
        return std::hypot(q, y.z()) - minor;
    };
    return implicit(F, (center.norm() + major + minor) * (1.0 + 1e-3));
}

double SimpleDomain::level(const Vec3& x) const
{
    if (F_) {
        return F_(x);
    }
    double v = std::numeric_limits<double>::infinity();
    for (const auto& b : balls_) {
        v = std::min(v, (x - b.center).norm() - b.radius);
    }
    return v;
}

bool inside_indicator(const SimpleDomain& domain, const Vec3& point)
{
    return domain.level(point) < 0.0;
}

IntersectionSet filter_tangent(const SimpleDomain& domain, const Vec3& direction, std::vector<Crossing> crossings)
{
    require_unit(direction);
    std::vector<double> radii;
    for (const auto& c : crossings) {
        if (!c.tangent && c.r > 0.0) {
            radii.push_back(c.r);
        }
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end(), [](double a, double b) { return b - a < 1e-12; }),
                radii.end());

    std::vector<bool> labels;
    double left = 0.0;
    for (double r : radii) {
        labels.push_back(inside_indicator(domain, 0.5 * (left + r) * direction));
        left = r;
    }
    labels.push_back(false);

    IntersectionSet out;
    out.direction = direction;
    out.inside = {labels.front()};
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (labels[i + 1] != out.inside.back()) {
            out.radii.push_back(radii[i]);
            out.inside.push_back(labels[i + 1]);
        }
    }
    if (out.radii.size() > static_cast<std::size_t>(max_crossings)) {
        throw NumericError("intersect_ray: more than 64 boundary crossings along one ray");
    }
    return out;
}

namespace {

std::vector<Crossing> ball_crossings(const SimpleDomain& domain, const Vec3& d)
{
    std::vector<Crossing> out;
    for (const auto& b : domain.ball_list()) {
        const double p = d.dot(b.center);
        const double disc = p * p - (b.center.squaredNorm() - b.radius * b.radius);
        if (disc < 0.0) {
            continue;
        }
        if (disc / (b.radius * b.radius) < 1e-12) {
            out.push_back({p, true});
            continue;
        }
        const double root = std::sqrt(disc);
        for (double t : {p - root, p + root}) {
            if (t > 0.0) {
                // an endpoint buried inside another ball is not on the boundary of the union
                out.push_back({t, false});
            }
        }
    }
    return out;
}

double radial_derivative(const SimpleDomain& domain, const Vec3& d, double r, double h)
{
    return (domain.level((r + h) * d) - domain.level((r - h) * d)) / (2.0 * h);
}

double gradient_norm(const SimpleDomain& domain, const Vec3& x, double h)
{
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = h;
        g[i] = (domain.level(x + e) - domain.level(x - e)) / (2.0 * h);
    }
    return g.norm();
}

Crossing classify(const SimpleDomain& domain, const Vec3& d, double r)
{
    const double h = 1e-6 * domain.bounding_radius();
    const double along = std::abs(radial_derivative(domain, d, r, h));
    const double grad = gradient_norm(domain, r * d, h);
    if (along < 1e-8 * grad) {
        return {r, true};
    }
    if (along < 1e-6 * grad) {
        throw TangencyUnresolved("intersect_ray: crossing at r = " + std::to_string(r) +
                                 " is neither clearly transversal nor tangent");
    }
    return {r, false};
}

std::vector<Crossing> implicit_crossings(const SimpleDomain& domain, const Vec3& d)
{
    const double R0 = domain.bounding_radius();
    const int steps = 4096;
    const double h = R0 / steps;
    auto F = [&](double r) { return domain.level(r * d); };

    std::vector<double> rs(steps + 1);
    std::vector<double> fs(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        rs[i] = i * h;
        fs[i] = F(rs[i]);
    }

    std::vector<Crossing> out;
    for (int i = 0; i < steps; ++i) {
        double a = rs[i];
        double b = rs[i + 1];
        double fa = fs[i];
        const double fb = fs[i + 1];
        if (fa == 0.0 && i > 0) {
            out.push_back(classify(domain, d, a));
            continue;
        }
        if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            while (b - a > 1e-12) {
                const double m = 0.5 * (a + b);
                const double fm = F(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.push_back(classify(domain, d, 0.5 * (a + b)));
        }
    }

    // grazing contacts: local minima of |F| without a sign change
    for (int i = 1; i < steps; ++i) {
        const double f = std::abs(fs[i]);
        if (f > std::abs(fs[i - 1]) || f > std::abs(fs[i + 1])) {
            continue;
        }
        if ((fs[i - 1] < 0.0) != (fs[i] < 0.0) || (fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
            continue;
        }
        const double sign = fs[i] < 0.0 ? -1.0 : 1.0;
        const auto best = boost::math::tools::brent_find_minima(
            [&](double r) { return sign * F(r); }, rs[i - 1], rs[i + 1], 52);
        if (std::abs(best.second) < 1e-10) {
            out.push_back({best.first, true});
        }
    }
    return out;
}

} // namespace

IntersectionSet intersect_ray(const SimpleDomain& domain, const Vec3& direction)
{
    require_unit(direction);
    auto crossings = domain.is_ball_union() ? ball_crossings(domain, direction) : implicit_crossings(domain, direction);
    return filter_tangent(domain, direction, std::move(crossings));
}

double covered_length(const SimpleDomain& domain, const Vec3& direction)
{
    const IntersectionSet s = intersect_ray(domain, direction);
    double total = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
        if (s.inside[i]) {
            total += s.radii[i] - left;
        }
        left = s.radii[i];
    }
    return total;
}

} // namespace itep
