#ifndef ITEP_GEOMETRY_HPP
#define ITEP_GEOMETRY_HPP

#include <functional>
#include <vector>

#include "itep/medium.hpp"
#include "itep/types.hpp"

namespace itep {

/// Level-set function: negative inside, zero on the boundary.
using LevelSet = std::function<double(const Vec3&)>;

/// Bounded domain given either as a union of balls or by a level set.
/// Points on the boundary count as outside.
class SimpleDomain {
public:
    static SimpleDomain balls(std::vector<Sphere> balls);
    /// `bounding_radius` must exceed |x| for every point of the closure.
    static SimpleDomain implicit(LevelSet F, double bounding_radius);
    static SimpleDomain ellipsoid(const Vec3& center, const Vec3& semi_axes);
    /// Torus about the z axis through `center`: major radius R, tube radius a.
    static SimpleDomain torus(const Vec3& center, double major, double minor);

    bool is_ball_union() const { return !F_; }
    const std::vector<Sphere>& ball_list() const { return balls_; }
    double bounding_radius() const { return R0_; }

    /// Signed level value; for ball unions min_i (|x - c_i| - R_i).
    double level(const Vec3& x) const;

private:
    SimpleDomain() = default;

    std::vector<Sphere> balls_;
    LevelSet F_;
    double R0_ = 0.0;
};

/// Candidate boundary crossing along a ray.
struct Crossing {
    double r;
    bool tangent;
};

/// Boundary radii along a ray and the labels of the induced intervals.
///
/// inside[i] labels [r_{i-1}, r_i) with r_{-1} = 0 and r_M = infinity, so
/// inside.size() == radii.size() + 1 and inside.back() is always false.
struct IntersectionSet {
    Vec3 direction = Vec3::UnitX();
    std::vector<double> radii;
    std::vector<bool> inside{false};

    bool origin_inside() const { return inside.front(); }
};

/// Most crossings accepted along one ray.
inline constexpr int max_crossings = 64;

IntersectionSet intersect_ray(const SimpleDomain& domain, const Vec3& direction);

/// Drops tangent crossings, labels the remaining intervals by midpoint samples,
/// and merges neighbours that end up with equal labels.
IntersectionSet filter_tangent(const SimpleDomain& domain, const Vec3& direction,
                               std::vector<Crossing> crossings);

bool inside_indicator(const SimpleDomain& domain, const Vec3& point);

/// Total length of the inside intervals along the ray.
double covered_length(const SimpleDomain& domain, const Vec3& direction);

} // namespace itep

#endif // ITEP_GEOMETRY_HPP
