#ifndef ITEP_MEDIUM_HPP
#define ITEP_MEDIUM_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "itep/types.hpp"

namespace itep {

struct Sphere {
    Vec3 center;
    double radius;
};

/// Ball of constant index n0.
struct IndexBall {
    Vec3 center;
    double radius;
    double n0;
};

/// Shell rho < outer_radius (and above the previous layer) where
/// n = sum_i coefficients[i] * rho^i, rho = |x - center|.
struct StratifiedLayer {
    double outer_radius;
    std::vector<double> coefficients;
};

enum class MediumKind { uniform_ball, radially_stratified, union_of_balls, implicit_tabulated };

/// Index of refraction n(x) > 0 with background value 1.
///
/// Immutable after construction. Construction validates positivity and, for
/// stratified media, continuity across internal layer interfaces (1e-8).
class MediumField {
public:
    static MediumField background();
    static MediumField uniform_ball(const Vec3& center, double radius, double n0);
    static MediumField radially_stratified(const Vec3& center, std::vector<StratifiedLayer> layers);
    static MediumField union_of_balls(std::vector<IndexBall> balls);
    /// Radial table n(rho) about `center`, interpolated by local cubics; n = 1 beyond the last node.
    static MediumField tabulated(const Vec3& center, std::vector<double> rho, std::vector<double> n);

    double operator()(const Vec3& x) const;

    MediumKind kind() const { return kind_; }

    /// Spheres across which n may fail to be smooth.
    std::span<const Sphere> interfaces() const { return interfaces_; }

    /// Non-fatal diagnostics gathered at construction (e.g. n(0) != 1).
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Background {};
    struct Stratified {
        Vec3 center;
        std::vector<StratifiedLayer> layers;
    };
    struct Balls {
        std::vector<IndexBall> balls;
    };
    struct Table {
        Vec3 center;
        std::vector<double> rho;
        std::vector<double> n;
    };

    MediumField(MediumKind kind, std::variant<Background, Stratified, Balls, Table> data);
    void finish();

    MediumKind kind_;
    std::variant<Background, Stratified, Balls, Table> data_;
    std::vector<Sphere> interfaces_;
    std::vector<std::string> warnings_;
};

/// n restricted to the ray r -> r * direction.
class RadialProfile {
public:
    RadialProfile(const Vec3& direction, std::function<double(double)> evaluator,
                  std::vector<double> breakpoints, double support_end);

    /// n(r * direction); exactly 1 for r >= support_end.
    double operator()(double r) const { return r >= support_end_ ? 1.0 : eval_(r); }

    const Vec3& direction() const { return direction_; }
    std::span<const double> breakpoints() const { return breakpoints_; }
    double support_end() const { return support_end_; }

    /// Breakpoints strictly inside (a, b), in increasing order.
    std::vector<double> breakpoints_between(double a, double b) const;

private:
    Vec3 direction_;
    std::function<double(double)> eval_;
    std::vector<double> breakpoints_;
    double support_end_;
};

/// Throws InvalidInput unless |direction| = 1 within 1e-12.
void require_unit(const Vec3& direction);

/// Radii r >= 0 at which the ray r * direction meets the sphere, ascending.
std::vector<double> ray_sphere_crossings(const Sphere& s, const Vec3& direction);

RadialProfile restrict_to_ray(const MediumField& field, const Vec3& direction);

/// Travel time B(r) = integral_0^r sqrt(n(rho)) d rho.
double travel_time(const RadialProfile& profile, double r);

/// Liouville variables (xi, z0) = (B(r), n(r)^{1/4} y0) for samples sorted in r.
std::vector<std::pair<double, Complex>>
liouville_transform(const RadialProfile& profile, std::span<const std::pair<double, Complex>> samples);

} // namespace itep

#endif // ITEP_MEDIUM_HPP
