#ifndef ITEP_RADIAL_ODE_HPP
#define ITEP_RADIAL_ODE_HPP

#include <utility>
#include <vector>

#include "itep/medium.hpp"
#include "itep/specialfn.hpp"
#include "itep/types.hpp"

namespace itep {

/// Largest |k| accepted by the radial solvers.
inline constexpr double default_k_max = 1e3;

/// Start radius for the regular solution when l >= 1.
inline constexpr double frobenius_radius = 1e-4;

/// (y, y') at radius r, both scaled by exp(log_scale).
struct ScaledState {
    double r = 0.0;
    Complex y{0.0, 0.0};
    Complex dy{0.0, 0.0};
    double log_scale = 0.0;

    ScaledState rescaled(double reference) const;
};

struct OdeOptions {
    double rtol = 1e-11;
    /// Keep accepted steps so the solution can be evaluated between the ends.
    bool dense = true;
    double k_max = default_k_max;
};

/// Nontrivial mode amplitudes (a for the free field, b for the medium field).
struct CoefficientPair {
    Complex a{1.0, 0.0};
    Complex b{1.0, 0.0};
};

/// Regular solution data of y'' + (k^2 n0 - l(l+1)/r^2) y = 0 at `r`:
/// y ~ r^{l+1}, summed as a full power series (exact start for l = 0 at r = 0).
ScaledState origin_data(int l, Complex k, double n0, double r);

/// y = r j_l(kr), y' = j_l(kr) + k r j_l'(kr) at r.
ScaledState interface_data(int l, Complex k, double r);

/// Integrates y'' + (k^2 n(r) - l(l+1)/r^2) y = 0 from `start` to r_end with the
/// Dormand-Prince 5(4) pair. Profile breakpoints are step boundaries. Accepted
/// states are appended to `knots` when given. Throws StepUnderflow.
ScaledState integrate_radial(int l, Complex k, const RadialProfile& profile, const ScaledState& start,
                             double r_end, const OdeOptions& opts = {},
                             std::vector<ScaledState>* knots = nullptr);

/// Radial solution y_l(r; k) on the interval between its start and end radii.
class RadialSolution {
public:
    RadialSolution(int l, Complex k, RadialProfile profile, ScaledState start, double r_end,
                   const OdeOptions& opts);

    int l() const { return l_; }
    Complex k() const { return k_; }
    double r_start() const { return knots_.front().r; }
    double r_end() const { return end_.r; }

    const ScaledState& end_state() const { return end_; }

    /// State at any r between the ends (requires dense output, or r at an end).
    ScaledState state_at(double r) const;

    /// Unscaled (y, y') at r.
    std::pair<Complex, Complex> operator()(double r) const;

private:
    int l_;
    Complex k_;
    RadialProfile profile_;
    OdeOptions opts_;
    std::vector<ScaledState> knots_;
    ScaledState end_;
};

RadialSolution solve_from_origin(const AngularOrder& l, Complex k, const RadialProfile& profile, double r_end,
                                 const OdeOptions& opts = {});

RadialSolution solve_from_interface(const AngularOrder& l, Complex k, const RadialProfile& profile,
                                    double r_start, double r_end, const OdeOptions& opts = {});

/// Point in spherical coordinates.
struct SphericalPoint {
    double r;
    double theta;
    double phi;
};

/// (v, w) = (a j_l(kr) Y_l^m, b y_l(r)/r Y_l^m) at the point.
std::pair<Complex, Complex> eval_mode_pair(const SphericalIndex& idx, Complex k, const CoefficientPair& coeffs,
                                           const RadialSolution& sol, const SphericalPoint& point);

} // namespace itep

#endif // ITEP_RADIAL_ODE_HPP
