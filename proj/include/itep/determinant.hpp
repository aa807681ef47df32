#ifndef ITEP_DETERMINANT_HPP
#define ITEP_DETERMINANT_HPP

#include <functional>
#include <optional>

#include "itep/medium.hpp"
#include "itep/radial_ode.hpp"
#include "itep/types.hpp"

namespace itep {

/// Where the medium-side solution y_l starts: regular data at the origin, or
/// interface matching data y = r j_l(kr) at `interface_radius`.
struct StartSpec {
    std::optional<double> interface_radius;

    static StartSpec origin() { return {}; }
    static StartSpec interface(double r0) { return {r0}; }
    bool at_origin() const { return !interface_radius; }
};

/// D_l(k; r) carried as `value * exp(log_scale)`. For the normalized evaluation
/// log_scale = (r + B(r)) |Im k|, so `value` stays O(1) along the real axis.
using DeterminantValue = ScaledComplex;

using DeterminantFn = std::function<DeterminantValue(Complex)>;

/// (u' y - u y') / r^2 with u = r j_l(kr), i.e.
/// -j_l(kr) y'/r + j_l(kr) y/r^2 + k j_l'(kr) y/r.
DeterminantValue determinant(int l, Complex k, double r_hat, const RadialProfile& profile, const StartSpec& start,
                             const OdeOptions& opts = {.rtol = 1e-11, .dense = false});

/// The same quantity from already integrated data: `y` is the medium-side state at r_hat.
DeterminantValue determinant_from_state(int l, Complex k, const ScaledState& y, const RadialProfile& profile);

/// k -> determinant(l, k, r_hat, profile, start), owning a copy of the profile.
DeterminantFn determinant_function(int l, const RadialProfile& profile, double r_hat, const StartSpec& start);

/// alpha_l(k) = 1 - (1/k)(j_l/j_l')(y'/y) + (1/(k r)) (j_l/j_l'), all at k r_hat,
/// with y from origin data. Equals r D_l / (k j_l' y), so it vanishes identically
/// exactly when D_l does. Throws PoleProximity within 1e-6 of a zero of j_l'(k r_hat)
/// or of y(r_hat; k).
Complex alpha_diagnostic(int l, Complex k, double r_hat, const RadialProfile& profile);

} // namespace itep

#endif // ITEP_DETERMINANT_HPP
