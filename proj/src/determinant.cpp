#include "itep/determinant.hpp"

#include <cmath>

namespace itep {

DeterminantValue determinant_from_state(int l, Complex k, const ScaledState& y, const RadialProfile& profile)
{
    const double r = y.r;
    const ScaledState u = interface_data(l, k, r);
    const Complex raw = (u.dy * y.y - u.y * y.dy) / (r * r);
    const double type = (r + travel_time(profile, r)) * std::abs(k.imag());
    return {raw * std::exp(u.log_scale + y.log_scale - type), type};
}

DeterminantValue determinant(int l, Complex k, double r_hat, const RadialProfile& profile, const StartSpec& start,
                             const OdeOptions& opts)
{
    if (!(r_hat > 0.0)) {
        throw InvalidInput("determinant: r_hat must be positive");
    }
    ScaledState init;
    if (start.at_origin()) {
        init = origin_data(l, k, profile(0.0), l == 0 ? 0.0 : std::min(frobenius_radius, r_hat));
    } else {
        init = interface_data(l, k, *start.interface_radius);
    }
    const ScaledState y = integrate_radial(l, k, profile, init, r_hat, opts);
    return determinant_from_state(l, k, y, profile);
}

DeterminantFn determinant_function(int l, const RadialProfile& profile, double r_hat, const StartSpec& start)
{
    AngularOrder checked(l);
    if (!(r_hat > 0.0)) {
        throw InvalidInput("determinant_function: r_hat must be positive");
    }
    return [l, profile, r_hat, start](Complex k) { return determinant(l, k, r_hat, profile, start); };
}

namespace {

ScaledState origin_solution(int l, Complex k, double r, const RadialProfile& profile)
{
    const auto init = origin_data(l, k, profile(0.0), l == 0 ? 0.0 : std::min(frobenius_radius, r));
    return integrate_radial(l, k, profile, init, r, {.rtol = 1e-11, .dense = false});
}

} // namespace

Complex alpha_diagnostic(int l, Complex k, double r_hat, const RadialProfile& profile)
{
    if (!(r_hat > 0.0) || k == Complex(0.0)) {
        throw InvalidInput("alpha_diagnostic: need r_hat > 0 and k != 0");
    }
    const Complex z = k * r_hat;
    const ScaledComplex j = spherical_bessel_j_scaled(l, z);
    const ScaledComplex jp = spherical_bessel_j_prime_scaled(l, z);
    // j'' from the Bessel equation gives a Newton estimate of the distance to the nearest zero of j'(k r_hat)
    const Complex jpp = -2.0 / z * jp.value - (1.0 - l * (l + 1.0) / (z * z)) * j.value;
    if (std::abs(jp.value) < 1e-6 * r_hat * std::abs(jpp)) {
        throw PoleProximity("alpha_diagnostic: k is within 1e-6 of a zero of j_l'(k r)");
    }
    const ScaledState y = origin_solution(l, k, r_hat, profile);
    const double dk = 1e-5 * std::max(1.0, std::abs(k));
    const Complex y_plus = origin_solution(l, k + dk, r_hat, profile).rescaled(y.log_scale).y;
    const Complex y_minus = origin_solution(l, k - dk, r_hat, profile).rescaled(y.log_scale).y;
    const Complex dy_dk = (y_plus - y_minus) / (2.0 * dk);
    if (std::abs(y.y) < 1e-6 * std::abs(dy_dk)) {
        throw PoleProximity("alpha_diagnostic: k is within 1e-6 of a zero of y_l(r; k)");
    }
    const Complex ratio = j.value / jp.value;
    return 1.0 - ratio * y.dy / (k * y.y) + ratio / z;
}

} // namespace itep
