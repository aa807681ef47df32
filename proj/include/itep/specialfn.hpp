#ifndef ITEP_SPECIALFN_HPP
#define ITEP_SPECIALFN_HPP

#include "itep/types.hpp"

namespace itep {

/// Angular order l of a spherical mode.
class AngularOrder {
public:
    static constexpr int default_max = 32;

    explicit AngularOrder(int l, int l_max = default_max);

    int value() const { return l_; }
    operator int() const { return l_; }

private:
    int l_;
};

/// Index pair (l, m) of a spherical harmonic, -l <= m <= l.
struct SphericalIndex {
    SphericalIndex(int l, int m);

    int l;
    int m;
};

/// |Im z| above which the unscaled Bessel routines refuse to answer.
inline constexpr double bessel_imag_bound = 700.0;

/// j_l(z) as mantissa and exponent; the exponent is |Im z|.
ScaledComplex spherical_bessel_j_scaled(int l, Complex z);

/// Spherical Bessel function of the first kind j_l(z).
///
/// Closed forms for l <= 1 (series near the origin), power series for |z| < l and
/// Miller downward recurrence normalized by j_0 or j_1 otherwise.
/// Throws OverflowGuard when |Im z| > bessel_imag_bound; use the scaled variant there.
Complex spherical_bessel_j(int l, Complex z);

/// d/dz j_l(z) as mantissa and exponent (exponent |Im z|).
ScaledComplex spherical_bessel_j_prime_scaled(int l, Complex z);

/// d/dz j_l(z) via j_{l-1}(z) - (l+1)/z j_l(z); power series near z = 0.
Complex spherical_bessel_j_prime(int l, Complex z);

/// Associated Legendre function without Condon-Shortley phase,
/// P_l^m(t) = (1-t^2)^{m/2} d^m P_l / dt^m.
double assoc_legendre(int l, int m, double t);

/// Orthonormal spherical harmonic
/// sqrt((2l+1)/(4 pi) (l-|m|)!/(l+|m|)!) P_l^{|m|}(cos theta) e^{i m phi}.
Complex spherical_harmonic(const SphericalIndex& idx, double theta, double phi);

} // namespace itep

#endif // ITEP_SPECIALFN_HPP
