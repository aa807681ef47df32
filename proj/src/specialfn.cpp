#include "itep/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace itep {

AngularOrder::AngularOrder(int l, int l_max)
    : l_(l)
{
    if (l < 0 || l > l_max) {
        throw InvalidInput("angular order " + std::to_string(l) + " outside [0, " +
                           std::to_string(l_max) + "]");
    }
}

SphericalIndex::SphericalIndex(int l_, int m_)
    : l(l_)
    , m(m_)
{
    if (l < 0 || m < -l || m > l) {
        throw InvalidInput("spherical index (" + std::to_string(l) + ", " + std::to_string(m) +
                           ") violates -l <= m <= l");
    }
}

namespace {

// sin z and cos z multiplied by exp(-|Im z|).
Complex scaled_sin(Complex z)
{
    const double y = std::abs(z.imag());
    const double e = std::exp(-2.0 * y);
    const double sgn = z.imag() < 0.0 ? -1.0 : 1.0;
    return {std::sin(z.real()) * 0.5 * (1.0 + e), std::cos(z.real()) * sgn * 0.5 * (1.0 - e)};
}

Complex scaled_cos(Complex z)
{
    const double y = std::abs(z.imag());
    const double e = std::exp(-2.0 * y);
    const double sgn = z.imag() < 0.0 ? -1.0 : 1.0;
    return {std::cos(z.real()) * 0.5 * (1.0 + e), -std::sin(z.real()) * sgn * 0.5 * (1.0 - e)};
}

double double_factorial_odd(int l)
{
    // (2l+1)!!
    double r = 1.0;
    for (int i = 3; i <= 2 * l + 1; i += 2) {
        r *= i;
    }
    return r;
}

// Power series of j_l and j_l' (unscaled). Valid for moderate |z|.
void bessel_series(int l, Complex z, Complex& value, Complex& deriv)
{
    const Complex w = -0.5 * z * z;
    Complex term = 1.0;
    Complex sum = 1.0;
    Complex dsum = static_cast<double>(l);
    for (int k = 1; k < 400; ++k) {
        term *= w / (static_cast<double>(k) * (2.0 * l + 2.0 * k + 1.0));
        sum += term;
        dsum += term * static_cast<double>(l + 2 * k);
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    const double pre = 1.0 / double_factorial_odd(l);
    if (z == Complex(0.0)) {
        value = l == 0 ? 1.0 : 0.0;
        deriv = l == 1 ? 1.0 / 3.0 : 0.0;
        return;
    }
    const Complex zl1 = l == 0 ? 1.0 / z : std::pow(z, l - 1);
    value = pre * zl1 * z * sum;
    deriv = pre * zl1 * dsum;
}

bool use_series(int l, Complex z)
{
    return std::abs(z) < std::max(l, 1);
}

// Scaled j_0 and j_1 from the closed forms, |z| >= 1 assumed.
void scaled_j0_j1(Complex z, Complex& j0, Complex& j1)
{
    const Complex s = scaled_sin(z);
    const Complex c = scaled_cos(z);
    j0 = s / z;
    j1 = s / (z * z) - c / z;
}

Complex miller_scaled(int l, Complex z)
{
    const int start = l + std::max(20, static_cast<int>(std::ceil(1.5 * std::abs(z)))) + 20;
    Complex f_next = 0.0;
    Complex f = 1.0;
    Complex f_l = 0.0;
    Complex f_1 = 0.0;
    Complex f_0 = 0.0;
    for (int n = start; n >= 1; --n) {
        const Complex f_prev = (2.0 * n + 1.0) / z * f - f_next;
        f_next = f;
        f = f_prev;
        // f now holds index n-1, f_next holds index n.
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            f_next *= 1e-250;
            f_l *= 1e-250;
        }
        if (n - 1 == l) {
            f_l = f;
        }
        if (n == 1) {
            f_1 = f_next;
            f_0 = f;
        }
    }
    Complex j0;
    Complex j1;
    scaled_j0_j1(z, j0, j1);
    if (std::abs(j0) >= std::abs(j1)) {
        return f_l / f_0 * j0;
    }
    return f_l / f_1 * j1;
}

} // namespace

ScaledComplex spherical_bessel_j_scaled(int l, Complex z)
{
    if (l < 0) {
        throw InvalidInput("spherical_bessel_j: negative order");
    }
    const double scale = std::abs(z.imag());
    if (use_series(l, z)) {
        Complex v;
        Complex d;
        bessel_series(l, z, v, d);
        return {v * std::exp(-scale), scale};
    }
    Complex j0;
    Complex j1;
    scaled_j0_j1(z, j0, j1);
    if (l == 0) {
        return {j0, scale};
    }
    if (l == 1) {
        return {j1, scale};
    }
    return {miller_scaled(l, z), scale};
}

Complex spherical_bessel_j(int l, Complex z)
{
    if (std::abs(z.imag()) > bessel_imag_bound) {
        throw OverflowGuard("spherical_bessel_j: |Im z| exceeds bound; use the scaled variant");
    }
    return spherical_bessel_j_scaled(l, z).unscaled();
}

ScaledComplex spherical_bessel_j_prime_scaled(int l, Complex z)
{
    if (l < 0) {
        throw InvalidInput("spherical_bessel_j_prime: negative order");
    }
    const double scale = std::abs(z.imag());
    if (use_series(l + 1, z)) {
        Complex v;
        Complex d;
        bessel_series(l, z, v, d);
        return {d * std::exp(-scale), scale};
    }
    if (l == 0) {
        const ScaledComplex j1 = spherical_bessel_j_scaled(1, z);
        return {-j1.value, scale};
    }
    const ScaledComplex lower = spherical_bessel_j_scaled(l - 1, z);
    const ScaledComplex here = spherical_bessel_j_scaled(l, z);
    return {lower.value - (l + 1.0) / z * here.value, scale};
}

Complex spherical_bessel_j_prime(int l, Complex z)
{
    if (std::abs(z.imag()) > bessel_imag_bound) {
        throw OverflowGuard("spherical_bessel_j_prime: |Im z| exceeds bound; use the scaled variant");
    }
    return spherical_bessel_j_prime_scaled(l, z).unscaled();
}

double assoc_legendre(int l, int m, double t)
{
    if (m < 0 || m > l) {
        throw InvalidInput("assoc_legendre: require 0 <= m <= l");
    }
    if (std::abs(t) > 1.0) {
        throw InvalidInput("assoc_legendre: |t| > 1");
    }
    // P_m^m = (2m-1)!! (1-t^2)^{m/2}
    double pmm = 1.0;
    const double s = std::sqrt((1.0 - t) * (1.0 + t));
    for (int i = 1; i <= m; ++i) {
        pmm *= (2.0 * i - 1.0) * s;
    }
    if (l == m) {
        return pmm;
    }
    double pm1 = t * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) {
        return pm1;
    }
    double pll = 0.0;
    for (int n = m + 2; n <= l; ++n) {
        pll = ((2.0 * n - 1.0) * t * pm1 - (n + m - 1.0) * pmm) / (n - m);
        pmm = pm1;
        pm1 = pll;
    }
    return pll;
}

Complex spherical_harmonic(const SphericalIndex& idx, double theta, double phi)
{
    const int am = std::abs(idx.m);
    const double log_ratio = std::lgamma(idx.l - am + 1.0) - std::lgamma(idx.l + am + 1.0);
    const double norm =
        std::sqrt((2.0 * idx.l + 1.0) / (4.0 * std::numbers::pi) * std::exp(log_ratio));
    const double p = assoc_legendre(idx.l, am, std::clamp(std::cos(theta), -1.0, 1.0));
    return norm * p * std::polar(1.0, idx.m * phi);
}

} // namespace itep
