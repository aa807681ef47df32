#include "itep/radial_ode.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace itep {

ScaledState ScaledState::rescaled(double reference) const
{
    const double f = std::exp(log_scale - reference);
    return {r, y * f, dy * f, reference};
}

ScaledState origin_data(int l, Complex k, double n0, double r)
{
    if (l == 0 && r == 0.0) {
        return {0.0, 0.0, 1.0, 0.0};
    }
    // y = r^{l+1} sum_j c_j r^{2j}, c_j = -k^2 n0 c_{j-1} / (2j (2j + 2l + 1))
    const Complex w = -k * k * n0 * r * r;
    Complex term = 1.0;
    Complex sum = 1.0;
    Complex dsum = static_cast<double>(l + 1);
    for (int j = 1; j < 200; ++j) {
        term *= w / (2.0 * j * (2.0 * j + 2.0 * l + 1.0));
        sum += term;
        dsum += term * static_cast<double>(2 * j + l + 1);
        if (std::abs(term) < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    // mantissa relative to r^{l+1}
    return {r, sum, dsum / r, (l + 1) * std::log(r)};
}

ScaledState interface_data(int l, Complex k, double r)
{
    if (!(r > 0.0)) {
        throw InvalidInput("interface_data: radius must be positive");
    }
    const Complex z = k * r;
    const ScaledComplex j = spherical_bessel_j_scaled(l, z);
    const ScaledComplex jp = spherical_bessel_j_prime_scaled(l, z);
    // both share exponent |Im z|
    return {r, r * j.value, j.value + z * jp.value, j.log_scale};
}

namespace {

using State = Eigen::Vector2cd;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Segment {
    int l;
    Complex k2;
    const RadialProfile& profile;
    double lo;
    double hi;
    double pad;

    double n_at(double r) const { return profile(std::clamp(r, lo + pad, hi - pad)); }

    State rhs(double r, const State& s) const
    {
        Complex q = k2 * n_at(r);
        if (l != 0) {
            q -= l * (l + 1.0) / (r * r);
        }
        return {s[1], -q * s[0]};
    }
};

void check_k(Complex k, const OdeOptions& opts)
{
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || std::abs(k) > opts.k_max) {
        throw InvalidInput("radial solver: k must be finite with |k| <= k_max");
    }
}

// One segment [r, r_target] with no breakpoint strictly inside.
void integrate_segment(const Segment& seg, double rtol, double& r, State& s, double& log_scale, double r_target,
                       double& h, double r_scale, std::vector<ScaledState>* knots)
{
    const double dir = r_target > r ? 1.0 : -1.0;
    const double kappa2_base = std::abs(seg.k2);
    auto kappa = [&](double rr) {
        return std::sqrt(kappa2_base * seg.n_at(rr) + (seg.l == 0 ? 0.0 : seg.l * (seg.l + 1.0) / (rr * rr)) + 1.0);
    };
    State k1 = seg.rhs(r, s);
    while (dir * (r_target - r) > 0.0) {
        const double remaining = std::abs(r_target - r);
        double step = std::min(std::abs(h), remaining);
        bool last = step >= remaining * (1.0 - 1e-14);
        if (last) {
            step = remaining;
        }
        if (step < 1e-14 * r_scale && !last) {
            throw StepUnderflow("radial solver: step size fell below 1e-14 * r_end");
        }
        const double hh = dir * step;
        const State k2 = seg.rhs(r + c2 * hh, s + hh * (a21 * k1));
        const State k3 = seg.rhs(r + c3 * hh, s + hh * (a31 * k1 + a32 * k2));
        const State k4 = seg.rhs(r + c4 * hh, s + hh * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 = seg.rhs(r + c5 * hh, s + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double r_new = last ? r_target : r + hh;
        const State k6 = seg.rhs(r + hh, s + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const State s_new = s + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = seg.rhs(r + hh, s_new);
        const State err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double kap = kappa(r + hh);
        const double size = std::max(kap * std::abs(s[0]) + std::abs(s[1]), kap * std::abs(s_new[0]) + std::abs(s_new[1]));
        const double ratio = (kap * std::abs(err[0]) + std::abs(err[1])) / (rtol * std::max(size, 1e-300));

        if (ratio <= 1.0) {
            r = r_new;
            s = s_new;
            k1 = k7;
            const double mag = std::max(std::abs(s[0]), std::abs(s[1]));
            if (mag > 1e100) {
                s /= mag;
                k1 /= mag;
                log_scale += std::log(mag);
            }
            if (knots) {
                knots->push_back({r, s[0], s[1], log_scale});
            }
            const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            if (!last) {
                h = step * std::clamp(grow, 0.2, 5.0);
            } else {
                h = std::max(std::abs(h), step * std::clamp(grow, 0.2, 5.0));
            }
        } else {
            const double shrink = std::isfinite(ratio) ? 0.9 * std::pow(ratio, -0.2) : 0.1;
            h = step * std::clamp(shrink, 0.1, 0.9);
            if (h < 1e-14 * r_scale) {
                throw StepUnderflow("radial solver: step size fell below 1e-14 * r_end");
            }
        }
    }
}

} // namespace

ScaledState integrate_radial(int l, Complex k, const RadialProfile& profile, const ScaledState& start, double r_end,
                             const OdeOptions& opts, std::vector<ScaledState>* knots)
{
    check_k(k, opts);
    if (r_end < 0.0) {
        throw InvalidInput("radial solver: radii must be nonnegative");
    }
    if (knots) {
        knots->push_back(start);
    }
    if (r_end == start.r) {
        return start;
    }
    if (l > 0 && std::min(start.r, r_end) <= 0.0) {
        throw InvalidInput("radial solver: l >= 1 cannot be integrated through r = 0");
    }

    std::vector<double> cuts{start.r};
    auto inner = profile.breakpoints_between(start.r, r_end);
    if (r_end < start.r) {
        std::reverse(inner.begin(), inner.end());
    }
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(r_end);

    double r = start.r;
    State s(start.y, start.dy);
    double log_scale = start.log_scale;
    const double r_scale = std::max(std::abs(r_end), std::abs(start.r));
    const double centrifugal = start.r > 0.0 ? l * (l + 1.0) / (start.r * start.r) : 0.0;
    const double kap0 = std::sqrt(std::abs(k) * std::abs(k) * profile(start.r) + centrifugal + 1.0);
    double h = std::min(std::abs(r_end - start.r), 0.05 / kap0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::min(cuts[i], cuts[i + 1]);
        const double hi = std::max(cuts[i], cuts[i + 1]);
        const Segment seg{l, k * k, profile, lo, hi, 1e-10 * (hi - lo)};
        integrate_segment(seg, opts.rtol, r, s, log_scale, cuts[i + 1], h, r_scale, knots);
    }
    return {r_end, s[0], s[1], log_scale};
}

RadialSolution::RadialSolution(int l, Complex k, RadialProfile profile, ScaledState start, double r_end,
                               const OdeOptions& opts)
    : l_(l)
    , k_(k)
    , profile_(std::move(profile))
    , opts_(opts)
{
    std::vector<ScaledState>* sink = opts.dense ? &knots_ : nullptr;
    end_ = integrate_radial(l, k, profile_, start, r_end, opts, sink);
    if (!opts.dense) {
        knots_ = {start};
    }
}

ScaledState RadialSolution::state_at(double r) const
{
    const double a = r_start();
    const double b = r_end();
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (r < lo - 1e-12 * std::max(1.0, hi) || r > hi + 1e-12 * std::max(1.0, hi)) {
        throw InvalidInput("RadialSolution: radius outside the solved interval");
    }
    if (r == b) {
        return end_;
    }
    if (r == a) {
        return knots_.front();
    }
    if (!opts_.dense) {
        throw InvalidInput("RadialSolution: dense output was not requested");
    }
    // last knot not past r in the integration direction
    const double dir = b > a ? 1.0 : -1.0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < knots_.size(); ++j) {
        if (dir * (knots_[j].r - r) <= 0.0) {
            i = j;
        } else {
            break;
        }
    }
    return integrate_radial(l_, k_, profile_, knots_[i], r, opts_);
}

std::pair<Complex, Complex> RadialSolution::operator()(double r) const
{
    const ScaledState s = state_at(r);
    const double f = std::exp(s.log_scale);
    return {s.y * f, s.dy * f};
}

RadialSolution solve_from_origin(const AngularOrder& l, Complex k, const RadialProfile& profile, double r_end,
                                 const OdeOptions& opts)
{
    if (!(r_end > 0.0)) {
        throw InvalidInput("solve_from_origin: r_end must be positive");
    }
    check_k(k, opts);
    const double r0 = l.value() == 0 ? 0.0 : std::min(frobenius_radius, r_end);
    return RadialSolution(l, k, profile, origin_data(l, k, profile(0.0), r0), r_end, opts);
}

RadialSolution solve_from_interface(const AngularOrder& l, Complex k, const RadialProfile& profile, double r_start,
                                    double r_end, const OdeOptions& opts)
{
    if (!(r_start > 0.0) || r_start == r_end) {
        throw InvalidInput("solve_from_interface: need 0 < r_start != r_end");
    }
    check_k(k, opts);
    return RadialSolution(l, k, profile, interface_data(l, k, r_start), r_end, opts);
}

std::pair<Complex, Complex> eval_mode_pair(const SphericalIndex& idx, Complex k, const CoefficientPair& coeffs,
                                           const RadialSolution& sol, const SphericalPoint& point)
{
    if (idx.l != sol.l()) {
        throw InvalidInput("eval_mode_pair: angular order differs from the solution's");
    }
    if (!(point.r > 0.0)) {
        throw InvalidInput("eval_mode_pair: r must be positive");
    }
    const Complex Y = spherical_harmonic(idx, point.theta, point.phi);
    const Complex v = coeffs.a * spherical_bessel_j(idx.l, k * point.r) * Y;
    const auto [y, dy] = sol(point.r);
    const Complex w = coeffs.b * y / point.r * Y;
    return {v, w};
}

} // namespace itep
