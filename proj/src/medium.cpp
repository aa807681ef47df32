#include "itep/medium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace itep {

namespace {

double polynomial(std::span<const double> c, double x)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

// Lagrange interpolation through up to four neighbouring table nodes.
double local_cubic(std::span<const double> xs, std::span<const double> ys, double x)
{
    const std::size_t n = xs.size();
    if (n == 1 || x <= xs.front()) {
        return ys.front();
    }
    const auto upper = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), upper)) - 1;
    const std::size_t width = std::min<std::size_t>(4, n);
    std::size_t start = i > 0 ? i - 1 : 0;
    start = std::min(start, n - width);
    double acc = 0.0;
    for (std::size_t a = start; a < start + width; ++a) {
        double w = 1.0;
        for (std::size_t b = start; b < start + width; ++b) {
            if (b != a) {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += w * ys[a];
    }
    return acc;
}

} // namespace

MediumField::MediumField(MediumKind kind, std::variant<Background, Stratified, Balls, Table> data)
    : kind_(kind)
    , data_(std::move(data))
{
}

MediumField MediumField::background()
{
    MediumField f(MediumKind::uniform_ball, Background{});
    f.finish();
    return f;
}

MediumField MediumField::uniform_ball(const Vec3& center, double radius, double n0)
{
    if (!(radius > 0.0)) {
        throw InvalidInput("uniform_ball: radius must be positive");
    }
    if (!(n0 > 0.0)) {
        throw InvalidInput("uniform_ball: n0 must be positive");
    }
    MediumField f(MediumKind::uniform_ball, Balls{{IndexBall{center, radius, n0}}});
    f.finish();
    return f;
}

MediumField MediumField::union_of_balls(std::vector<IndexBall> balls)
{
    for (const auto& b : balls) {
        if (!(b.radius > 0.0) || !(b.n0 > 0.0)) {
            throw InvalidInput("union_of_balls: radius and n0 must be positive");
        }
    }
    MediumField f(MediumKind::union_of_balls, Balls{std::move(balls)});
    f.finish();
    return f;
}

MediumField MediumField::radially_stratified(const Vec3& center, std::vector<StratifiedLayer> layers)
{
    if (layers.empty()) {
        throw InvalidInput("radially_stratified: at least one layer required");
    }
    double inner = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& layer = layers[i];
        if (!(layer.outer_radius > inner) || layer.coefficients.empty()) {
            throw InvalidInput("radially_stratified: layers must have increasing radii and coefficients");
        }
        for (int s = 0; s <= 64; ++s) {
            const double rho = inner + (layer.outer_radius - inner) * s / 64.0;
            if (!(polynomial(layer.coefficients, rho) > 0.0)) {
                throw InvalidInput("radially_stratified: index must stay positive");
            }
        }
        if (i > 0) {
            const double left = polynomial(layers[i - 1].coefficients, inner);
            const double right = polynomial(layer.coefficients, inner);
            if (std::abs(left - right) > 1e-8) {
                std::ostringstream msg;
                msg << "radially_stratified: index discontinuous at rho = " << inner;
                throw InvalidInput(msg.str());
            }
        }
        inner = layer.outer_radius;
    }
    MediumField f(MediumKind::radially_stratified, Stratified{center, std::move(layers)});
    f.finish();
    return f;
}

MediumField MediumField::tabulated(const Vec3& center, std::vector<double> rho, std::vector<double> n)
{
    if (rho.size() != n.size() || rho.size() < 2) {
        throw InvalidInput("tabulated: need matching rho/n tables with at least two nodes");
    }
    if (rho.front() < 0.0 || std::adjacent_find(rho.begin(), rho.end(), std::greater_equal<>()) != rho.end()) {
        throw InvalidInput("tabulated: rho must be nonnegative and strictly increasing");
    }
    if (std::any_of(n.begin(), n.end(), [](double v) { return !(v > 0.0); })) {
        throw InvalidInput("tabulated: index must be positive");
    }
    MediumField f(MediumKind::implicit_tabulated, Table{center, std::move(rho), std::move(n)});
    f.finish();
    return f;
}

void MediumField::finish()
{
    interfaces_.clear();
    if (const auto* balls = std::get_if<Balls>(&data_)) {
        for (const auto& b : balls->balls) {
            interfaces_.push_back({b.center, b.radius});
        }
    } else if (const auto* s = std::get_if<Stratified>(&data_)) {
        for (const auto& layer : s->layers) {
            interfaces_.push_back({s->center, layer.outer_radius});
        }
    } else if (const auto* t = std::get_if<Table>(&data_)) {
        interfaces_.push_back({t->center, t->rho.back()});
    }
    const double n_origin = (*this)(Vec3::Zero());
    if (std::abs(n_origin - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "n(0) = " << n_origin << " differs from 1";
        warnings_.push_back(msg.str());
    }
}

double MediumField::operator()(const Vec3& x) const
{
    if (const auto* balls = std::get_if<Balls>(&data_)) {
        for (const auto& b : balls->balls) {
            if ((x - b.center).norm() < b.radius) {
                return b.n0;
            }
        }
        return 1.0;
    }
    if (const auto* s = std::get_if<Stratified>(&data_)) {
        const double rho = (x - s->center).norm();
        for (const auto& layer : s->layers) {
            if (rho < layer.outer_radius) {
                return polynomial(layer.coefficients, rho);
            }
        }
        return 1.0;
    }
    if (const auto* t = std::get_if<Table>(&data_)) {
        const double rho = (x - t->center).norm();
        if (rho >= t->rho.back()) {
            return 1.0;
        }
        return local_cubic(t->rho, t->n, rho);
    }
    return 1.0;
}

RadialProfile::RadialProfile(const Vec3& direction, std::function<double(double)> evaluator,
                             std::vector<double> breakpoints, double support_end)
    : direction_(direction)
    , eval_(std::move(evaluator))
    , breakpoints_(std::move(breakpoints))
    , support_end_(support_end)
{
    if (std::adjacent_find(breakpoints_.begin(), breakpoints_.end(), std::greater_equal<>()) !=
        breakpoints_.end()) {
        throw InvalidInput("RadialProfile: breakpoints must be strictly increasing");
    }
    if (!breakpoints_.empty() && breakpoints_.front() <= 0.0) {
        throw InvalidInput("RadialProfile: breakpoints must be positive");
    }
}

std::vector<double> RadialProfile::breakpoints_between(double a, double b) const
{
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    std::vector<double> out;
    for (double p : breakpoints_) {
        if (p > lo && p < hi) {
            out.push_back(p);
        }
    }
    return out;
}

void require_unit(const Vec3& direction)
{
    if (std::abs(direction.norm() - 1.0) > 1e-12) {
        throw InvalidInput("direction must be a unit vector");
    }
}

std::vector<double> ray_sphere_crossings(const Sphere& s, const Vec3& direction)
{
    const double b = direction.dot(s.center);
    const double c = s.center.squaredNorm() - s.radius * s.radius;
    const double disc = b * b - c;
    std::vector<double> out;
    if (disc < 0.0) {
        return out;
    }
    const double root = std::sqrt(disc);
    for (double t : {b - root, b + root}) {
        if (t >= 0.0 && (out.empty() || t > out.back())) {
            out.push_back(t);
        }
    }
    return out;
}

RadialProfile restrict_to_ray(const MediumField& field, const Vec3& direction)
{
    require_unit(direction);
    std::vector<double> breaks;
    for (const auto& s : field.interfaces()) {
        for (double t : ray_sphere_crossings(s, direction)) {
            if (t > 0.0) {
                breaks.push_back(t);
            }
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, b); }),
                 breaks.end());
    const double support_end = breaks.empty() ? 0.0 : breaks.back();
    // The field is copied into the evaluator so the profile owns its data.
    auto eval = [field, d = Vec3(direction)](double r) { return field(r * d); };
    return RadialProfile(direction, std::move(eval), std::move(breaks), support_end);
}

namespace {

double segment_integral(const RadialProfile& profile, double a, double b)
{
    if (b <= a) {
        return 0.0;
    }
    auto f = [&](double r) { return std::sqrt(profile(r)); };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, 1e-14);
}

// integral of sqrt(n) over [a, b], split at breakpoints, linear beyond the support.
double sqrt_n_integral(const RadialProfile& profile, double a, double b)
{
    const double end = profile.support_end();
    double total = 0.0;
    const double inner_b = std::min(b, end);
    if (inner_b > a) {
        double left = a;
        for (double p : profile.breakpoints_between(a, inner_b)) {
            total += segment_integral(profile, left, p);
            left = p;
        }
        total += segment_integral(profile, left, inner_b);
    }
    total += std::max(0.0, b - std::max(a, end));
    return total;
}

} // namespace

double travel_time(const RadialProfile& profile, double r)
{
    if (r < 0.0) {
        throw InvalidInput("travel_time: r must be nonnegative");
    }
    return sqrt_n_integral(profile, 0.0, r);
}

std::vector<std::pair<double, Complex>>
liouville_transform(const RadialProfile& profile, std::span<const std::pair<double, Complex>> samples)
{
    std::vector<std::pair<double, Complex>> out;
    out.reserve(samples.size());
    double prev_r = 0.0;
    double xi = 0.0;
    for (const auto& [r, y] : samples) {
        if (r < prev_r) {
            throw InvalidInput("liouville_transform: samples must be sorted in r");
        }
        xi += sqrt_n_integral(profile, prev_r, r);
        prev_r = r;
        out.emplace_back(xi, std::pow(profile(r), 0.25) * y);
    }
    return out;
}

} // namespace itep
