#include "itep/tunneling.hpp"

#include <algorithm>
#include <cmath>

namespace itep {

std::vector<IntervalSpec> intervals(const IntersectionSet& s)
{
    std::vector<IntervalSpec> out;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
        out.push_back({static_cast<int>(i), i == 0 ? 0.0 : s.radii[i - 1], s.radii[i], s.inside[i]});
    }
    return out;
}

IntersectionSet merge_spurious(const IntersectionSet& s)
{
    if (s.inside.size() != s.radii.size() + 1) {
        throw InvalidInput("intersection set: need one label per interval");
    }
    IntersectionSet out;
    out.direction = s.direction;
    out.inside = {s.inside.front()};
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
        if (s.inside[i + 1] != out.inside.back()) {
            out.radii.push_back(s.radii[i]);
            out.inside.push_back(s.inside[i + 1]);
        }
    }
    return out;
}

IntersectionSet intersections_from_profile(const RadialProfile& profile)
{
    IntersectionSet s;
    s.direction = profile.direction();
    s.inside.clear();
    double left = 0.0;
    for (double r : profile.breakpoints()) {
        if (r <= left) {
            continue;
        }
        const bool in = std::abs(profile(0.5 * (left + r)) - 1.0) > 1e-14;
        if (!s.inside.empty() && s.inside.back() == in) {
            s.radii.back() = r;
        } else {
            s.radii.push_back(r);
            s.inside.push_back(in);
        }
        left = r;
    }
    if (!s.inside.empty() && !s.inside.back()) {
        // trailing n = 1 stretch merges into the exterior
        s.radii.pop_back();
        s.inside.pop_back();
    }
    s.inside.push_back(false);
    return s;
}

namespace {

bool trivial_medium(const RadialProfile& profile, double a, double b)
{
    for (int i = 0; i <= 64; ++i) {
        if (std::abs(profile(a + (b - a) * i / 64.0) - 1.0) > 1e-14) {
            return false;
        }
    }
    return true;
}

} // namespace

IntervalSpectrum interval_eigenvalues(int l, const RadialProfile& profile, const IntervalSpec& interval,
                                      const SearchRectangle& rect, const ZeroSearchOptions& opts)
{
    if (!(interval.b > interval.a) || interval.a < 0.0) {
        throw InvalidInput("interval_eigenvalues: need 0 <= a < b");
    }
    const StartSpec start = interval.origin_anchored() ? StartSpec::origin() : StartSpec::interface(interval.a);
    const SpectralFn f = determinant_function(l, profile, interval.b, start);
    IntervalSpectrum out;
    out.interval = interval;
    if (is_degenerate(f, rect)) {
        out.degenerate = true;
        return out;
    }
    out.records = find_zeros(f, rect, opts);
    for (auto& r : out.records) {
        r.l = l;
        r.interval = interval.j;
    }
    return out;
}

std::string TunnelingChain::verdict() const
{
    if (degenerate) {
        return "degenerate";
    }
    return propagates ? "propagates" : "fails_at(" + std::to_string(failed_at) + ")";
}

TunnelingChain propagate(int l, Complex k, const RadialProfile& profile, const IntersectionSet& given)
{
    const IntersectionSet intersections = merge_spurious(given);
    TunnelingChain chain;
    chain.l = l;
    chain.k = k;
    chain.radii.push_back(0.0);
    chain.radii.insert(chain.radii.end(), intersections.radii.begin(), intersections.radii.end());
    chain.interface_residuals.assign(chain.radii.size(), 0.0);
    chain.degenerate = true;
    const bool from_origin = intersections.origin_inside();
    const OdeOptions opts{.rtol = 1e-11, .dense = false};
    for (const auto& iv : intervals(intersections)) {
        chain.degenerate = chain.degenerate && trivial_medium(profile, iv.a, iv.b);
        ScaledState init;
        if (iv.j == 0) {
            if (!from_origin) {
                // the chain is anchored at the first entry radius
                chain.interval_ends.push_back(interface_data(l, k, iv.b));
                continue;
            }
            init = origin_data(l, k, profile(0.0), l == 0 ? 0.0 : std::min(frobenius_radius, iv.b));
        } else {
            init = interface_data(l, k, iv.a);
        }
        const ScaledState end = integrate_radial(l, k, profile, init, iv.b, opts);
        chain.interval_ends.push_back(end);
        const double res = std::abs(determinant_from_state(l, k, end, profile).value);
        chain.interface_residuals[iv.j + 1] = res;
        if (!(res < propagation_tol) && chain.failed_at < 0) {
            chain.failed_at = iv.j + 1;
        }
    }
    chain.propagates = chain.failed_at < 0;
    return chain;
}

std::vector<EigenvalueRecord> FullSpectrum::propagating() const
{
    std::vector<EigenvalueRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [](const EigenvalueRecord& r) { return r.verdict == "propagates"; });
    return out;
}

FullSpectrum full_spectrum(int l, const RadialProfile& profile, const IntersectionSet& given,
                           const SearchRectangle& rect, const ZeroSearchOptions& opts)
{
    const IntersectionSet intersections = merge_spurious(given);
    FullSpectrum out;
    out.degenerate = true;
    for (const auto& iv : intervals(intersections)) {
        if (!iv.inside) {
            continue;
        }
        out.intervals.push_back(interval_eigenvalues(l, profile, iv, rect, opts));
        const auto& spec = out.intervals.back();
        out.degenerate = out.degenerate && spec.degenerate;
        for (const auto& rec : spec.records) {
            auto twin = std::find_if(out.records.begin(), out.records.end(), [&](const EigenvalueRecord& r) {
                return std::abs(r.k - rec.k) < dedup_distance;
            });
            if (twin != out.records.end()) {
                twin->collision = twin->collision || twin->interval != rec.interval;
                continue;
            }
            out.records.push_back(rec);
        }
    }
    for (auto& rec : out.records) {
        const TunnelingChain chain = propagate(l, rec.k, profile, intersections);
        rec.interface_residuals = chain.interface_residuals;
        rec.verdict = chain.verdict();
    }
    std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
        return std::pair(a.k.real(), a.k.imag()) < std::pair(b.k.real(), b.k.imag());
    });
    return out;
}

} // namespace itep
