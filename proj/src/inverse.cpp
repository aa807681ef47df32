#include "itep/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

namespace itep {

namespace {

bool modulus_order(Complex a, Complex b)
{
    return std::pair(std::abs(a), std::arg(a)) < std::pair(std::abs(b), std::arg(b));
}

// Entries of one l, repeated by multiplicity, in modulus order.
std::map<int, std::vector<Complex>> points_by_l(const SpectrumSample& s, double k_cut)
{
    std::map<int, std::vector<Complex>> out;
    for (const auto& e : s.entries) {
        if (std::abs(e.k) <= k_cut) {
            out[e.l].insert(out[e.l].end(), e.multiplicity, e.k);
        }
    }
    for (auto& [l, v] : out) {
        std::sort(v.begin(), v.end(), modulus_order);
    }
    return out;
}

struct Pairing {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> left_alone;
    std::vector<std::size_t> right_alone;
};

// Greedy nearest pairs; equal distances resolved by modulus order of the left point.
Pairing pair_up(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    cand.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            cand.emplace_back(std::abs(a[i] - b[j]), i, j);
        }
    }
    std::sort(cand.begin(), cand.end());
    std::vector<bool> used_a(a.size(), false);
    std::vector<bool> used_b(b.size(), false);
    Pairing p;
    for (const auto& [d, i, j] : cand) {
        if (!used_a[i] && !used_b[j]) {
            used_a[i] = used_b[j] = true;
            p.pairs.emplace_back(i, j);
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!used_a[i]) {
            p.left_alone.push_back(i);
        }
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!used_b[j]) {
            p.right_alone.push_back(j);
        }
    }
    return p;
}

std::set<int> l_values(const SpectrumSample& a, const SpectrumSample& b)
{
    std::set<int> ls;
    for (const auto& e : a.entries) {
        ls.insert(e.l);
    }
    for (const auto& e : b.entries) {
        ls.insert(e.l);
    }
    return ls;
}

} // namespace

void SpectrumSample::normalize()
{
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.k != b.k) {
            return modulus_order(a.k, b.k);
        }
        return a.l < b.l;
    });
    std::vector<SpectrumEntry> merged;
    for (const auto& e : entries) {
        auto twin = std::find_if(merged.begin(), merged.end(), [&](const SpectrumEntry& m) {
            return m.l == e.l && std::abs(m.k - e.k) < dedup_distance;
        });
        if (twin != merged.end()) {
            twin->multiplicity += e.multiplicity;
        } else {
            merged.push_back(e);
        }
    }
    entries = std::move(merged);
}

int SpectrumSample::count() const
{
    int n = 0;
    for (const auto& e : entries) {
        n += e.multiplicity;
    }
    return n;
}

SpectrumSample make_sample(const std::vector<EigenvalueRecord>& records, const Vec3& direction,
                           const std::optional<SearchRectangle>& rect)
{
    SpectrumSample s;
    s.direction = direction;
    s.rect = rect;
    for (const auto& r : records) {
        s.entries.push_back({r.k, r.l, r.multiplicity});
    }
    s.normalize();
    return s;
}

SpectrumSample ray_spectrum(const RadialProfile& profile, const IntersectionSet& intersections,
                            std::span<const int> l_list, const SearchRectangle& rect, const ZeroSearchOptions& opts)
{
    std::vector<EigenvalueRecord> all;
    for (int l : l_list) {
        const auto spec = full_spectrum(l, profile, intersections, rect, opts).propagating();
        all.insert(all.end(), spec.begin(), spec.end());
    }
    return make_sample(all, profile.direction(), rect);
}

double spectral_distance(const SpectrumSample& s1, const SpectrumSample& s2, double k_cut)
{
    if (!(k_cut > 0.0)) {
        throw InvalidInput("spectral_distance: k_cut must be positive");
    }
    const auto p1 = points_by_l(s1, k_cut);
    const auto p2 = points_by_l(s2, k_cut);
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    for (const auto& [l, v] : p1) {
        n1 += v.size();
    }
    for (const auto& [l, v] : p2) {
        n2 += v.size();
    }
    const std::size_t n = std::max(n1, n2);
    if (n == 0) {
        return 0.0;
    }
    if (static_cast<double>(std::max(n1, n2) - std::min(n1, n2)) > 0.2 * static_cast<double>(n)) {
        throw IncompatibleTruncation("spectral_distance: eigenvalue counts differ by more than 20%");
    }
    const std::vector<Complex> none;
    double sum = 0.0;
    for (int l : l_values(s1, s2)) {
        const auto& a = p1.contains(l) ? p1.at(l) : none;
        const auto& b = p2.contains(l) ? p2.at(l) : none;
        const Pairing p = pair_up(a, b);
        for (const auto& [i, j] : p.pairs) {
            const double d = std::abs(a[i] - b[j]);
            sum += d < dedup_distance ? 0.0 : d * d;
        }
        sum += static_cast<double>(p.left_alone.size() + p.right_alone.size()) * k_cut * k_cut;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

ProbeResult uniqueness_probe(const MediumField& field1, const MediumField& field2, const Vec3& direction,
                             std::span<const int> l_list, const SearchRectangle& rect, double tol,
                             const ZeroSearchOptions& opts)
{
    const auto prof1 = restrict_to_ray(field1, direction);
    const auto prof2 = restrict_to_ray(field2, direction);
    ProbeResult out;
    out.sample1 = ray_spectrum(prof1, intersections_from_profile(prof1), l_list, rect, opts);
    out.sample2 = ray_spectrum(prof2, intersections_from_profile(prof2), l_list, rect, opts);
    const double k_cut = rect.re_max;
    for (int l : l_list) {
        SpectrumSample a;
        SpectrumSample b;
        std::copy_if(out.sample1.entries.begin(), out.sample1.entries.end(), std::back_inserter(a.entries),
                     [l](const SpectrumEntry& e) { return e.l == l; });
        std::copy_if(out.sample2.entries.begin(), out.sample2.entries.end(), std::back_inserter(b.entries),
                     [l](const SpectrumEntry& e) { return e.l == l; });
        double d = std::numeric_limits<double>::infinity();
        try {
            d = spectral_distance(a, b, k_cut);
        } catch (const IncompatibleTruncation&) {
            // counts this far apart already separate the media
        }
        out.distances.push_back(d);
        out.distinct = out.distinct || d > tol;
    }
    return out;
}

ProfileFamily ProfileFamily::constant_ball(double radius)
{
    if (!(radius > 0.0)) {
        throw InvalidInput("constant_ball family: radius must be positive");
    }
    ProfileFamily f;
    f.name = "constant";
    f.dim = 1;
    f.r_hat = radius;
    f.make = [radius](std::span<const double> p) {
        const double n0 = p[0];
        return RadialProfile(Vec3::UnitX(), [n0](double) { return n0; }, {radius}, radius);
    };
    return f;
}

ProfileFamily ProfileFamily::two_layer(double r_split, double radius)
{
    if (!(r_split > 0.0) || !(radius > r_split)) {
        throw InvalidInput("two_layer family: need 0 < r_split < radius");
    }
    ProfileFamily f;
    f.name = "two_layer";
    f.dim = 2;
    f.r_hat = radius;
    f.make = [r_split, radius](std::span<const double> p) {
        const double inner = p[0];
        const double outer = p[1];
        return RadialProfile(
            Vec3::UnitX(), [=](double r) { return r < r_split ? inner : outer; }, {r_split, radius}, radius);
    };
    return f;
}

double spectrum_mismatch(const SpectrumSample& target, const SpectrumSample& model)
{
    if (!target.rect) {
        throw InvalidInput("spectrum_mismatch: target needs its search rectangle");
    }
    const SearchRectangle& r = *target.rect;
    const auto edge_gap = [&r](Complex k) {
        const double d = std::min({k.real() - r.re_min, r.re_max - k.real(), k.imag() - r.im_min, r.im_max - k.imag()});
        return std::max(d, 0.0);
    };
    const double inf = std::numeric_limits<double>::infinity();
    const auto pt = points_by_l(target, inf);
    const auto pm = points_by_l(model, inf);
    const std::vector<Complex> none;
    double sum = 0.0;
    for (int l : l_values(target, model)) {
        const auto& a = pt.contains(l) ? pt.at(l) : none;
        const auto& b = pm.contains(l) ? pm.at(l) : none;
        const Pairing p = pair_up(a, b);
        for (const auto& [i, j] : p.pairs) {
            sum += std::norm(a[i] - b[j]);
        }
        for (std::size_t i : p.left_alone) {
            sum += std::pow(edge_gap(a[i]), 2);
        }
        for (std::size_t j : p.right_alone) {
            sum += std::pow(edge_gap(b[j]), 2);
        }
    }
    return sum;
}

SpectrumSample family_spectrum(const ProfileFamily& family, std::span<const double> p, const SpectrumSample& target,
                               const ZeroSearchOptions& opts)
{
    if (!target.rect) {
        throw InvalidInput("family_spectrum: target needs its search rectangle");
    }
    std::set<int> ls;
    for (const auto& e : target.entries) {
        ls.insert(e.l);
    }
    const RadialProfile profile = family.make(p);
    std::vector<EigenvalueRecord> all;
    for (int l : ls) {
        auto recs = find_zeros(determinant_function(l, profile, family.r_hat, StartSpec::origin()), *target.rect, opts);
        for (auto& r : recs) {
            r.l = l;
        }
        all.insert(all.end(), recs.begin(), recs.end());
    }
    return make_sample(all, target.direction, target.rect);
}

FitResult fit_profile(const SpectrumSample& target, const ProfileFamily& family, std::vector<double> init,
                      const std::vector<double>& lower, const std::vector<double>& upper, const FitOptions& opts)
{
    const int dim = family.dim;
    if (dim < 1 || dim > 4) {
        throw InvalidInput("fit_profile: family dimension must be 1 to 4");
    }
    if (static_cast<int>(init.size()) != dim || static_cast<int>(lower.size()) != dim ||
        static_cast<int>(upper.size()) != dim) {
        throw InvalidInput("fit_profile: init and bounds must match the family dimension");
    }
    for (int i = 0; i < dim; ++i) {
        if (!(lower[i] < upper[i]) || !(lower[i] > 0.0) || init[i] < lower[i] || init[i] > upper[i]) {
            throw InvalidInput("fit_profile: need 0 < lower < upper with init inside the bounds");
        }
    }
    if (target.count() < 3 * dim) {
        throw InvalidInput("fit_profile: target needs at least three eigenvalues per parameter");
    }
    if (!target.rect) {
        throw InvalidInput("fit_profile: target needs its search rectangle");
    }

    const auto objective = [&](const std::vector<double>& p) {
        return spectrum_mismatch(target, family_spectrum(family, p, target, opts.search));
    };

    FitResult res;
    std::vector<double> x = std::move(init);
    double fx = objective(x);
    res.history.push_back(fx);
    std::vector<double> radius(dim);
    for (int i = 0; i < dim; ++i) {
        radius[i] = opts.initial_radius * (upper[i] - lower[i]);
    }
    const auto done = [&] {
        if (fx < opts.mismatch_tol) {
            res.converged = true;
            return true;
        }
        for (int i = 0; i < dim; ++i) {
            if (radius[i] > opts.min_radius * std::max(1.0, std::abs(x[i]))) {
                return false;
            }
        }
        res.diagnostics = "trust region collapsed above the mismatch tolerance";
        return true;
    };

    while (!done()) {
        if (res.iterations >= opts.max_iterations) {
            res.diagnostics = "iteration limit reached";
            break;
        }
        ++res.iterations;
        for (int i = 0; i < dim && fx >= opts.mismatch_tol; ++i) {
            const double h = radius[i];
            std::vector<double> xm = x;
            std::vector<double> xp = x;
            xm[i] = std::max(lower[i], x[i] - h);
            xp[i] = std::min(upper[i], x[i] + h);
            const double fm = xm[i] < x[i] ? objective(xm) : fx;
            const double fp = xp[i] > x[i] ? objective(xp) : fx;

            // quadratic through the three samples (possibly one-sided at a bound)
            double step = 0.0;
            const double hm = x[i] - xm[i];
            const double hp = xp[i] - x[i];
            if (hm > 0.0 && hp > 0.0) {
                const double g = (fp - fm) / (hp + hm);
                const double c = 2.0 * ((fp - fx) / hp + (fm - fx) / hm) / (hp + hm);
                step = c > 0.0 ? -g / c : (g > 0.0 ? -h : h);
            } else if (hp > 0.0) {
                step = fp < fx ? hp : 0.0;
            } else if (hm > 0.0) {
                step = fm < fx ? -hm : 0.0;
            }
            step = std::clamp(step, -h, h);
            double best = fx;
            double best_x = x[i];
            if (fm < best) {
                best = fm;
                best_x = xm[i];
            }
            if (fp < best) {
                best = fp;
                best_x = xp[i];
            }
            const double xs = std::clamp(x[i] + step, lower[i], upper[i]);
            if (xs != x[i] && xs != xm[i] && xs != xp[i]) {
                std::vector<double> trial = x;
                trial[i] = xs;
                const double ft = objective(trial);
                if (ft < best) {
                    best = ft;
                    best_x = xs;
                }
            }
            if (best < fx) {
                const double moved = std::abs(best_x - x[i]);
                x[i] = best_x;
                fx = best;
                res.history.push_back(fx);
                // a step to the edge of the region suggests room to grow
                radius[i] = moved >= 0.99 * h ? 2.0 * h : std::max(moved, 0.25 * h);
            } else {
                radius[i] = 0.25 * h;
            }
        }
    }
    res.parameters = x;
    res.mismatch = fx;
    if (res.converged) {
        res.diagnostics = "mismatch below tolerance";
    }
    return res;
}

} // namespace itep
