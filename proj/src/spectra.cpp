#include "itep/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

namespace itep {

using std::numbers::pi;

SpectralFn plain(std::function<Complex(Complex)> f)
{
    return [f = std::move(f)](Complex k) { return ScaledComplex{f(k), 0.0}; };
}

SearchRectangle::SearchRectangle(double re_min_, double re_max_, double im_min_, double im_max_)
    : re_min(re_min_)
    , re_max(re_max_)
    , im_min(im_min_)
    , im_max(im_max_)
{
    if (!(re_min < re_max) || !(im_min < im_max)) {
        throw InvalidInput("SearchRectangle: need re_min < re_max and im_min < im_max");
    }
}

bool SearchRectangle::contains(Complex k) const
{
    return k.real() >= re_min && k.real() <= re_max && k.imag() >= im_min && k.imag() <= im_max;
}

namespace {

constexpr double boundary_floor = 1e-13;

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double wrap_phase(double d)
{
    while (d > pi) {
        d -= 2 * pi;
    }
    while (d <= -pi) {
        d += 2 * pi;
    }
    return d;
}

Complex boundary_value(const SpectralFn& f, Complex z)
{
    const Complex v = f(z).value;
    if (!(std::abs(v) >= boundary_floor)) {
        throw BoundaryZero("winding: |f| below 1e-13 on the contour");
    }
    return v;
}

// Total phase change of f along straight edges, memoized per edge.
class EdgeCache {
public:
    explicit EdgeCache(const SpectralFn& f)
        : f_(f)
    {
    }

    double phase_change(Complex a, Complex b)
    {
        const bool forward = std::pair(a.real(), a.imag()) < std::pair(b.real(), b.imag());
        const std::array<double, 4> key = forward ? std::array{a.real(), a.imag(), b.real(), b.imag()}
                                                  : std::array{b.real(), b.imag(), a.real(), a.imag()};
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) {
                return forward ? it->second : -it->second;
            }
        }
        const double d = forward ? compute(a, b) : compute(b, a);
        {
            std::lock_guard lock(mutex_);
            cache_.emplace(key, d);
        }
        return forward ? d : -d;
    }

    int winding(const SearchRectangle& r)
    {
        const Complex c[4] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}};
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            total += phase_change(c[i], c[(i + 1) % 4]);
        }
        const double w = total / (2 * pi);
        const double n = std::round(w);
        if (std::abs(w - n) > 0.25) {
            throw NonIntegerWinding("winding: total phase change is not a multiple of 2 pi");
        }
        return static_cast<int>(n);
    }

private:
    double compute(Complex a, Complex b)
    {
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        const int n0 = 32;
        double total = 0.0;
        Complex za = a;
        Complex fa = boundary_value(f_, a);
        for (int i = 1; i <= n0; ++i) {
            const Complex zb = i == n0 ? b : a + (b - a) * (static_cast<double>(i) / n0);
            const Complex fb = boundary_value(f_, zb);
            total += refine(za, fa, zb, fb, scale, 0);
            za = zb;
            fa = fb;
        }
        return total;
    }

    // Accepts a segment when the complex log of f changes by less than 0.8 over
    // both halves; watching |f| as well as arg catches phase turns that alias
    // to a small wrapped increment next to a close multiple zero.
    double refine(Complex za, Complex fa, Complex zb, Complex fb, double scale, int depth)
    {
        const Complex zm = 0.5 * (za + zb);
        const Complex fm = boundary_value(f_, zm);
        const Complex d1(std::log(std::abs(fm) / std::abs(fa)), wrap_phase(std::arg(fm) - std::arg(fa)));
        const Complex d2(std::log(std::abs(fb) / std::abs(fm)), wrap_phase(std::arg(fb) - std::arg(fm)));
        if (std::abs(d1) < 0.8 && std::abs(d2) < 0.8) {
            return d1.imag() + d2.imag();
        }
        if (std::abs(zb - za) < 1e-14 * scale || depth > 60) {
            throw BoundaryZero("winding: phase cannot be resolved along the contour");
        }
        return refine(za, fa, zm, fm, scale, depth + 1) + refine(zm, fm, zb, fb, scale, depth + 1);
    }

    const SpectralFn& f_;
    std::mutex mutex_;
    std::map<std::array<double, 4>, double> cache_;
};

struct CircleRoots {
    bool ok = false;
    std::vector<Complex> roots;
    // largest normalized |f| on the circle
    double scale = 0.0;
};

// Roots of f inside the circle |k - c| < rho from trapezoid moments of f'/f.
// f' comes from the Taylor coefficients given by a DFT of the samples.
CircleRoots circle_roots(const SpectralFn& f, Complex c, double rho)
{
    const double ref = f(c).log_scale;
    for (int N : {64, 128, 256}) {
        std::vector<Complex> unit(N);
        std::vector<Complex> g(N);
        double gmax = 0.0;
        double gmin = std::numeric_limits<double>::infinity();
        double normalized_max = 0.0;
        for (int j = 0; j < N; ++j) {
            unit[j] = std::polar(1.0, 2 * pi * j / N);
            const ScaledComplex v = f(c + rho * unit[j]);
            normalized_max = std::max(normalized_max, std::abs(v.value));
            g[j] = v.relative_to(ref);
            gmax = std::max(gmax, std::abs(g[j]));
            gmin = std::min(gmin, std::abs(g[j]));
        }
        if (!(gmin > 1e-13 * gmax) || !std::isfinite(gmax)) {
            return {};
        }
        std::vector<Complex> coef(N);
        for (int n = 0; n < N; ++n) {
            Complex acc = 0.0;
            for (int j = 0; j < N; ++j) {
                acc += g[j] * std::conj(unit[(static_cast<long>(n) * j) % N]);
            }
            coef[n] = acc / static_cast<double>(N);
        }
        double cmax = 0.0;
        double tail = 0.0;
        for (int n = 0; n < N; ++n) {
            cmax = std::max(cmax, std::abs(coef[n]));
            if (n >= 7 * N / 16 && n <= 9 * N / 16) {
                tail = std::max(tail, std::abs(coef[n]));
            }
        }
        // Truncation decays with N, evaluation noise does not. Small circles
        // next to a near-multiple zero sit on the noise plateau; their roots
        // still go through Newton or the residual test below.
        if (tail > 1e-10 * cmax && (N < 256 || tail > 1e-5 * cmax)) {
            continue;
        }
        // moments of z = k - c in units of rho: mu_p = (1/N) sum w_j^{p+1} g'_j / g_j * rho
        constexpr int max_roots = 8;
        std::array<Complex, max_roots + 1> mu{};
        for (int j = 0; j < N; ++j) {
            Complex gp = 0.0;
            for (int n = 1; n < N / 2; ++n) {
                gp += static_cast<double>(n) * coef[n] * unit[(static_cast<long>(n - 1) * j) % N];
            }
            // g' = gp / rho; the rho from dk cancels it
            const Complex ratio = gp / g[j];
            Complex w = unit[j];
            for (int p = 0; p <= max_roots; ++p) {
                mu[p] += w * ratio;
                w *= unit[j];
            }
        }
        for (auto& m : mu) {
            m /= static_cast<double>(N);
        }
        const double m_real = mu[0].real();
        const int m = static_cast<int>(std::lround(m_real));
        if (std::abs(mu[0] - static_cast<double>(m)) > 1e-3 || m < 0 || m > max_roots) {
            return {};
        }
        CircleRoots out;
        out.ok = true;
        out.scale = normalized_max;
        if (m == 0) {
            return out;
        }
        // Newton identities: power sums -> elementary symmetric polynomials
        std::vector<Complex> e(m + 1);
        e[0] = 1.0;
        for (int p = 1; p <= m; ++p) {
            Complex acc = 0.0;
            for (int i = 1; i <= p; ++i) {
                acc += ((i % 2 == 1) ? 1.0 : -1.0) * e[p - i] * mu[i];
            }
            e[p] = acc / static_cast<double>(p);
        }
        if (m == 1) {
            out.roots.push_back(c + rho * e[1]);
            return out;
        }
        // companion matrix of w^m - e1 w^{m-1} + e2 w^{m-2} - ...
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            comp(0, i) = ((i % 2 == 0) ? 1.0 : -1.0) * e[i + 1];
            if (i + 1 < m) {
                comp(i + 1, i) = 1.0;
            }
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
        for (int i = 0; i < m; ++i) {
            out.roots.push_back(c + rho * solver.eigenvalues()[i]);
        }
        return out;
    }
    return {};
}

struct Polished {
    bool converged = false;
    Complex k;
};

Polished newton_polish(const SpectralFn& f, Complex k0, const SearchRectangle& rect, double tol)
{
    Complex k = k0;
    const double slack = 1e-9 * std::max(1.0, std::abs(k0));
    for (int it = 0; it < 40; ++it) {
        const ScaledComplex v = f(k);
        const double h = 1e-7 * std::max(1.0, std::abs(k));
        const Complex gp = (f(k + h).relative_to(v.log_scale) - f(k - h).relative_to(v.log_scale)) / (2.0 * h);
        if (gp == Complex(0.0)) {
            return {false, k};
        }
        const Complex dk = v.value / gp;
        k -= dk;
        if (k.real() < rect.re_min - slack || k.real() > rect.re_max + slack || k.imag() < rect.im_min - slack ||
            k.imag() > rect.im_max + slack || !std::isfinite(std::abs(k))) {
            return {false, k0};
        }
        if (std::abs(dk) < tol) {
            return {true, k};
        }
    }
    return {false, k};
}

double cluster_tolerance(Complex k)
{
    return 1e-3 * std::max(1.0, std::abs(k));
}

struct Node {
    SearchRectangle rect;
    int winding;
    int depth;
    std::uint64_t id;
};

class ZeroSearch {
public:
    ZeroSearch(const SpectralFn& f, const ZeroSearchOptions& opts)
        : f_(f)
        , opts_(opts)
        , edges_(f)
    {
    }

    int winding(const SearchRectangle& r) { return edges_.winding(r); }

    std::vector<EigenvalueRecord> run(const SearchRectangle& root, int w)
    {
        std::vector<Node> level{{root, w, 0, splitmix(opts_.seed)}};
        std::vector<EigenvalueRecord> out;
        while (!level.empty()) {
            std::vector<std::vector<Node>> next(level.size());
            std::vector<std::vector<EigenvalueRecord>> found(level.size());
            for_each_parallel(level.size(), [&](std::size_t i) { process(level[i], next[i], found[i]); });
            std::vector<Node> flat;
            for (std::size_t i = 0; i < level.size(); ++i) {
                flat.insert(flat.end(), next[i].begin(), next[i].end());
                out.insert(out.end(), found[i].begin(), found[i].end());
            }
            level = std::move(flat);
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return std::pair(a.k.real(), a.k.imag()) < std::pair(b.k.real(), b.k.imag());
        });
        return out;
    }

private:
    template <class Fn>
    void for_each_parallel(std::size_t n, Fn&& fn)
    {
        const int threads = std::max(1, std::min<int>(opts_.threads, static_cast<int>(n)));
        if (threads == 1) {
            for (std::size_t i = 0; i < n; ++i) {
                fn(i);
            }
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        if (error) {
            std::rethrow_exception(error);
        }
    }

    EigenvalueRecord make_record(Complex k, int multiplicity, bool resolved)
    {
        EigenvalueRecord r;
        r.k = k;
        r.multiplicity = multiplicity;
        r.residual = std::abs(f_(k).value);
        r.resolved = resolved;
        return r;
    }

    // Records from moment roots; false when they do not account for the winding.
    bool solve_leaf(const Node& node, std::vector<EigenvalueRecord>& found)
    {
        const SearchRectangle& r = node.rect;
        const double rho = 0.5 * std::hypot(r.width(), r.height()) * 1.02;
        const CircleRoots cr = circle_roots(f_, r.center(), rho);
        if (!cr.ok) {
            return false;
        }
        std::vector<Complex> inside;
        for (Complex k : cr.roots) {
            if (r.contains(k)) {
                inside.push_back(k);
            }
        }
        if (static_cast<int>(inside.size()) != node.winding) {
            return false;
        }
        // group roots closer than the cluster tolerance
        const std::size_t n = inside.size();
        std::vector<std::size_t> group(n);
        for (std::size_t i = 0; i < n; ++i) {
            group[i] = i;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (std::abs(inside[i] - inside[j]) < cluster_tolerance(inside[i])) {
                    const std::size_t gi = group[i];
                    const std::size_t gj = group[j];
                    for (auto& g : group) {
                        if (g == gj) {
                            g = gi;
                        }
                    }
                }
            }
        }
        std::vector<EigenvalueRecord> local;
        for (std::size_t g = 0; g < n; ++g) {
            Complex sum = 0.0;
            int count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (group[i] == g) {
                    sum += inside[i];
                    ++count;
                }
            }
            if (count == 0) {
                continue;
            }
            const Complex centroid = sum / static_cast<double>(count);
            Complex k = centroid;
            bool polished = false;
            if (count == 1) {
                const Polished p = newton_polish(f_, centroid, r, opts_.tol);
                double gap = rho;
                for (Complex other : inside) {
                    if (other != centroid) {
                        gap = std::min(gap, std::abs(other - centroid));
                    }
                }
                polished = p.converged && std::abs(p.k - centroid) < 0.5 * gap;
                if (polished) {
                    k = p.k;
                }
            }
            // an ill-conditioned moment solve shows up as a large residual
            if (!polished && std::abs(f_(k).value) > opts_.accept_tol * cr.scale) {
                return false;
            }
            local.push_back(make_record(k, count, true));
        }
        found.insert(found.end(), local.begin(), local.end());
        return true;
    }

    void process(const Node& node, std::vector<Node>& next, std::vector<EigenvalueRecord>& found)
    {
        if (node.winding == 0) {
            return;
        }
        if (node.winding < 0) {
            throw NonIntegerWinding("find_zeros: negative winding for an entire function");
        }
        const SearchRectangle& r = node.rect;
        if (node.winding <= opts_.max_multiplicity && solve_leaf(node, found)) {
            return;
        }
        if (std::max(r.width(), r.height()) < opts_.min_side || node.depth >= opts_.max_depth) {
            found.push_back(make_record(r.center(), node.winding, false));
            return;
        }
        const bool vertical_cut = r.width() >= r.height();
        for (int attempt = 0; attempt < 6; ++attempt) {
            const double u = 0.4 + 0.2 * unit_interval(splitmix(node.id * 31 + attempt));
            SearchRectangle a = r;
            SearchRectangle b = r;
            if (vertical_cut) {
                const double cut = r.re_min + u * r.width();
                a.re_max = cut;
                b.re_min = cut;
            } else {
                const double cut = r.im_min + u * r.height();
                a.im_max = cut;
                b.im_min = cut;
            }
            int wa = 0;
            try {
                wa = edges_.winding(a);
            } catch (const BoundaryZero&) {
                if (attempt == 5) {
                    // |f| sits at the noise floor across the box: report the cluster
                    found.push_back(make_record(r.center(), node.winding, false));
                    return;
                }
                continue;
            }
            const int wb = node.winding - wa;
            if (wb < 0) {
                throw NonIntegerWinding("find_zeros: child windings do not add up");
            }
            next.push_back({a, wa, node.depth + 1, splitmix(node.id * 2)});
            next.push_back({b, wb, node.depth + 1, splitmix(node.id * 2 + 1)});
            return;
        }
    }

    const SpectralFn& f_;
    ZeroSearchOptions opts_;
    EdgeCache edges_;
};

} // namespace

int winding_count(const SpectralFn& f, const SearchRectangle& rect)
{
    EdgeCache cache(f);
    return cache.winding(rect);
}

std::vector<EigenvalueRecord> find_zeros(const SpectralFn& f, const SearchRectangle& rect,
                                         const ZeroSearchOptions& opts)
{
    ZeroSearch search(f, opts);
    SearchRectangle r = rect;
    const double diag = std::hypot(rect.width(), rect.height());
    for (int attempt = 0;; ++attempt) {
        try {
            const int w = search.winding(r);
            return search.run(r, w);
        } catch (const BoundaryZero&) {
            if (attempt == 5) {
                throw;
            }
            const double pad = 1e-6 * diag * (attempt + 1);
            r = SearchRectangle(rect.re_min - pad, rect.re_max + pad, rect.im_min - pad, rect.im_max + pad);
        }
    }
}

std::vector<EigenvalueRecord> find_zeros(const SpectralFn& f, const SearchRectangle& rect, double tol)
{
    ZeroSearchOptions opts;
    opts.tol = tol;
    return find_zeros(f, rect, opts);
}

namespace {

struct PolarCell {
    double r0;
    double r1;
    double t0;
    double t1;
};

std::vector<PolarCell> polar_cells(double alpha, double beta, double R)
{
    const int n_theta = std::max(1, static_cast<int>(std::ceil((beta - alpha) / (pi / 4))));
    std::vector<PolarCell> cells;
    double r0 = 0.0;
    while (r0 < R) {
        const double dr = std::max(1.0, (beta - alpha) / n_theta * r0);
        double r1 = r0 + dr;
        if (r1 > R - 0.25 * dr) {
            r1 = R;
        }
        for (int i = 0; i < n_theta; ++i) {
            const double t0 = alpha + (beta - alpha) * i / n_theta;
            const double t1 = alpha + (beta - alpha) * (i + 1) / n_theta;
            cells.push_back({r0, r1, t0, t1});
        }
        r0 = r1;
    }
    return cells;
}

SearchRectangle bounding_box(const PolarCell& c)
{
    std::vector<double> angles{c.t0, c.t1};
    for (int q = static_cast<int>(std::ceil(c.t0 / (pi / 2))); q * (pi / 2) < c.t1; ++q) {
        angles.push_back(q * (pi / 2));
    }
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (double r : {c.r0, c.r1}) {
        for (double t : angles) {
            x0 = std::min(x0, r * std::cos(t));
            x1 = std::max(x1, r * std::cos(t));
            y0 = std::min(y0, r * std::sin(t));
            y1 = std::max(y1, r * std::sin(t));
        }
    }
    // padding keeps the origin and cell corners off the contour
    const double pad = 0.0123 * (c.r1 - c.r0);
    return {x0 - pad, x1 + pad, y0 - pad, y1 + pad};
}

bool in_cell(Complex k, const PolarCell& c, double alpha)
{
    const double rho = std::abs(k);
    double t = std::arg(k);
    while (t < alpha) {
        t += 2 * pi;
    }
    while (t >= alpha + 2 * pi) {
        t -= 2 * pi;
    }
    return rho > c.r0 && rho <= c.r1 && t >= c.t0 && t < c.t1;
}

} // namespace

std::vector<EigenvalueRecord> zeros_in_sector(const SpectralFn& f, double alpha, double beta, double R,
                                              const ZeroSearchOptions& opts)
{
    if (!(alpha < beta) || beta - alpha > 2 * pi || !(R > 0.0)) {
        throw InvalidInput("zeros_in_sector: need alpha < beta <= alpha + 2 pi and R > 0");
    }
    std::vector<EigenvalueRecord> out;
    const double origin_radius = 1e-9 * std::max(1.0, R);
    for (const auto& cell : polar_cells(alpha, beta, R)) {
        for (auto& rec : find_zeros(f, bounding_box(cell), opts)) {
            if (std::abs(rec.k) > origin_radius && in_cell(rec.k, cell, alpha)) {
                out.push_back(std::move(rec));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.k.real(), a.k.imag()) < std::pair(b.k.real(), b.k.imag());
    });
    return out;
}

int count_zeros_sector(const SpectralFn& f, double alpha, double beta, double R, const ZeroSearchOptions& opts)
{
    int n = 0;
    for (const auto& rec : zeros_in_sector(f, alpha, beta, R, opts)) {
        n += rec.multiplicity;
    }
    return n;
}

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace

bool is_degenerate(const SpectralFn& f, const SearchRectangle& rect)
{
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 4; ++j) {
            const Complex k(rect.re_min + (i + 0.5) / 8.0 * rect.width(), rect.im_min + (j + 0.5) / 4.0 * rect.height());
            worst = std::max(worst, std::abs(f(k).value));
        }
    }
    return worst < 1e-10;
}

DensityReport density_estimate(const SpectralFn& f, double alpha, double beta, const std::vector<double>& radii,
                               double theoretical, const ZeroSearchOptions& opts)
{
    if (radii.size() < 3 || !std::is_sorted(radii.begin(), radii.end()) ||
        std::adjacent_find(radii.begin(), radii.end()) != radii.end() || !(radii.front() > 0.0)) {
        throw InvalidInput("density_estimate: need at least three increasing positive radii");
    }
    DensityReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.radii = radii;
    rep.theoretical = theoretical;
    const double R = radii.back();
    const SearchRectangle probe = bounding_box({0.0, R, alpha, beta});
    if (is_degenerate(f, probe)) {
        rep.degenerate = true;
        rep.counts.assign(radii.size(), 0);
        return rep;
    }
    const auto zeros = zeros_in_sector(f, alpha, beta, R, opts);
    std::vector<double> counts;
    for (double Ri : radii) {
        int n = 0;
        for (const auto& z : zeros) {
            if (std::abs(z.k) <= Ri) {
                n += z.multiplicity;
            }
        }
        rep.counts.push_back(n);
        counts.push_back(n);
    }
    rep.slope = least_squares_slope(radii, counts);
    rep.deviation = theoretical != 0.0 ? std::abs(rep.slope - theoretical) / std::abs(theoretical) : rep.slope;
    return rep;
}

double indicator_estimate(const SpectralFn& f, double theta, const std::vector<double>& radii)
{
    if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end())) {
        throw InvalidInput("indicator_estimate: need at least two increasing radii");
    }
    // the largest half; short lists are used whole
    const std::size_t first = radii.size() >= 4 ? radii.size() / 2 : 0;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = first; i < radii.size(); ++i) {
        const ScaledComplex v = f(std::polar(radii[i], theta));
        if (!std::isfinite(std::abs(v.value))) {
            throw OverflowGuard("indicator_estimate: function value overflowed; pass a normalized function");
        }
        const double la = v.log_abs();
        if (std::isfinite(la)) {
            x.push_back(radii[i]);
            y.push_back(la);
        }
    }
    if (x.size() < 2) {
        throw InvalidInput("indicator_estimate: fewer than two usable samples");
    }
    return least_squares_slope(x, y);
}

} // namespace itep
