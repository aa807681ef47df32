#ifndef ITEP_TUNNELING_HPP
#define ITEP_TUNNELING_HPP

#include <string>
#include <vector>

#include "itep/determinant.hpp"
#include "itep/geometry.hpp"
#include "itep/spectra.hpp"

namespace itep {

/// Largest normalized |D_l(k; r_j)| for which an interface counts as satisfied.
inline constexpr double propagation_tol = 1e-7;

/// Distance below which zeros from different intervals are the same eigenvalue.
inline constexpr double dedup_distance = 1e-7;

/// Interval [a, b] between consecutive intersection radii (a = 0 for j = 0).
struct IntervalSpec {
    int j = 0;
    double a = 0.0;
    double b = 0.0;
    bool inside = false;

    bool origin_anchored() const { return a == 0.0; }
};

/// Bounded intervals of the ray, in order; the unbounded exterior is left out.
std::vector<IntervalSpec> intervals(const IntersectionSet& s);

/// Drops radii that separate intervals with the same label. Such points are
/// not boundary crossings, and re-anchoring there would add a spurious condition.
IntersectionSet merge_spurious(const IntersectionSet& s);

/// Intersection set read off the profile itself: its breakpoints, with an
/// interval inside when n differs from 1 at its midpoint.
IntersectionSet intersections_from_profile(const RadialProfile& profile);

struct IntervalSpectrum {
    IntervalSpec interval;
    std::vector<EigenvalueRecord> records;
    /// the interval determinant vanished on the probe grid
    bool degenerate = false;
};

/// Zeros of k -> D_l(k; b) with y started from origin data when a = 0 and by
/// interface matching y = r j_l(kr) at a otherwise.
IntervalSpectrum interval_eigenvalues(int l, const RadialProfile& profile, const IntervalSpec& interval,
                                      const SearchRectangle& rect, const ZeroSearchOptions& opts = {});

struct TunnelingChain {
    int l = 0;
    Complex k;
    /// r_0 = 0 followed by the intersection radii
    std::vector<double> radii;
    /// normalized |D_l(k; r_j)|, one per entry of `radii`
    std::vector<double> interface_residuals;
    /// medium-side state at the end of each interval
    std::vector<ScaledState> interval_ends;
    bool propagates = true;
    /// index into `radii` of the first residual above tolerance, -1 if none
    int failed_at = -1;
    /// n = 1 on every interval, so every k passes vacuously
    bool degenerate = false;

    /// "propagates", "fails_at(j)" or "degenerate"
    std::string verdict() const;
};

/// Carries k along the ray: solve each interval, evaluate D_l at its right
/// end, re-anchor by interface matching and continue. The chain starts at the
/// origin when it lies inside, otherwise at the first entry radius. Spurious
/// radii are merged first.
TunnelingChain propagate(int l, Complex k, const RadialProfile& profile, const IntersectionSet& intersections);

struct FullSpectrum {
    /// one entry per inside interval
    std::vector<IntervalSpectrum> intervals;
    /// union over the inside intervals, deduplicated, with verdicts and residuals
    std::vector<EigenvalueRecord> records;
    /// every inside interval was degenerate (or there were none)
    bool degenerate = false;

    std::vector<EigenvalueRecord> propagating() const;
};

FullSpectrum full_spectrum(int l, const RadialProfile& profile, const IntersectionSet& intersections,
                           const SearchRectangle& rect, const ZeroSearchOptions& opts = {});

} // namespace itep

#endif // ITEP_TUNNELING_HPP
