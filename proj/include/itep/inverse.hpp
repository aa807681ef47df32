#ifndef ITEP_INVERSE_HPP
#define ITEP_INVERSE_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itep/tunneling.hpp"

namespace itep {

struct SpectrumEntry {
    Complex k;
    int l = 0;
    int multiplicity = 1;
};

/// Eigenvalues along one direction, deduplicated at 1e-7 (multiplicities add)
/// and sorted by (|k|, arg k).
struct SpectrumSample {
    std::vector<SpectrumEntry> entries;
    Vec3 direction = Vec3::UnitX();
    std::optional<SearchRectangle> rect;

    void normalize();
    /// number of eigenvalues counted with multiplicity
    int count() const;
};

SpectrumSample make_sample(const std::vector<EigenvalueRecord>& records, const Vec3& direction,
                           const std::optional<SearchRectangle>& rect);

/// Propagating eigenvalues of the ray problem for each l in `l_list`.
SpectrumSample ray_spectrum(const RadialProfile& profile, const IntersectionSet& intersections,
                            std::span<const int> l_list, const SearchRectangle& rect,
                            const ZeroSearchOptions& opts = {});

/// Matching distance over |k| <= k_cut: within each l, repeated entries are
/// paired greedily by nearest distance, ties by modulus order; each unmatched
/// entry costs k_cut. Returns sqrt(sum of squared costs / larger count), where
/// pair distances below 1e-7 count as zero. Throws IncompatibleTruncation when
/// the counts differ by more than 20%.
double spectral_distance(const SpectrumSample& s1, const SpectrumSample& s2, double k_cut);

struct ProbeResult {
    bool distinct = false;
    /// spectral distance per probed l (infinity for incompatible counts)
    std::vector<double> distances;
    SpectrumSample sample1;
    SpectrumSample sample2;

    std::string verdict() const { return distinct ? "distinct" : "indistinguishable_at_resolution"; }
};

/// Compares the ray spectra of two media along `direction` for each l; the
/// intersection sets come from the interfaces of each restricted profile.
ProbeResult uniqueness_probe(const MediumField& field1, const MediumField& field2, const Vec3& direction,
                             std::span<const int> l_list, const SearchRectangle& rect, double tol,
                             const ZeroSearchOptions& opts = {});

/// Radial profiles along a ray parameterized by a few reals; the medium is
/// supported in [0, r_hat] and the spectrum is that of D_l(k; r_hat).
struct ProfileFamily {
    std::string name;
    int dim = 1;
    double r_hat = 1.0;
    std::function<RadialProfile(std::span<const double>)> make;

    /// n = p[0] on [0, radius)
    static ProfileFamily constant_ball(double radius = 1.0);
    /// n = p[0] on [0, r_split), p[1] on [r_split, radius)
    static ProfileFamily two_layer(double r_split, double radius = 1.0);
};

struct FitOptions {
    int max_iterations = 200;
    double mismatch_tol = 1e-8;
    /// initial trust radius as a fraction of each bound width
    double initial_radius = 0.1;
    /// trust radii below this (times max(1, |p|)) end the search
    double min_radius = 1e-12;
    ZeroSearchOptions search;
};

struct FitResult {
    std::vector<double> parameters;
    double mismatch = 0.0;
    int iterations = 0;
    bool converged = false;
    /// mismatch after each accepted step, starting with the initial value
    std::vector<double> history;
    std::string diagnostics;
};

/// Sum of squared distances between paired eigenvalues of the target and the
/// model. Unmatched entries cost their squared distance to the rectangle edge,
/// so an eigenvalue leaving the window adds no jump.
double spectrum_mismatch(const SpectrumSample& target, const SpectrumSample& model);

/// Model spectrum of the family at p over the target's l values and rectangle.
SpectrumSample family_spectrum(const ProfileFamily& family, std::span<const double> p, const SpectrumSample& target,
                               const ZeroSearchOptions& opts = {});

/// Derivative-free trust-region fit (coordinate-wise quadratic model) of the
/// family to the target spectrum. Stops when the mismatch drops below
/// mismatch_tol, the trust radius collapses, or max_iterations is reached.
/// converged is false in the last two cases; the caller decides whether that
/// is an error.
FitResult fit_profile(const SpectrumSample& target, const ProfileFamily& family, std::vector<double> init,
                      const std::vector<double>& lower, const std::vector<double>& upper,
                      const FitOptions& opts = {});

} // namespace itep

#endif // ITEP_INVERSE_HPP
