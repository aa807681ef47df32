#ifndef ITEP_SPECTRA_HPP
#define ITEP_SPECTRA_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "itep/types.hpp"

namespace itep {

/// Entire function of k, returned as mantissa and exponent. The exponent may
/// depend on k only through a positive real factor so the phase of `value`
/// is the phase of the function.
using SpectralFn = std::function<ScaledComplex(Complex)>;

/// Wraps an ordinary complex function (exponent 0).
SpectralFn plain(std::function<Complex(Complex)> f);

struct SearchRectangle {
    double re_min;
    double re_max;
    double im_min;
    double im_max;

    SearchRectangle(double re_min, double re_max, double im_min, double im_max);

    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    bool contains(Complex k) const;
};

struct EigenvalueRecord {
    Complex k;
    int l = 0;
    int multiplicity = 1;
    /// |normalized f(k)|
    double residual = 0.0;
    std::vector<double> interface_residuals;
    /// false for clusters left unresolved at the depth or size limit
    bool resolved = true;
    std::string verdict;
    /// index of the ray interval whose determinant produced the zero (-1: none)
    int interval = -1;
    /// another interval produced a zero within the dedup distance
    bool collision = false;
};

struct ZeroSearchOptions {
    double tol = 1e-10;
    double accept_tol = 1e-9;
    double min_side = 1e-8;
    int max_depth = 60;
    int max_multiplicity = 4;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Winding number of f around the rectangle (argument principle). Throws
/// BoundaryZero when |f| < 1e-13 on the boundary, NonIntegerWinding when the
/// total phase is not within 0.25 of a multiple of 2 pi.
int winding_count(const SpectralFn& f, const SearchRectangle& rect);

/// Zeros of f inside the rectangle, sorted by (re, im).
std::vector<EigenvalueRecord> find_zeros(const SpectralFn& f, const SearchRectangle& rect,
                                         const ZeroSearchOptions& opts = {});
std::vector<EigenvalueRecord> find_zeros(const SpectralFn& f, const SearchRectangle& rect, double tol);

/// Zeros in {alpha < arg k < beta, 0 < |k| <= R}, each with its multiplicity.
std::vector<EigenvalueRecord> zeros_in_sector(const SpectralFn& f, double alpha, double beta, double R,
                                              const ZeroSearchOptions& opts = {});

/// Sum of multiplicities of zeros_in_sector.
int count_zeros_sector(const SpectralFn& f, double alpha, double beta, double R, const ZeroSearchOptions& opts = {});

struct DensityReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> radii;
    std::vector<int> counts;
    double slope = 0.0;
    double theoretical = 0.0;
    /// |slope - theoretical| / theoretical
    double deviation = 0.0;
    /// f vanished on the probe grid; counts are meaningless
    bool degenerate = false;
};

/// Least-squares slope of N(R) against R, compared with `theoretical`.
DensityReport density_estimate(const SpectralFn& f, double alpha, double beta, const std::vector<double>& radii,
                               double theoretical, const ZeroSearchOptions& opts = {});

/// Least-squares slope of log|f(R e^{i theta})| against R over the largest half of `radii`.
double indicator_estimate(const SpectralFn& f, double theta, const std::vector<double>& radii);

/// max |f.value| over a 32-point probe grid in the rectangle is below 1e-10.
bool is_degenerate(const SpectralFn& f, const SearchRectangle& rect);

} // namespace itep

#endif // ITEP_SPECTRA_HPP
