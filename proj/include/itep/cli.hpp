#ifndef ITEP_CLI_HPP
#define ITEP_CLI_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "itep/inverse.hpp"

namespace itep::cli {

using nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_nonconvergence = 4;

struct DensitySpec {
    double alpha = -0.1;
    double beta = 0.1;
    std::vector<double> radii;
    /// "sin2k" replaces the determinant by sin(2k)
    std::string test_function;
};

struct FitSpec {
    std::string family = "constant";
    double radius = 1.0;
    double r_split = 0.5;
    std::vector<double> init;
    std::vector<double> lower;
    std::vector<double> upper;
    /// generate the target inside the family instead of from the medium
    std::optional<std::vector<double>> target_parameters;
    FitOptions options;
};

struct FieldSpec {
    Complex k;
    int l = 0;
    Complex a{1.0, 0.0};
    /// empty: least-squares match of (w, w') to (v, v') at the first interface
    std::optional<Complex> b = Complex(1.0, 0.0);
    int samples = 200;
    /// 0 selects 1.5 times the outermost radius
    double r_max = 0.0;
};

/// Validated configuration. `resolved` is the input with every default filled
/// in; `hash` is FNV-1a over its compact dump.
struct RunConfig {
    std::string command;
    json resolved;
    std::string hash;
    MediumField medium = MediumField::background();
    std::optional<SimpleDomain> domain;
    std::vector<Vec3> directions;
    int l_min = 0;
    int l_max = 0;
    std::optional<SearchRectangle> rect;
    ZeroSearchOptions search;
    std::string out_dir = "itep_out";
    DensitySpec density;
    FitSpec fit;
    FieldSpec field;
};

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

/// Parses and validates everything the command needs. Throws InvalidInput;
/// nothing is computed here.
RunConfig load_config(const std::string& command, const std::string& text, const Overrides& overrides = {});

std::uint64_t fnv1a(const std::string& bytes);

/// Fibonacci lattice of `count` unit vectors.
std::vector<Vec3> fibonacci_directions(int count);

/// Output file name -> contents. Nothing touches the disk until write_report.
struct Report {
    std::map<std::string, std::string> files;
    json summary;
    /// the fit stopped without reaching its tolerance
    bool nonconverged = false;
};

Report run(const RunConfig& cfg);

Report cmd_eig(const RunConfig& cfg);
Report cmd_density(const RunConfig& cfg);
Report cmd_tunnel(const RunConfig& cfg);
Report cmd_fit(const RunConfig& cfg);
Report cmd_field(const RunConfig& cfg);

/// Writes every file plus summary.json into cfg.out_dir.
void write_report(const RunConfig& cfg, const Report& report);

/// %.17g
std::string fmt(double x);

/// Entry point shared by the executable and the tests; returns the exit code.
int main(int argc, char** argv);

} // namespace itep::cli

#endif // ITEP_CLI_HPP
