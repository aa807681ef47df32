#include "itep/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

namespace itep::cli {

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void log_stage(const RunConfig& cfg, const std::string& msg)
{
    std::fprintf(stderr, "itep %s: %s\n", cfg.command.c_str(), msg.c_str());
}

struct Ray {
    RadialProfile profile;
    IntersectionSet intersections;
};

Ray ray(const RunConfig& cfg, const Vec3& direction)
{
    RadialProfile profile = restrict_to_ray(cfg.medium, direction);
    IntersectionSet set = cfg.domain ? intersect_ray(*cfg.domain, direction) : intersections_from_profile(profile);
    return {std::move(profile), std::move(set)};
}

std::string suffix(std::size_t i)
{
    return "_d" + std::to_string(i) + ".csv";
}

json base_summary(const RunConfig& cfg)
{
    json s;
    s["command"] = cfg.command;
    s["config"] = cfg.resolved;
    s["config_hash"] = cfg.hash;
    s["seed"] = cfg.search.seed;
    s["warnings"] = json::array();
    return s;
}

json direction_json(const Vec3& d)
{
    return json::array({d.x(), d.y(), d.z()});
}

double max_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

} // namespace

Report cmd_eig(const RunConfig& cfg)
{
    Report rep;
    rep.summary = base_summary(cfg);
    json per_dir = json::array();
    for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
        const Ray r = ray(cfg, cfg.directions[i]);
        std::ostringstream csv;
        csv << "l,re_k,im_k,multiplicity,residual,verdict,interface_residual_max\n";
        int rows = 0;
        int propagating = 0;
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            log_stage(cfg, "direction " + std::to_string(i) + ", l = " + std::to_string(l));
            const FullSpectrum fs = full_spectrum(l, r.profile, r.intersections, *cfg.rect, cfg.search);
            if (fs.degenerate) {
                rep.summary["warnings"].push_back("degenerate: the determinant vanishes identically along direction " +
                                                  std::to_string(i) + " for l = " + std::to_string(l) +
                                                  " (n = 1 on every inside interval); no eigenvalues reported");
            }
            for (const auto& rec : fs.records) {
                csv << l << ',' << fmt(rec.k.real()) << ',' << fmt(rec.k.imag()) << ',' << rec.multiplicity << ','
                    << fmt(rec.residual) << ',' << rec.verdict << ',' << fmt(max_of(rec.interface_residuals))
                    << '\n';
                ++rows;
                propagating += rec.verdict == "propagates" ? 1 : 0;
                if (!rec.resolved) {
                    rep.summary["warnings"].push_back("unresolved cluster near " + fmt(rec.k.real()) + " + " +
                                                      fmt(rec.k.imag()) + "i (direction " + std::to_string(i) +
                                                      ", l = " + std::to_string(l) + ")");
                }
            }
        }
        const std::string name = "eigenvalues" + suffix(i);
        rep.files[name] = csv.str();
        per_dir.push_back({{"direction", direction_json(cfg.directions[i])},
                           {"file", name},
                           {"rows", rows},
                           {"propagating", propagating},
                           {"intersection_radii", r.intersections.radii}});
    }
    rep.summary["directions"] = per_dir;
    return rep;
}

namespace {

// slope with intercept through the first `m` points; N/R for a single point
double running_slope(const std::vector<double>& x, const std::vector<int>& y, std::size_t m)
{
    if (m == 1) {
        return y[0] / x[0];
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::string density_csv(const DensityReport& d)
{
    std::ostringstream csv;
    csv << "R,N,theoretical,estimate,deviation\n";
    for (std::size_t i = 0; i < d.radii.size(); ++i) {
        const double est = running_slope(d.radii, d.counts, i + 1);
        const double dev = d.theoretical > 0.0 ? std::abs(est - d.theoretical) / d.theoretical : 0.0;
        csv << fmt(d.radii[i]) << ',' << d.counts[i] << ',' << fmt(d.theoretical) << ',' << fmt(est) << ','
            << fmt(dev) << '\n';
    }
    return csv.str();
}

json density_json(const DensityReport& d)
{
    return {{"slope", d.slope}, {"theoretical", d.theoretical}, {"deviation", d.deviation},
            {"degenerate", d.degenerate}, {"counts", d.counts}};
}

} // namespace

Report cmd_density(const RunConfig& cfg)
{
    Report rep;
    rep.summary = base_summary(cfg);
    const DensitySpec& spec = cfg.density;
    if (spec.test_function == "sin2k") {
        log_stage(cfg, "synthetic sin(2k)");
        const SpectralFn f = plain([](Complex k) { return std::sin(2.0 * k); });
        const DensityReport d = density_estimate(f, spec.alpha, spec.beta, spec.radii, 2.0 / std::numbers::pi, cfg.search);
        rep.files["density_sin2k.csv"] = density_csv(d);
        rep.summary["results"] = json::array({density_json(d)});
        rep.summary["results"][0]["file"] = "density_sin2k.csv";
        return rep;
    }
    json results = json::array();
    for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
        const Ray r = ray(cfg, cfg.directions[i]);
        const double r_hat = std::max(r.profile.support_end(),
                                      r.intersections.radii.empty() ? 0.0 : r.intersections.radii.back());
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            log_stage(cfg, "direction " + std::to_string(i) + ", l = " + std::to_string(l));
            DensityReport d;
            if (r_hat > 0.0) {
                const double theoretical = (r_hat + travel_time(r.profile, r_hat)) / std::numbers::pi;
                d = density_estimate(determinant_function(l, r.profile, r_hat, StartSpec::origin()), spec.alpha,
                                     spec.beta, spec.radii, theoretical, cfg.search);
            } else {
                // no medium along this ray at all
                d.alpha = spec.alpha;
                d.beta = spec.beta;
                d.radii = spec.radii;
                d.counts.assign(spec.radii.size(), 0);
                d.degenerate = true;
            }
            if (d.degenerate) {
                rep.summary["warnings"].push_back("degenerate: the determinant vanishes identically along direction " +
                                                  std::to_string(i) + " for l = " + std::to_string(l));
            }
            const std::string name = "density_d" + std::to_string(i) + "_l" + std::to_string(l) + ".csv";
            rep.files[name] = density_csv(d);
            json dj = density_json(d);
            dj["file"] = name;
            dj["r_hat"] = r_hat;
            dj["direction"] = direction_json(cfg.directions[i]);
            dj["l"] = l;
            results.push_back(dj);
        }
    }
    rep.summary["results"] = results;
    return rep;
}

Report cmd_tunnel(const RunConfig& cfg)
{
    Report rep;
    rep.summary = base_summary(cfg);
    json per_dir = json::array();
    for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
        const Ray r = ray(cfg, cfg.directions[i]);
        const IntersectionSet set = merge_spurious(r.intersections);
        std::ostringstream csv;
        csv << "l,re_k,im_k,verdict";
        for (std::size_t j = 1; j <= set.radii.size(); ++j) {
            csv << ",r" << j;
        }
        csv << '\n';
        json dj{{"direction", direction_json(cfg.directions[i])}, {"radii", set.radii}};
        if (set.radii.empty()) {
            dj["note"] = "no intersections along this direction; the residual matrix is empty";
        }
        int rows = 0;
        double worst_propagating = 0.0;
        for (int l = cfg.l_min; l <= cfg.l_max && !set.radii.empty(); ++l) {
            log_stage(cfg, "direction " + std::to_string(i) + ", l = " + std::to_string(l));
            const FullSpectrum fs = full_spectrum(l, r.profile, set, *cfg.rect, cfg.search);
            if (fs.degenerate) {
                rep.summary["warnings"].push_back("degenerate: the determinant vanishes identically along direction " +
                                                  std::to_string(i) + " for l = " + std::to_string(l));
            }
            for (const auto& rec : fs.records) {
                csv << l << ',' << fmt(rec.k.real()) << ',' << fmt(rec.k.imag()) << ',' << rec.verdict;
                // entry 0 belongs to r = 0 and is zero by construction
                for (std::size_t j = 1; j < rec.interface_residuals.size(); ++j) {
                    csv << ',' << fmt(rec.interface_residuals[j]);
                }
                csv << '\n';
                ++rows;
                if (rec.verdict == "propagates") {
                    worst_propagating = std::max(worst_propagating, max_of(rec.interface_residuals));
                }
            }
        }
        const std::string name = "tunnel" + suffix(i);
        rep.files[name] = csv.str();
        dj["file"] = name;
        dj["rows"] = rows;
        dj["max_propagating_residual"] = worst_propagating;
        per_dir.push_back(dj);
    }
    rep.summary["directions"] = per_dir;
    return rep;
}

namespace {

ProfileFamily make_family(const FitSpec& spec)
{
    return spec.family == "constant" ? ProfileFamily::constant_ball(spec.radius)
                                     : ProfileFamily::two_layer(spec.r_split, spec.radius);
}

json sample_json(const SpectrumSample& s)
{
    json out = json::array();
    for (const auto& e : s.entries) {
        out.push_back({{"l", e.l}, {"re_k", e.k.real()}, {"im_k", e.k.imag()}, {"multiplicity", e.multiplicity}});
    }
    return out;
}

} // namespace

Report cmd_fit(const RunConfig& cfg)
{
    Report rep;
    rep.summary = base_summary(cfg);
    const FitSpec& spec = cfg.fit;
    const ProfileFamily family = make_family(spec);
    SpectrumSample probe;
    probe.rect = *cfg.rect;
    probe.direction = cfg.directions.front();
    for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
        probe.entries.push_back({1.0, l, 1});
    }
    SpectrumSample target;
    if (spec.target_parameters) {
        log_stage(cfg, "target spectrum from the family");
        target = family_spectrum(family, *spec.target_parameters, probe, cfg.search);
    } else {
        log_stage(cfg, "target spectrum from the medium along the first direction");
        const RadialProfile profile = restrict_to_ray(cfg.medium, cfg.directions.front());
        std::vector<EigenvalueRecord> all;
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            auto recs = find_zeros(determinant_function(l, profile, spec.radius, StartSpec::origin()), *cfg.rect,
                                   cfg.search);
            for (auto& rec : recs) {
                rec.l = l;
            }
            all.insert(all.end(), recs.begin(), recs.end());
        }
        target = make_sample(all, probe.direction, probe.rect);
    }
    log_stage(cfg, "fitting " + std::to_string(target.count()) + " target eigenvalues");
    const FitResult fr = fit_profile(target, family, spec.init, spec.lower, spec.upper, spec.options);
    json out{{"family", family.name},
             {"parameters", fr.parameters},
             {"mismatch", fr.mismatch},
             {"iterations", fr.iterations},
             {"converged", fr.converged},
             {"history", fr.history},
             {"diagnostics", fr.diagnostics},
             {"target", sample_json(target)}};
    rep.files["fit.json"] = out.dump(2) + "\n";
    rep.summary["fit"] = {{"parameters", fr.parameters}, {"mismatch", fr.mismatch}, {"converged", fr.converged}};
    rep.nonconverged = !fr.converged;
    if (rep.nonconverged) {
        rep.summary["warnings"].push_back("fit did not converge: " + fr.diagnostics);
    }
    return rep;
}

namespace {

double double_factorial_odd(int l)
{
    double p = 1.0;
    for (int i = 3; i <= 2 * l + 1; i += 2) {
        p *= i;
    }
    return p;
}

} // namespace

Report cmd_field(const RunConfig& cfg)
{
    Report rep;
    rep.summary = base_summary(cfg);
    const FieldSpec& spec = cfg.field;
    const int l = spec.l;
    const Complex k = spec.k;
    json per_dir = json::array();
    for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
        log_stage(cfg, "direction " + std::to_string(i));
        const Ray ry = ray(cfg, cfg.directions[i]);
        const IntersectionSet set = merge_spurious(ry.intersections);
        const double outer = std::max({1.0, ry.profile.support_end(), set.radii.empty() ? 0.0 : set.radii.back()});
        const double r_max = spec.r_max > 0.0 ? spec.r_max : 1.5 * outer;

        // medium solution: regular at the origin, or equal to r j_l(kr) up to the first entry radius
        const bool from_origin = set.radii.empty() || set.origin_inside();
        const double r0 = from_origin ? 0.0 : set.radii.front();
        const OdeOptions opts{.rtol = 1e-11, .dense = true};
        const RadialSolution sol = from_origin ? solve_from_origin(AngularOrder(l), k, ry.profile, r_max, opts)
                                               : solve_from_interface(AngularOrder(l), k, ry.profile, r0, r_max, opts);
        // scale so that y matches r j_l(kr) near the origin when n = 1
        const Complex c = from_origin ? std::pow(k, l) / double_factorial_odd(l) : Complex(1.0);

        const auto free_pair = [&](double r) {
            const Complex j = spherical_bessel_j(l, k * r);
            const Complex jp = spherical_bessel_j_prime(l, k * r);
            return std::pair<Complex, Complex>(j, k * jp);
        };
        // w / b and its r-derivative
        const auto medium_pair = [&](double r) {
            if (!from_origin && r <= r0) {
                return free_pair(r);
            }
            Complex y;
            Complex dy;
            if (r < sol.r_start()) {
                const ScaledState s = origin_data(l, k, ry.profile(0.0), r);
                y = s.y * std::exp(s.log_scale);
                dy = s.dy * std::exp(s.log_scale);
            } else {
                std::tie(y, dy) = sol(r);
            }
            return std::pair<Complex, Complex>(c * y / r, c * (dy / r - y / (r * r)));
        };

        Complex b = spec.b.value_or(spec.a);
        if (!spec.b && !set.radii.empty()) {
            const double rm = from_origin ? set.radii.front() : (set.radii.size() > 1 ? set.radii[1] : r0);
            // least squares over the Cauchy data (w, w') = b (m, m') against a (u, u')
            const auto [m, dm] = medium_pair(rm);
            const auto [u, du] = free_pair(rm);
            const double norm = std::norm(m) + std::norm(dm);
            if (!(norm > 0.0)) {
                throw NumericError("field: medium solution has zero Cauchy data at the matching radius");
            }
            b = spec.a * (u * std::conj(m) + du * std::conj(dm)) / norm;
        }

        std::vector<double> radii;
        for (int s = 1; s <= spec.samples; ++s) {
            radii.push_back(r_max * s / spec.samples);
        }
        for (double r : set.radii) {
            if (r > 0.0 && r <= r_max) {
                radii.push_back(r);
            }
        }
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

        std::ostringstream csv;
        csv << "r,re_v,im_v,re_w,im_w,mismatch\n";
        const auto row = [&](double r) {
            const auto [u, du] = free_pair(r);
            const auto [m, dm] = medium_pair(r);
            const Complex v = spec.a * u;
            const Complex w = b * m;
            const double mismatch = std::abs(v - w) + std::abs(spec.a * du - b * dm);
            csv << fmt(r) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ',' << fmt(w.real()) << ','
                << fmt(w.imag()) << ',' << fmt(mismatch) << '\n';
            return mismatch;
        };
        json interface_mismatch = json::array();
        for (double r : radii) {
            const double mm = row(r);
            if (std::find(set.radii.begin(), set.radii.end(), r) != set.radii.end()) {
                interface_mismatch.push_back({{"r", r}, {"mismatch", mm}});
            }
        }
        const std::string name = "field" + suffix(i);
        rep.files[name] = csv.str();
        per_dir.push_back({{"direction", direction_json(cfg.directions[i])},
                           {"file", name},
                           {"b", json::array({b.real(), b.imag()})},
                           {"interface_mismatch", interface_mismatch}});
    }
    rep.summary["directions"] = per_dir;
    return rep;
}

Report run(const RunConfig& cfg)
{
    if (cfg.command == "eig") {
        return cmd_eig(cfg);
    }
    if (cfg.command == "density") {
        return cmd_density(cfg);
    }
    if (cfg.command == "tunnel") {
        return cmd_tunnel(cfg);
    }
    if (cfg.command == "fit") {
        return cmd_fit(cfg);
    }
    if (cfg.command == "field") {
        return cmd_field(cfg);
    }
    throw InvalidInput("unknown command \"" + cfg.command + "\"");
}

void write_report(const RunConfig& cfg, const Report& report)
{
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    json summary = report.summary;
    summary["files"] = json::array();
    for (const auto& [name, text] : report.files) {
        std::ofstream out(dir / name, std::ios::binary);
        out << text;
        if (!out) {
            throw NumericError("cannot write " + (dir / name).string());
        }
        summary["files"].push_back(name);
    }
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
    if (!out) {
        throw NumericError("cannot write " + (dir / "summary.json").string());
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Interior transmission eigenvalues along rays"};
    std::string command;
    std::string config_path;
    Overrides ov;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    app.add_option("command", command, "eig, density, tunnel, fit or field")
        ->required()
        ->check(CLI::IsMember({"eig", "density", "tunnel", "fit", "field"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    auto* out_opt = app.add_option("--out-dir", out_dir, "output directory (overrides output.dir)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads for the zero search");
    auto* seed_opt = app.add_option("--seed", seed, "seed for the subdivision jitter");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }
    if (*out_opt) {
        ov.out_dir = out_dir;
    }
    if (*threads_opt) {
        ov.threads = threads;
    }
    if (*seed_opt) {
        ov.seed = seed;
    }

    RunConfig cfg;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            throw InvalidInput("config: cannot read " + config_path);
        }
        std::ostringstream text;
        text << in.rdbuf();
        cfg = load_config(command, text.str(), ov);
    } catch (const Error& e) {
        std::fprintf(stderr, "itep: %s\n", e.what());
        return exit_config;
    }

    try {
        const Report report = run(cfg);
        write_report(cfg, report);
        if (report.nonconverged) {
            std::fprintf(stderr, "itep: fit did not converge\n");
            return exit_nonconvergence;
        }
        return exit_ok;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "itep: %s\n", e.what());
        return exit_config;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "itep: %s\n", e.what());
        return exit_nonconvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "itep: %s\n", e.what());
        return exit_numeric;
    }
}

} // namespace itep::cli
