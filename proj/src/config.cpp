#include "itep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace itep::cli {

namespace {

[[noreturn]] void bad(const std::string& what)
{
    throw InvalidInput("config: " + what);
}

const json& need(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) {
        bad(where + " needs \"" + key + "\"");
    }
    return j.at(key);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) {
        bad(where + " must be a number");
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        bad(where + " must be finite");
    }
    return x;
}

double positive(const json& j, const std::string& where)
{
    const double x = number(j, where);
    if (!(x > 0.0)) {
        bad(where + " must be positive");
    }
    return x;
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) {
        bad(where + " must be an integer");
    }
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where)
{
    if (!j.is_array()) {
        bad(where + " must be an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Vec3 vec3(const json& j, const std::string& where)
{
    const auto v = numbers(j, where);
    if (v.size() != 3) {
        bad(where + " must have three components");
    }
    return {v[0], v[1], v[2]};
}

json to_json(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

Complex complex_value(const json& j, const std::string& where)
{
    const auto v = numbers(j, where);
    if (v.size() != 2) {
        bad(where + " must be [re, im]");
    }
    return {v[0], v[1]};
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    if (!j.is_object()) {
        bad(where + " must be an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            bad(where + ": unknown key \"" + key + "\"");
        }
    }
}

MediumField parse_medium(json& m)
{
    const std::string kind = need(m, "kind", "medium").is_string() ? m.at("kind").get<std::string>() : "";
    if (!m.contains("center")) {
        m["center"] = json::array({0.0, 0.0, 0.0});
    }
    const Vec3 center = vec3(m.at("center"), "medium.center");
    if (kind == "uniform_ball") {
        only_keys(m, {"kind", "center", "radius", "n0"}, "medium");
        return MediumField::uniform_ball(center, positive(need(m, "radius", "medium"), "medium.radius"),
                                         positive(need(m, "n0", "medium"), "medium.n0"));
    }
    if (kind == "radially_stratified") {
        only_keys(m, {"kind", "center", "layers"}, "medium");
        const json& layers = need(m, "layers", "medium");
        if (!layers.is_array() || layers.empty()) {
            bad("medium.layers must be a non-empty array");
        }
        std::vector<StratifiedLayer> out;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const std::string w = "medium.layers[" + std::to_string(i) + "]";
            only_keys(layers[i], {"outer_radius", "coefficients"}, w);
            out.push_back({positive(need(layers[i], "outer_radius", w), w + ".outer_radius"),
                           numbers(need(layers[i], "coefficients", w), w + ".coefficients")});
        }
        return MediumField::radially_stratified(center, std::move(out));
    }
    if (kind == "union_of_balls") {
        only_keys(m, {"kind", "center", "balls"}, "medium");
        const json& balls = need(m, "balls", "medium");
        if (!balls.is_array() || balls.empty()) {
            bad("medium.balls must be a non-empty array");
        }
        std::vector<IndexBall> out;
        for (std::size_t i = 0; i < balls.size(); ++i) {
            const std::string w = "medium.balls[" + std::to_string(i) + "]";
            only_keys(balls[i], {"center", "radius", "n0"}, w);
            out.push_back({vec3(need(balls[i], "center", w), w + ".center"),
                           positive(need(balls[i], "radius", w), w + ".radius"),
                           positive(need(balls[i], "n0", w), w + ".n0")});
        }
        return MediumField::union_of_balls(std::move(out));
    }
    if (kind == "tabulated") {
        only_keys(m, {"kind", "center", "rho", "n"}, "medium");
        return MediumField::tabulated(center, numbers(need(m, "rho", "medium"), "medium.rho"),
                                      numbers(need(m, "n", "medium"), "medium.n"));
    }
    bad("medium.kind must be one of uniform_ball, radially_stratified, union_of_balls, tabulated");
}

std::optional<SimpleDomain> parse_domain(json& d)
{
    const std::string kind = need(d, "kind", "domain").is_string() ? d.at("kind").get<std::string>() : "";
    if (kind == "from_medium") {
        only_keys(d, {"kind"}, "domain");
        return std::nullopt;
    }
    if (kind == "balls") {
        only_keys(d, {"kind", "balls"}, "domain");
        const json& balls = need(d, "balls", "domain");
        if (!balls.is_array() || balls.empty()) {
            bad("domain.balls must be a non-empty array");
        }
        std::vector<Sphere> out;
        for (std::size_t i = 0; i < balls.size(); ++i) {
            const std::string w = "domain.balls[" + std::to_string(i) + "]";
            only_keys(balls[i], {"center", "radius"}, w);
            out.push_back({vec3(need(balls[i], "center", w), w + ".center"),
                           positive(need(balls[i], "radius", w), w + ".radius")});
        }
        return SimpleDomain::balls(std::move(out));
    }
    if (kind == "ellipsoid") {
        only_keys(d, {"kind", "center", "semi_axes"}, "domain");
        return SimpleDomain::ellipsoid(vec3(need(d, "center", "domain"), "domain.center"),
                                       vec3(need(d, "semi_axes", "domain"), "domain.semi_axes"));
    }
    if (kind == "torus") {
        only_keys(d, {"kind", "center", "major", "minor"}, "domain");
        return SimpleDomain::torus(vec3(need(d, "center", "domain"), "domain.center"),
                                   positive(need(d, "major", "domain"), "domain.major"),
                                   positive(need(d, "minor", "domain"), "domain.minor"));
    }
    bad("domain.kind must be one of from_medium, balls, ellipsoid, torus");
}

std::vector<Vec3> parse_directions(json& d)
{
    std::vector<Vec3> out;
    if (d.is_object()) {
        only_keys(d, {"fibonacci"}, "directions");
        const int n = integer(need(d, "fibonacci", "directions"), "directions.fibonacci");
        if (n < 1 || n > 10000) {
            bad("directions.fibonacci must be between 1 and 10000");
        }
        out = fibonacci_directions(n);
    } else if (d.is_array() && !d.empty()) {
        json normalized = json::array();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Vec3 v = vec3(d[i], "directions[" + std::to_string(i) + "]");
            if (!(v.norm() > 1e-12)) {
                bad("directions[" + std::to_string(i) + "] must be nonzero");
            }
            out.push_back(v.normalized());
            normalized.push_back(to_json(out.back()));
        }
        d = normalized;
    } else {
        bad("directions must be a non-empty list of [x, y, z] or {\"fibonacci\": count}");
    }
    return out;
}

void parse_tolerances(json& t, ZeroSearchOptions& s)
{
    only_keys(t, {"zero", "accept", "min_side", "max_depth", "max_multiplicity"}, "tolerances");
    const auto get = [&](const char* key, double fallback) {
        if (!t.contains(key)) {
            t[key] = fallback;
        }
        return positive(t.at(key), std::string("tolerances.") + key);
    };
    s.tol = get("zero", s.tol);
    s.accept_tol = get("accept", s.accept_tol);
    s.min_side = get("min_side", s.min_side);
    if (!t.contains("max_depth")) {
        t["max_depth"] = s.max_depth;
    }
    if (!t.contains("max_multiplicity")) {
        t["max_multiplicity"] = s.max_multiplicity;
    }
    s.max_depth = integer(t.at("max_depth"), "tolerances.max_depth");
    s.max_multiplicity = integer(t.at("max_multiplicity"), "tolerances.max_multiplicity");
    if (s.max_depth < 1 || s.max_depth > 200) {
        bad("tolerances.max_depth must be between 1 and 200");
    }
    if (s.max_multiplicity < 1 || s.max_multiplicity > 8) {
        bad("tolerances.max_multiplicity must be between 1 and 8");
    }
}

void parse_density(json& d, DensitySpec& spec)
{
    only_keys(d, {"sector", "radii", "test_function"}, "density");
    if (!d.contains("sector")) {
        d["sector"] = json::array({spec.alpha, spec.beta});
    }
    const auto sector = numbers(d.at("sector"), "density.sector");
    if (sector.size() != 2 || !(sector[0] < sector[1]) || sector[1] - sector[0] > 2 * std::numbers::pi) {
        bad("density.sector must be [alpha, beta] with alpha < beta <= alpha + 2 pi");
    }
    spec.alpha = sector[0];
    spec.beta = sector[1];
    spec.radii = numbers(need(d, "radii", "density"), "density.radii");
    if (spec.radii.size() < 3) {
        bad("density.radii needs at least three radii");
    }
    for (std::size_t i = 0; i < spec.radii.size(); ++i) {
        if (!(spec.radii[i] > 0.0) || (i > 0 && !(spec.radii[i] > spec.radii[i - 1]))) {
            bad("density.radii must be positive and increasing");
        }
    }
    if (!d.contains("test_function")) {
        d["test_function"] = "";
    }
    if (!d.at("test_function").is_string()) {
        bad("density.test_function must be a string");
    }
    spec.test_function = d.at("test_function").get<std::string>();
    if (!spec.test_function.empty() && spec.test_function != "sin2k") {
        bad("density.test_function must be \"sin2k\" when given");
    }
}

void parse_fit(json& f, FitSpec& spec)
{
    only_keys(f,
              {"family", "radius", "r_split", "init", "lower", "upper", "target_parameters", "max_iterations",
               "mismatch_tol"},
              "fit");
    if (!f.contains("family")) {
        f["family"] = spec.family;
    }
    if (!f.at("family").is_string()) {
        bad("fit.family must be a string");
    }
    spec.family = f.at("family").get<std::string>();
    const int dim = spec.family == "constant" ? 1 : spec.family == "two_layer" ? 2 : 0;
    if (dim == 0) {
        bad("fit.family must be constant or two_layer");
    }
    if (!f.contains("radius")) {
        f["radius"] = spec.radius;
    }
    spec.radius = positive(f.at("radius"), "fit.radius");
    if (dim == 2) {
        if (!f.contains("r_split")) {
            f["r_split"] = 0.5 * spec.radius;
        }
        spec.r_split = positive(f.at("r_split"), "fit.r_split");
        if (!(spec.r_split < spec.radius)) {
            bad("fit.r_split must lie below fit.radius");
        }
    }
    spec.init = numbers(need(f, "init", "fit"), "fit.init");
    spec.lower = numbers(need(f, "lower", "fit"), "fit.lower");
    spec.upper = numbers(need(f, "upper", "fit"), "fit.upper");
    if (static_cast<int>(spec.init.size()) != dim || static_cast<int>(spec.lower.size()) != dim ||
        static_cast<int>(spec.upper.size()) != dim) {
        bad("fit.init, fit.lower and fit.upper need one entry per family parameter");
    }
    for (int i = 0; i < dim; ++i) {
        if (!(spec.lower[i] > 0.0) || !(spec.lower[i] < spec.upper[i]) || spec.init[i] < spec.lower[i] ||
            spec.init[i] > spec.upper[i]) {
            bad("fit bounds infeasible: need 0 < lower < upper and init within the bounds");
        }
    }
    if (f.contains("target_parameters")) {
        const auto t = numbers(f.at("target_parameters"), "fit.target_parameters");
        if (static_cast<int>(t.size()) != dim) {
            bad("fit.target_parameters needs one entry per family parameter");
        }
        for (double x : t) {
            if (!(x > 0.0)) {
                bad("fit.target_parameters must be positive");
            }
        }
        spec.target_parameters = t;
    }
    if (!f.contains("max_iterations")) {
        f["max_iterations"] = spec.options.max_iterations;
    }
    if (!f.contains("mismatch_tol")) {
        f["mismatch_tol"] = spec.options.mismatch_tol;
    }
    spec.options.max_iterations = integer(f.at("max_iterations"), "fit.max_iterations");
    if (spec.options.max_iterations < 1) {
        bad("fit.max_iterations must be at least 1");
    }
    spec.options.mismatch_tol = positive(f.at("mismatch_tol"), "fit.mismatch_tol");
}

void parse_field(json& f, FieldSpec& spec)
{
    only_keys(f, {"k", "l", "a", "b", "samples", "r_max"}, "field");
    spec.k = complex_value(need(f, "k", "field"), "field.k");
    if (!(std::abs(spec.k) > 0.0)) {
        bad("field.k must be nonzero");
    }
    if (!f.contains("l")) {
        f["l"] = spec.l;
    }
    spec.l = integer(f.at("l"), "field.l");
    if (spec.l < 0) {
        bad("field.l must be nonnegative");
    }
    if (!f.contains("a")) {
        f["a"] = json::array({1.0, 0.0});
    }
    spec.a = complex_value(f.at("a"), "field.a");
    if (!f.contains("b")) {
        f["b"] = json::array({1.0, 0.0});
    }
    if (f.at("b").is_string()) {
        if (f.at("b").get<std::string>() != "match") {
            bad("field.b must be [re, im] or \"match\"");
        }
        spec.b.reset();
    } else {
        spec.b = complex_value(f.at("b"), "field.b");
    }
    if (!f.contains("samples")) {
        f["samples"] = spec.samples;
    }
    spec.samples = integer(f.at("samples"), "field.samples");
    if (spec.samples < 2 || spec.samples > 1000000) {
        bad("field.samples must be between 2 and 1e6");
    }
    if (!f.contains("r_max")) {
        f["r_max"] = 0.0;
    }
    spec.r_max = number(f.at("r_max"), "field.r_max");
    if (spec.r_max < 0.0) {
        bad("field.r_max must be nonnegative");
    }
}

} // namespace

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<Vec3> fibonacci_directions(int count)
{
    if (count < 1) {
        throw InvalidInput("fibonacci_directions: need a positive count");
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> out;
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        out.emplace_back(s * std::cos(golden * i), s * std::sin(golden * i), z);
        out.back().normalize();
    }
    return out;
}

RunConfig load_config(const std::string& command, const std::string& text, const Overrides& overrides)
{
    static const std::set<std::string> commands{"eig", "density", "tunnel", "fit", "field"};
    if (!commands.contains(command)) {
        bad("unknown command \"" + command + "\"");
    }
    RunConfig cfg;
    cfg.command = command;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    try {
        only_keys(j,
                  {"medium", "domain", "directions", "l_range", "rectangle", "tolerances", "output", "density", "fit",
                   "field"},
                  "top level");
        if (!j.contains("medium") || !j.at("medium").is_object()) {
            bad("\"medium\" must be an object");
        }
        cfg.medium = parse_medium(j["medium"]);
        if (!j.contains("domain")) {
            j["domain"] = {{"kind", "from_medium"}};
        }
        cfg.domain = parse_domain(j["domain"]);
        if (!j.contains("directions")) {
            j["directions"] = json::array({json::array({1.0, 0.0, 0.0})});
        }
        cfg.directions = parse_directions(j["directions"]);

        if (!j.contains("l_range")) {
            j["l_range"] = json::array({0, 0});
        }
        const json& lr = j.at("l_range");
        if (!lr.is_array() || lr.size() != 2) {
            bad("l_range must be [l_min, l_max]");
        }
        cfg.l_min = integer(lr[0], "l_range[0]");
        cfg.l_max = integer(lr[1], "l_range[1]");
        if (cfg.l_min < 0 || cfg.l_max < cfg.l_min || cfg.l_max > AngularOrder::default_max) {
            bad("l_range must satisfy 0 <= l_min <= l_max <= " + std::to_string(AngularOrder::default_max));
        }

        if (j.contains("rectangle")) {
            const auto r = numbers(j.at("rectangle"), "rectangle");
            if (r.size() != 4 || !(r[0] < r[1]) || !(r[2] < r[3])) {
                bad("rectangle must be [re_min, re_max, im_min, im_max] with min < max");
            }
            cfg.rect = SearchRectangle(r[0], r[1], r[2], r[3]);
        } else if (command == "eig" || command == "tunnel" || command == "fit") {
            bad("the " + command + " command needs \"rectangle\"");
        }

        if (!j.contains("tolerances")) {
            j["tolerances"] = json::object();
        }
        parse_tolerances(j["tolerances"], cfg.search);

        if (!j.contains("output")) {
            j["output"] = json::object();
        }
        only_keys(j.at("output"), {"dir"}, "output");
        if (overrides.out_dir) {
            j["output"]["dir"] = *overrides.out_dir;
        }
        if (!j["output"].contains("dir")) {
            j["output"]["dir"] = cfg.out_dir;
        }
        if (!j["output"]["dir"].is_string() || j["output"]["dir"].get<std::string>().empty()) {
            bad("output.dir must be a non-empty string");
        }
        cfg.out_dir = j["output"]["dir"].get<std::string>();

        if ((command == "density" || command == "fit" || command == "field") && !j.contains(command)) {
            bad("the " + command + " command needs \"" + command + "\"");
        }
        if (command == "density") {
            parse_density(j["density"], cfg.density);
        }
        if (command == "fit") {
            parse_fit(j["fit"], cfg.fit);
        }
        if (command == "field") {
            parse_field(j["field"], cfg.field);
        }
    } catch (const json::exception& e) {
        bad(e.what());
    }

    cfg.search.seed = overrides.seed.value_or(0);
    cfg.search.threads = overrides.threads.value_or(1);
    if (cfg.search.threads < 1) {
        bad("--threads must be at least 1");
    }
    cfg.fit.options.search = cfg.search;
    // the hash covers the computation, not where its output lands
    json hashed = j;
    hashed.erase("output");
    hashed["command"] = command;
    hashed["seed"] = cfg.search.seed;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(hashed.dump())));
    cfg.hash = buf;
    cfg.resolved = std::move(j);
    return cfg;
}

} // namespace itep::cli
