#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "itep/cli.hpp"

namespace fs = std::filesystem;
using itep::cli::json;
using std::numbers::pi;

namespace {

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("itep_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Writes the config, runs the executable, returns its exit code.
int run_itep(const std::string& command, const std::string& name, const std::string& config, const std::string& extra = "")
{
    const fs::path cfg = scratch() / (name + ".json");
    std::ofstream(cfg, std::ios::binary) << config;
    const std::string cmd = std::string(ITEP_CLI_PATH) + " " + command + " --config " + cfg.string() + " --out-dir " +
                            (scratch() / name).string() + " " + extra + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv(const std::string& name, const std::string& file)
{
    std::istringstream in(slurp(scratch() / name / file));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

json summary(const std::string& name)
{
    return json::parse(slurp(scratch() / name / "summary.json"));
}

const std::string ball4 = R"("medium": {"kind": "uniform_ball", "radius": 1.0, "n0": 4.0})";
const std::string two_balls = R"(
    "medium": {"kind": "union_of_balls", "balls": [{"center": [2, 0, 0], "radius": 1, "n0": 2.25},
                                                   {"center": [5, 0, 0], "radius": 1, "n0": 2.25}]},
    "domain": {"kind": "balls", "balls": [{"center": [2, 0, 0], "radius": 1}, {"center": [5, 0, 0], "radius": 1}]})";

} // namespace

TEST_CASE("fnv1a and fibonacci directions")
{
    CHECK(itep::cli::fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(itep::cli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
    const auto dirs = itep::cli::fibonacci_directions(50);
    REQUIRE(dirs.size() == 50);
    itep::Vec3 sum = itep::Vec3::Zero();
    for (const auto& d : dirs) {
        CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-14));
        sum += d;
    }
    // nearly uniform on the sphere
    CHECK(sum.norm() / 50.0 < 0.05);
}

TEST_CASE("config errors exit with 2 and write nothing")
{
    CHECK(run_itep("eig", "malformed", "{\"medium\": ") == 2);
    CHECK_FALSE(fs::exists(scratch() / "malformed"));
    CHECK(run_itep("eig", "bad_kind", R"({"medium": {"kind": "cube"}, "rectangle": [0.5, 2, -1, 1]})") == 2);
    CHECK(run_itep("eig", "no_rect", "{" + ball4 + "}") == 2);
    CHECK(run_itep("eig", "unknown_key", "{" + ball4 + R"(, "rectangle": [0.5, 2, -1, 1], "colour": 1})") == 2);
    CHECK(run_itep("eig", "flipped", "{" + ball4 + R"(, "rectangle": [2, 0.5, -1, 1]})") == 2);
    CHECK(run_itep("eig", "l_range", "{" + ball4 + R"(, "rectangle": [0.5, 2, -1, 1], "l_range": [2, 1]})") == 2);
    CHECK(run_itep("eig", "zero_dir", "{" + ball4 + R"(, "rectangle": [0.5, 2, -1, 1], "directions": [[0, 0, 0]]})") == 2);
    CHECK_FALSE(fs::exists(scratch() / "bad_kind"));
    const int usage = std::system((std::string(ITEP_CLI_PATH) + " eig >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(usage) == 2);
}

TEST_CASE("eig: unit ball n0 = 4 gives the triple zeros at multiples of pi")
{
    REQUIRE(run_itep("eig", "eig_ball", "{" + ball4 + R"(, "rectangle": [0.5, 10.0, -1.0, 1.0]})") == 0);
    const auto rows = csv("eig_ball", "eigenvalues_d0.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"l", "re_k", "im_k", "multiplicity", "residual", "verdict",
                                              "interface_residual_max"});
    for (int m = 1; m <= 3; ++m) {
        const auto& r = rows[m];
        CHECK(std::abs(std::stod(r[1]) - m * pi) < 1e-8);
        CHECK(std::abs(std::stod(r[2])) < 1e-8);
        CHECK(r[3] == "3");
        CHECK(r[5] == "propagates");
        CHECK(std::stod(r[6]) < 1e-7);
    }
    const json s = summary("eig_ball");
    CHECK(s["config"]["medium"]["n0"] == 4.0);
    CHECK(s["config_hash"].get<std::string>().size() == 16);
    CHECK(s["warnings"].empty());
}

TEST_CASE("eig: n = 1 gives an empty table and a degenerate warning")
{
    REQUIRE(run_itep("eig", "eig_free", R"({"medium": {"kind": "uniform_ball", "radius": 1.0, "n0": 1.0},
                                       "rectangle": [0.5, 10.0, -1.0, 1.0], "l_range": [0, 1]})") == 0);
    CHECK(csv("eig_free", "eigenvalues_d0.csv").size() == 1);
    const json s = summary("eig_free");
    REQUIRE(s["warnings"].size() == 2);
    CHECK(s["warnings"][0].get<std::string>().starts_with("degenerate"));
}

TEST_CASE("eig output is byte-identical across runs and uses LF line endings")
{
    const std::string cfg = R"({"medium": {"kind": "uniform_ball", "radius": 1.0, "n0": 4.41},
                                "directions": {"fibonacci": 2}, "l_range": [0, 1],
                                "rectangle": [0.5, 8.0, -2.0, 2.0]})";
    REQUIRE(run_itep("eig", "det_a", cfg, "--seed 11") == 0);
    REQUIRE(run_itep("eig", "det_b", cfg, "--seed 11 --threads 2") == 0);
    for (const char* f : {"eigenvalues_d0.csv", "eigenvalues_d1.csv"}) {
        const std::string a = slurp(scratch() / "det_a" / f);
        CHECK(a == slurp(scratch() / "det_b" / f));
        CHECK(a.find('\r') == std::string::npos);
        CHECK(a.size() > 100);
    }
    CHECK(summary("det_a")["config_hash"] == summary("det_b")["config_hash"]);

    REQUIRE(run_itep("eig", "det_c", cfg, "--seed 12") == 0);
    CHECK(summary("det_a")["config_hash"] != summary("det_c")["config_hash"]);
}

TEST_CASE("density command")
{
    REQUIRE(run_itep("density", "dens_sin",
                 "{" + ball4 + R"(, "density": {"radii": [10, 20, 30, 40], "test_function": "sin2k"}})") == 0);
    auto rows = csv("dens_sin", "density_sin2k.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"R", "N", "theoretical", "estimate", "deviation"});
    CHECK(std::stod(rows.back()[4]) < 0.02);

    // radii halfway between the triple zeros at m pi
    REQUIRE(run_itep("density", "dens_ball",
                 "{" + ball4 + R"(, "density": {"radii": [10.995574287564276, 20.420352248333657,
                                                         29.845130209103033, 39.269908169872416]}})") == 0);
    rows = csv("dens_ball", "density_d0_l0.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[4][1] == "36");
    CHECK(std::stod(rows[4][2]) == doctest::Approx(3.0 / pi).epsilon(1e-12));
    CHECK(std::stod(rows.back()[4]) < 0.05);

    CHECK(run_itep("density", "dens_short", "{" + ball4 + R"(, "density": {"radii": [10, 20]}})") == 2);
    CHECK_FALSE(fs::exists(scratch() / "dens_short"));
}

TEST_CASE("tunnel command")
{
    REQUIRE(run_itep("tunnel", "tun_two",
                 "{" + two_balls + R"(, "directions": [[1, 0, 0], [0, 1, 0]], "rectangle": [0.5, 7.0, -1.0, 1.0]})") ==
            0);
    const auto rows = csv("tun_two", "tunnel_d0.csv");
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == std::vector<std::string>{"l", "re_k", "im_k", "verdict", "r1", "r2", "r3", "r4"});
    int propagating = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 8);
        if (rows[i][3] == "propagates") {
            ++propagating;
            for (std::size_t j = 4; j < 8; ++j) {
                CHECK(std::stod(rows[i][j]) < 1e-7);
            }
        }
    }
    CHECK(propagating == 2);
    // the y axis misses both balls
    CHECK(csv("tun_two", "tunnel_d1.csv").size() == 1);
    const json s = summary("tun_two");
    CHECK(s["directions"][1]["note"].get<std::string>().starts_with("no intersections"));

    REQUIRE(run_itep("tunnel", "tun_one", "{" + ball4 + R"(, "rectangle": [0.5, 7.0, -1.0, 1.0]})") == 0);
    const auto one = csv("tun_one", "tunnel_d0.csv");
    REQUIRE(one.size() == 3);
    CHECK(one[0].size() == 5);
}

TEST_CASE("fit command")
{
    const std::string medium = R"("medium": {"kind": "uniform_ball", "radius": 1.0, "n0": 2.25},
                                  "rectangle": [0.5, 12.0, -2.0, 2.0])";
    REQUIRE(run_itep("fit", "fit_trip",
                 "{" + medium + R"(, "fit": {"family": "constant", "init": [3.0], "lower": [1.2], "upper": [8.0]}})") ==
            0);
    const json r = json::parse(slurp(scratch() / "fit_trip" / "fit.json"));
    CHECK(r["converged"] == true);
    CHECK(std::abs(r["parameters"][0].get<double>() - 2.25) < 1e-4);

    REQUIRE(run_itep("fit", "fit_exact",
                 "{" + medium + R"(, "fit": {"init": [2.25], "lower": [1.2], "upper": [8.0]}})") == 0);
    const json e = json::parse(slurp(scratch() / "fit_exact" / "fit.json"));
    CHECK(e["iterations"].get<int>() <= 2);
    CHECK(e["mismatch"].get<double>() < 1e-10);

    CHECK(run_itep("fit", "fit_bounds", "{" + medium + R"(, "fit": {"init": [3.0], "lower": [5.0], "upper": [8.0]}})") ==
          2);
    CHECK_FALSE(fs::exists(scratch() / "fit_bounds"));

    CHECK(run_itep("fit", "fit_short",
               "{" + medium + R"(, "fit": {"init": [3.0], "lower": [1.2], "upper": [8.0], "max_iterations": 1}})") ==
          4);
    CHECK(json::parse(slurp(scratch() / "fit_short" / "fit.json"))["converged"] == false);
}

TEST_CASE("field command")
{
    REQUIRE(run_itep("field", "field_free", R"({"medium": {"kind": "uniform_ball", "radius": 1.0, "n0": 1.0},
                                           "field": {"k": [3.7, 0.4], "l": 2, "samples": 60}})") == 0);
    auto rows = csv("field_free", "field_d0.csv");
    REQUIRE(rows.size() == 61);
    CHECK(rows[0] == std::vector<std::string>{"r", "re_v", "im_v", "re_w", "im_w", "mismatch"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][1]) - std::stod(rows[i][3])) < 1e-9);
        CHECK(std::abs(std::stod(rows[i][2]) - std::stod(rows[i][4])) < 1e-9);
    }

    // pi is a zero of D_0 for n0 = 4: v and w share Cauchy data at r = 1 and agree beyond
    REQUIRE(run_itep("field", "field_eig",
                 "{" + ball4 + R"(, "field": {"k": [3.141592653589793, 0], "b": "match", "samples": 40}})") == 0);
    rows = csv("field_eig", "field_d0.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::stod(rows[i][0]) >= 1.0) {
            CHECK(std::stod(rows[i][5]) < 1e-6);
        }
    }
    REQUIRE(run_itep("field", "field_off", "{" + ball4 + R"(, "field": {"k": [3.5, 0], "b": "match"}})") == 0);
    const json s = summary("field_off");
    CHECK(s["directions"][0]["interface_mismatch"][0]["r"] == 1.0);
    CHECK(s["directions"][0]["interface_mismatch"][0]["mismatch"].get<double>() > 1e-3);
}
