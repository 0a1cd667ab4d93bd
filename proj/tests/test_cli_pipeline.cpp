#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>

#include "nilcyl/cli_pipeline.hpp"
#include "nilcyl/curves.hpp"

using namespace nilcyl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "nilcyl_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int count_prefix(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0 ? 1 : 0;
    return n;
}

JobConfig small_surface(const std::string& preset, const fs::path& dir) {
    return parse_config(json{{"mode", "nil_surface"},
                             {"potential", preset},
                             {"grid", {{"x_samples", 33}, {"y_min", -0.2}, {"y_max", 0.2}, {"y_samples", 5}}},
                             {"outputs", {{"dir", dir.string()}}}});
}

}  // namespace

TEST_CASE("config defaults and validation") {
    const auto c = parse_config(json{{"potential", "twisted_circle"}});
    CHECK(c.mode == JobMode::curve_report);
    CHECK(c.n == 1);
    CHECK(c.order == 48);
    CHECK(c.rk_steps_per_period == 2048);
    CHECK(c.theta == 0.0);
    CHECK(c.tol.closing == 1e-8);
    CHECK(c.tol.iwasawa == 1e-8);
    CHECK(c.tol.closure == 1e-5);
    CHECK(c.grid.x_samples == 256);
    CHECK(c.grid.y_samples == 33);

    CHECK_THROWS_AS(parse_config(json{{"potential", "twisted_circle"}, {"n", 0}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"potential", "twisted_circle"}, {"N", 3}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"potential", "twisted_circle"}, {"cover", 2}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"potential", "no_such_preset"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"potential", "twisted_circle"}, {"n", "two"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"mode", "render"}, {"potential", "twisted_circle"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"mode", "curve_report"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"mode", "inverse_design"}}), ConfigError);
    CHECK_THROWS_AS(
        parse_config(json{{"potential", "twisted_circle"}, {"grid", {{"y_min", 1.0}, {"y_max", 0.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"potential", {{"custom", {{"h", json::array({1.0, 2.0})}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/job.json"), ConfigError);
}

TEST_CASE("config echo parses back to the same job") {
    const json in{{"mode", "cmc_surface"},
                  {"potential", {{"custom", {{"period", 3.0}, {"h", json::array({json::array({0.5, -1.0})})}}}}},
                  {"n", 2},
                  {"N", 20},
                  {"lambda", 0.3},
                  {"grid", {{"x_samples", 17}, {"y_min", -0.1}, {"y_max", 0.1}, {"y_samples", 3}}},
                  {"tolerances", {{"closure", 1e-6}}}};
    const auto c = parse_config(in);
    const json echo = config_to_json(c);
    CHECK(config_to_json(parse_config(echo)) == echo);
    CHECK(echo["potential"]["custom"]["period"] == 3.0);
    CHECK(echo["tolerances"]["closure"] == 1e-6);
}

TEST_CASE("obj export of a 2x2 grid") {
    const fs::path dir = scratch("obj");
    SurfaceMesh m;
    m.rows = 2;
    m.cols = 2;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0.5}};
    m.valid.assign(4, 1);
    m.degeneracy.assign(4, 1.0);
    assign_faces(m);
    export_obj(dir / "a.obj", m);
    const std::string text = slurp(dir / "a.obj");
    CHECK(count_prefix(text, "v ") == 4);
    CHECK(count_prefix(text, "f ") == 1);
    CHECK(text.find("f 1 2 4 3\n") != std::string::npos);

    m.valid[3] = 0;
    assign_faces(m);
    export_obj(dir / "b.obj", m);
    CHECK(count_prefix(slurp(dir / "b.obj"), "f ") == 0);
    CHECK_THROWS_AS(export_obj(dir / "missing" / "c.obj", m), IoError);
}

TEST_CASE("zero potential report") {
    const fs::path dir = scratch("zero");
    auto c = parse_config(json{{"potential", {{"custom", {{"h", json::array({0.0})}}}}},
                               {"N", 16},
                               {"outputs", {{"dir", dir.string()}}}});
    const auto r = run(c);
    REQUIRE(r.exit_code == 0);
    const json rep = read_json(dir / "report.json");
    for (const char* k : {"monodromy_residual_at_1", "second_residual_abs", "third_lhs", "third_rhs", "area_ell",
                          "area_m", "X_offdiag_norm", "Y_diag_norm", "dual_X_residual", "dual_Y_residual"}) {
        CAPTURE(k);
        CHECK(rep[k].get<double>() == 0.0);
    }
    CHECK(rep["all_pass"] == true);
}

TEST_CASE("curve reports of presets") {
    SUBCASE("lemniscate") {
        const fs::path dir = scratch("lem");
        const auto r = run(parse_config(json{{"potential", "identity_lemniscate"}, {"outputs", {{"dir", dir.string()}}}}));
        REQUIRE(r.exit_code == 0);
        const json rep = read_json(dir / "report.json");
        CHECK(rep["second_residual_abs"].get<double>() < 1e-12);
        CHECK(std::abs(rep["area_ell"].get<double>()) < 1e-12);
        CHECK(rep["area_m"].get<double>() == 0.0);
        CHECK(rep["all_pass"] == true);
        CHECK(fs::exists(dir / "curves.csv"));
        CHECK_FALSE(fs::exists(dir / "mesh.obj"));
    }
    SUBCASE("twisted circle") {
        const fs::path dir = scratch("tw");
        const auto r = run(parse_config(json{{"potential", "twisted_circle"}, {"outputs", {{"dir", dir.string()}}}}));
        REQUIRE(r.exit_code == 0);
        const json rep = read_json(dir / "report.json");
        CHECK(rep["area_ell"].get<double>() == doctest::Approx(-4.04556).epsilon(1e-5));
        CHECK(rep["area_m"].get<double>() == doctest::Approx(-4.04556).epsilon(1e-5));
        const std::string csv = slurp(dir / "curves.csv");
        CHECK(csv.rfind("t,re_ell,im_ell,re_m,im_m,re_alpha,im_alpha\n", 0) == 0);
        CHECK(count_prefix(csv, "") == 257);
    }
}

TEST_CASE("csv round trip through inverse design") {
    const fs::path dir = scratch("round");
    REQUIRE(run(parse_config(json{{"potential", "twisted_circle"}, {"outputs", {{"dir", (dir / "a").string()}}}}))
                .exit_code == 0);
    const fs::path csv = dir / "a" / "curves.csv";
    const auto ell = read_curve_csv(csv, "ell");
    const auto m = read_curve_csv(csv, "m");
    CHECK(ell.values.size() == 256);
    const double p = 2.0 * std::numbers::pi;
    const double t_area = twisted_circle_area();
    CHECK(signed_area(curve_from_samples(ell.values, p)) == doctest::Approx(t_area).epsilon(1e-9));
    CHECK(signed_area(curve_from_samples(m.values, p)) == doctest::Approx(t_area).epsilon(1e-9));

    const auto r = run(parse_config(json{{"mode", "inverse_design"},
                                         {"curves", {{"ell", csv.string()}, {"m", csv.string()}}},
                                         {"N", 24},
                                         {"grid", {{"x_samples", 17}, {"y_min", 0.0}, {"y_max", 0.0}, {"y_samples", 1}}},
                                         {"outputs", {{"dir", (dir / "b").string()}}}}));
    REQUIRE(r.exit_code == 0);
    const json rep = read_json(dir / "b" / "report.json");
    const json first = read_json(dir / "a" / "report.json");
    CHECK(std::abs(rep["design_area_ell"].get<double>() - first["area_ell"].get<double>()) < 1e-9);
    CHECK(std::abs(rep["design_area_m"].get<double>() - first["area_m"].get<double>()) < 1e-9);
    CHECK(std::abs(rep["area_ell"].get<double>() - first["area_ell"].get<double>()) < 1e-9);
    CHECK(std::abs(rep["area_m"].get<double>() - first["area_m"].get<double>()) < 1e-9);

    // Unequal areas are a config error.
    const auto bad = run(parse_config(json{{"mode", "inverse_design"},
                                           {"curves", {{"ell", csv.string()}, {"m", (dir / "nope.csv").string()}}},
                                           {"outputs", {{"dir", (dir / "c").string()}}}}));
    CHECK(bad.exit_code == 2);
}

TEST_CASE("curve csv ingest") {
    const fs::path dir = scratch("ingest");
    {
        std::ofstream out(dir / "plain.csv");
        out << "t,re,im\n";
        for (int j = 0; j < 8; ++j) out << j * 0.25 << ',' << std::cos(j * 0.25 * std::numbers::pi) << ",0\n";
    }
    const auto s = read_curve_csv(dir / "plain.csv", "ell");
    CHECK(s.values.size() == 8);
    CHECK(s.t[1] == 0.25);
    {
        std::ofstream out(dir / "bad.csv");
        out << "x,y\n1,2\n";
    }
    CHECK_THROWS_AS(read_curve_csv(dir / "bad.csv", "ell"), IoError);
    CHECK_THROWS_AS(read_curve_csv(dir / "none.csv", "ell"), IoError);
}

TEST_CASE("diagonal nil surface closes") {
    const fs::path dir = scratch("diag");
    const auto r = run(small_surface("diagonal_c1_quartic", dir));
    REQUIRE(r.exit_code == 0);
    const json rep = read_json(dir / "report.json");
    CHECK(rep["closure_residual"].get<double>() < 1e-5);
    CHECK(rep["surface_label"] == "cylinder");
    CHECK(rep["valid_columns"] == 33);
    const std::string obj = slurp(dir / "mesh.obj");
    CHECK(count_prefix(obj, "v ") == 33 * 5);
    CHECK(count_prefix(obj, "f ") == rep["mesh_faces"].get<int>());
}

TEST_CASE("identical configs give identical bytes") {
    const fs::path dir = scratch("det");
    const auto c = small_surface("twisted_circle", dir);
    REQUIRE(run(c).exit_code == 0);
    const std::string a = slurp(dir / "mesh.obj") + slurp(dir / "curves.csv") + slurp(dir / "report.json");
    REQUIRE(run(c).exit_code == 0);
    const std::string b = slurp(dir / "mesh.obj") + slurp(dir / "curves.csv") + slurp(dir / "report.json");
    CHECK(a == b);
}

TEST_CASE("failing closing conditions still emit a surface") {
    const fs::path dir = scratch("open");
    // h = 1 has int alpha = 2 p != 0.
    auto c = parse_config(json{{"mode", "nil_surface"},
                               {"potential", {{"custom", {{"h", json::array({1.0})}}}}},
                               {"N", 16},
                               {"grid", {{"x_samples", 9}, {"y_min", 0.0}, {"y_max", 0.0}, {"y_samples", 1}}},
                               {"outputs", {{"dir", dir.string()}}}});
    const auto r = run(c);
    CHECK(r.exit_code == 0);
    REQUIRE_FALSE(r.warnings.empty());
    CHECK(r.warnings[0].find("frame-periodic only") != std::string::npos);
    CHECK(read_json(dir / "report.json")["surface_label"] == "frame-periodic only");
    CHECK(fs::exists(dir / "mesh.obj"));
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    {
        std::ofstream out(dir / "file");
        out << "x";
    }
    auto c = parse_config(json{{"potential", "twisted_circle"}, {"outputs", {{"dir", (dir / "file").string()}}}});
    CHECK(run(c).exit_code == 2);

    // A potential large enough to overflow every column.
    auto big = parse_config(json{{"mode", "nil_surface"},
                                 {"potential", {{"custom", {{"h", json::array({1e200})}}}}},
                                 {"N", 8},
                                 {"rk_steps_per_period", 16},
                                 {"grid", {{"x_samples", 5}, {"y_min", 0.0}, {"y_max", 0.0}, {"y_samples", 1}}},
                                 {"outputs", {{"dir", (dir / "big").string()}}}});
    const auto r = run(big);
    CHECK(r.exit_code == 3);
    CHECK(fs::exists(dir / "big" / "report.json"));
}
