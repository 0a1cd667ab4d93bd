#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nilcyl/cli_pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Minimal cylinders in Nil3 and spacelike CMC cylinders in L3 from periodic potentials"};
    std::string mode, config_path, out_dir;
    double theta = 0.0;
    int n_modes = 0;
    app.add_option("mode", mode, "curve_report, nil_surface, cmc_surface or inverse_design")->required();
    app.add_option("--config", config_path, "JSON job file")->required();
    auto* lam = app.add_option("--lambda", theta, "spectral angle theta, lambda = exp(i theta)");
    auto* nm = app.add_option("--n-modes", n_modes, "Laurent truncation order N");
    auto* od = app.add_option("--out", out_dir, "output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    nilcyl::JobConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) throw nilcyl::ConfigError("cannot read config " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw nilcyl::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw nilcyl::ConfigError("config must be a JSON object");
        j["mode"] = mode;
        if (*lam) j["lambda"] = theta;
        if (*nm) j["N"] = n_modes;
        if (*od) j["outputs"]["dir"] = out_dir;
        config = nilcyl::parse_config(j, std::filesystem::path(config_path).parent_path());
    } catch (const nilcyl::Error& e) {
        std::cerr << "nilcyl: " << e.what() << '\n';
        return 2;
    }

    const auto r = nilcyl::run(config);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (!r.error.empty()) std::cerr << "nilcyl: " << r.error << '\n';
    for (const auto& p : r.written) std::cout << p.string() << '\n';
    return r.exit_code;
}
