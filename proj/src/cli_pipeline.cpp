#include "nilcyl/cli_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nilcyl/curves.hpp"
#include "nilcyl/inverse_design.hpp"
#include "nilcyl/iwasawa.hpp"

namespace nilcyl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

double finite_number(const json& j, const char* key, double fallback) {
    const double v = get_or(j, key, fallback);
    if (!std::isfinite(v)) throw ConfigError(std::string(key) + " must be finite");
    return v;
}

double positive(const json& j, const char* key, double fallback) {
    const double v = finite_number(j, key, fallback);
    if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    return v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path q(p);
    return fs::absolute(q.is_absolute() || base.empty() ? q : base / q).lexically_normal();
}

cplx parse_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("coefficient must be a number or [re, im]");
}

SeriesSource parse_series(const json& j, const fs::path& base, const std::string& name) {
    SeriesSource s;
    if (j.is_array()) {
        for (const auto& v : j) s.coefficients.push_back(parse_complex(v));
    } else if (j.is_object()) {
        check_keys(j, {"coefficients", "samples_file"}, name);
        if (j.contains("samples_file")) {
            s.samples_file = resolve(base, j.at("samples_file").get<std::string>());
        } else if (j.contains("coefficients")) {
            for (const auto& v : j.at("coefficients")) s.coefficients.push_back(parse_complex(v));
        }
    } else {
        throw ConfigError(name + " must be a coefficient list or an object");
    }
    if (!s.from_file() && s.coefficients.size() % 2 == 0)
        throw ConfigError(name + " needs an odd number 2K+1 of coefficients c_{-K}..c_K");
    return s;
}

json series_json(const SeriesSource& s) {
    if (s.from_file()) return json{{"samples_file", s.samples_file.string()}};
    json a = json::array();
    for (cplx c : s.coefficients) a.push_back({c.real(), c.imag()});
    return json{{"coefficients", a}};
}

std::vector<cplx> read_sample_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<cplx> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> cols;
        double x;
        while (ss >> x) cols.push_back(x);
        if (!ss.eof() || cols.size() < 2) {
            if (out.empty()) continue;  // header
            throw IoError("malformed sample line in " + path.string() + ": " + line);
        }
        out.emplace_back(cols[cols.size() - 2], cols.back());
    }
    if (out.size() < 4) throw IoError(path.string() + " needs at least 4 samples");
    return out;
}

PeriodicFunction build_series(const SeriesSource& s, double period) {
    if (s.from_file()) return from_samples(read_sample_file(s.samples_file), period);
    return PeriodicFunction(period, s.coefficients);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string to_string(JobMode mode) {
    switch (mode) {
        case JobMode::curve_report: return "curve_report";
        case JobMode::nil_surface: return "nil_surface";
        case JobMode::cmc_surface: return "cmc_surface";
        case JobMode::inverse_design: return "inverse_design";
    }
    return "";
}

JobMode parse_mode(const std::string& s) {
    for (JobMode m : {JobMode::curve_report, JobMode::nil_surface, JobMode::cmc_surface, JobMode::inverse_design})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown mode: " + s);
}

JobConfig parse_config(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    JobConfig c;
    try {
        check_keys(j,
                   {"mode", "potential", "curves", "n", "N", "rk_steps_per_period", "rk_steps_per_unit_y",
                    "curve_samples", "grid", "lambda", "tolerances", "outputs"},
                   "config");
        if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());

        if (j.contains("potential")) {
            const json& p = j.at("potential");
            if (p.is_string()) {
                c.preset = p.get<std::string>();
            } else if (p.is_object() && p.contains("preset")) {
                check_keys(p, {"preset"}, "potential");
                c.preset = p.at("preset").get<std::string>();
            } else if (p.is_object()) {
                const json& q = p.contains("custom") ? p.at("custom") : p;
                check_keys(q, {"period", "multiple", "a0", "b0", "h"}, "custom potential");
                c.custom.period = positive(q, "period", c.custom.period);
                c.custom.multiple = get_or(q, "multiple", 1);
                if (c.custom.multiple != 1 && c.custom.multiple != 2) throw ConfigError("multiple must be 1 or 2");
                if (!q.contains("h")) throw ConfigError("custom potential needs h");
                c.custom.h = parse_series(q.at("h"), base, "h");
                if ((c.custom.has_a0 = q.contains("a0"))) c.custom.a0 = parse_series(q.at("a0"), base, "a0");
                if ((c.custom.has_b0 = q.contains("b0"))) c.custom.b0 = parse_series(q.at("b0"), base, "b0");
            } else {
                throw ConfigError("potential must be a preset name or an object");
            }
            if (!c.preset.empty()) {
                const auto names = preset_names();
                if (std::find(names.begin(), names.end(), c.preset) == names.end())
                    throw ConfigError("unknown preset: " + c.preset);
            }
        } else if (c.mode != JobMode::inverse_design) {
            throw ConfigError("config needs a potential");
        }

        if (j.contains("curves")) {
            const json& q = j.at("curves");
            check_keys(q, {"ell", "m", "period", "phase_winding", "area_tol"}, "curves");
            c.curves.ell = resolve(base, q.at("ell").get<std::string>());
            c.curves.m = resolve(base, q.at("m").get<std::string>());
            c.curves.period = get_or(q, "period", 0.0);
            if (!(c.curves.period >= 0.0) || !std::isfinite(c.curves.period))
                throw ConfigError("curves.period must be non-negative");
            c.curves.phase_winding = get_or(q, "phase_winding", 0);
            c.curves.area_tol = positive(q, "area_tol", c.curves.area_tol);
        } else if (c.mode == JobMode::inverse_design) {
            throw ConfigError("inverse_design needs curves.ell and curves.m");
        }

        c.n = get_or(j, "n", c.n);
        if (c.n < 1) throw ConfigError("n must be at least 1");
        c.order = get_or(j, "N", c.order);
        if (c.order < 4) throw ConfigError("N must be at least 4");
        c.rk_steps_per_period = get_or(j, "rk_steps_per_period", c.rk_steps_per_period);
        if (c.rk_steps_per_period < 4) throw ConfigError("rk_steps_per_period must be at least 4");
        c.rk_steps_per_unit_y = get_or(j, "rk_steps_per_unit_y", c.rk_steps_per_unit_y);
        if (c.rk_steps_per_unit_y < 1) throw ConfigError("rk_steps_per_unit_y must be positive");
        c.curve_samples = get_or(j, "curve_samples", c.curve_samples);
        if (c.curve_samples < 4) throw ConfigError("curve_samples must be at least 4");

        if (j.contains("grid")) {
            const json& g = j.at("grid");
            check_keys(g, {"x_samples", "y_min", "y_max", "y_samples"}, "grid");
            c.grid.x_samples = get_or(g, "x_samples", c.grid.x_samples);
            c.grid.y_min = finite_number(g, "y_min", c.grid.y_min);
            c.grid.y_max = finite_number(g, "y_max", c.grid.y_max);
            c.grid.y_samples = get_or(g, "y_samples", c.grid.y_samples);
        }
        if (c.grid.x_samples < 2) throw ConfigError("grid.x_samples must be at least 2");
        if (c.grid.y_samples < 1) throw ConfigError("grid.y_samples must be positive");
        if (c.grid.y_min > c.grid.y_max) throw ConfigError("grid.y_min exceeds grid.y_max");
        if (c.grid.y_samples == 1 && c.grid.y_min != c.grid.y_max)
            throw ConfigError("a single grid row needs y_min == y_max");
        c.theta = finite_number(j, "lambda", c.theta);

        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            check_keys(t, {"closing", "iwasawa", "closure"}, "tolerances");
            c.tol.closing = positive(t, "closing", c.tol.closing);
            c.tol.iwasawa = positive(t, "iwasawa", c.tol.iwasawa);
            c.tol.closure = positive(t, "closure", c.tol.closure);
        }
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            check_keys(o, {"dir", "curves", "report", "mesh"}, "outputs");
            c.outputs.dir = get_or<std::string>(o, "dir", c.outputs.dir.string());
            c.outputs.curves = get_or(o, "curves", c.outputs.curves);
            c.outputs.report = get_or(o, "report", c.outputs.report);
            c.outputs.mesh = get_or(o, "mesh", c.outputs.mesh);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

JobConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j, path.parent_path());
}

json config_to_json(const JobConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    if (c.mode != JobMode::inverse_design) {
        if (c.custom_potential()) {
            json q{{"period", c.custom.period}, {"multiple", c.custom.multiple}, {"h", series_json(c.custom.h)}};
            if (c.custom.has_a0) q["a0"] = series_json(c.custom.a0);
            if (c.custom.has_b0) q["b0"] = series_json(c.custom.b0);
            j["potential"] = json{{"custom", q}};
        } else {
            j["potential"] = c.preset;
        }
    }
    if (!c.curves.ell.empty()) {
        j["curves"] = {{"ell", c.curves.ell.string()},
                       {"m", c.curves.m.string()},
                       {"period", c.curves.period},
                       {"phase_winding", c.curves.phase_winding},
                       {"area_tol", c.curves.area_tol}};
    }
    j["n"] = c.n;
    j["N"] = c.order;
    j["rk_steps_per_period"] = c.rk_steps_per_period;
    j["rk_steps_per_unit_y"] = c.rk_steps_per_unit_y;
    j["curve_samples"] = c.curve_samples;
    j["grid"] = {{"x_samples", c.grid.x_samples},
                 {"y_min", c.grid.y_min},
                 {"y_max", c.grid.y_max},
                 {"y_samples", c.grid.y_samples}};
    j["lambda"] = c.theta;
    j["tolerances"] = {{"closing", c.tol.closing}, {"iwasawa", c.tol.iwasawa}, {"closure", c.tol.closure}};
    j["outputs"] = {{"dir", c.outputs.dir.string()},
                    {"curves", c.outputs.curves},
                    {"report", c.outputs.report},
                    {"mesh", c.outputs.mesh}};
    return j;
}

Preset resolve_potential(const JobConfig& c) {
    if (!c.custom_potential()) return preset(c.preset);
    const CustomPotential& q = c.custom;
    Preset out;
    out.name = "custom";
    const double storage = q.period * q.multiple;
    out.frame.period = q.period;
    out.frame.multiple = q.multiple;
    out.frame.a0 = q.has_a0 ? build_series(q.a0, storage) : PeriodicFunction::constant(storage, 1.0);
    out.frame.b0 = q.has_b0 ? build_series(q.b0, storage) : PeriodicFunction::constant(storage, 0.0);
    try {
        out.frame.validate();
    } catch (const InvalidFrame& e) {
        throw ConfigError(std::string("custom frame: ") + e.what());
    }
    out.potential = make_potential(out.frame, build_series(q.h, q.period));
    return out;
}

CurveTable curve_table(const FrameData& frame, const PotentialData& pot, int n, int samples_per_period) {
    const auto alpha = alpha_of(frame, pot);
    const auto ell = ell_of(alpha);
    const auto m = m_of(frame);
    CurveTable t;
    const int rows = n * samples_per_period;
    for (int j = 0; j < rows; ++j) {
        const double s = pot.period * j / samples_per_period;
        t.t.push_back(s);
        t.ell.push_back(ell(s));
        t.m.push_back(m(s));
        t.alpha.push_back(alpha(s));
    }
    return t;
}

void export_csv(const fs::path& path, const CurveTable& c) {
    auto out = open_out(path);
    out << "t,re_ell,im_ell,re_m,im_m,re_alpha,im_alpha\n";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        out << fmt(c.t[i]) << ',' << fmt(c.ell[i].real()) << ',' << fmt(c.ell[i].imag()) << ','
            << fmt(c.m[i].real()) << ',' << fmt(c.m[i].imag()) << ',' << fmt(c.alpha[i].real()) << ','
            << fmt(c.alpha[i].imag()) << '\n';
    }
    finish(out, path);
}

void export_obj(const fs::path& path, const SurfaceMesh& mesh) {
    auto out = open_out(path);
    for (const auto& v : mesh.vertices) out << "v " << fmt(v[0]) << ' ' << fmt(v[1]) << ' ' << fmt(v[2]) << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << ' ' << f[3] + 1 << '\n';
    finish(out, path);
}

void export_report(const fs::path& path, const json& report) {
    auto out = open_out(path);
    out << report.dump(2) << '\n';
    finish(out, path);
}

CurveSamples read_curve_csv(const fs::path& path, const std::string& which) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
    std::vector<std::string> head;
    {
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
            head.push_back(cell);
        }
    }
    auto col = [&](const std::string& name) -> int {
        auto it = std::find(head.begin(), head.end(), name);
        return it == head.end() ? -1 : static_cast<int>(it - head.begin());
    };
    int ct = col("t"), cre = col("re_" + which), cim = col("im_" + which);
    if (cre < 0 || cim < 0) {
        cre = col("re");
        cim = col("im");
    }
    if (ct < 0 || cre < 0 || cim < 0)
        throw IoError(path.string() + ": header needs t and re_" + which + "/im_" + which + " (or re/im)");

    CurveSamples s;
    const std::size_t need = static_cast<std::size_t>(std::max({ct, cre, cim})) + 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError(path.string() + ": bad number '" + cell + "'");
            }
        }
        if (cells.size() < need) throw IoError(path.string() + ": short row");
        s.t.push_back(cells[ct]);
        s.values.emplace_back(cells[cre], cells[cim]);
    }
    if (s.values.size() < 4) throw IoError(path.string() + " needs at least 4 rows");
    return s;
}

json report_json(const ClosingReport& r) {
    json j;
    j["closing_mode"] = to_string(r.mode);
    j["n"] = r.n;
    j["N"] = r.order;
    j["rk_steps_per_period"] = r.steps_per_period;
    j["tol_closing"] = r.tol.closing;
    j["tol_third_direct"] = r.tol.third_direct;
    j["tol_monodromy"] = r.tol.monodromy;
    j["tol_derivative"] = r.tol.derivative;
    j["monodromy_residual_at_1"] = num(r.monodromy_residual_at_1);
    j["monodromy_sign"] = r.monodromy_sign;
    j["monodromy_reality"] = num(r.monodromy_reality);
    j["monodromy_hermitian_defect"] = num(r.monodromy_hermitian_defect);
    j["monodromy_tail"] = num(r.monodromy_tail);
    j["frame_error_estimate"] = num(r.frame_error_estimate);
    j["second_residual_re"] = num(r.second_residual.real());
    j["second_residual_im"] = num(r.second_residual.imag());
    j["second_residual_abs"] = num(std::abs(r.second_residual));
    j["ell_closed"] = r.ell_closed;
    j["third_lhs"] = num(r.third_lhs);
    j["third_rhs"] = num(r.third_rhs);
    j["area_ell"] = num(r.area_ell);
    j["area_m"] = num(r.area_m);
    j["cmc_alpha_residual_abs"] = num(std::abs(r.cmc_alpha_residual));
    j["cmc_beta_residual"] = num(r.cmc_beta_residual);
    j["cmc_beta_re_residual"] = num(r.cmc_beta_re_residual);
    j["X_offdiag_norm"] = num(r.X_offdiag_norm);
    j["X_diag_norm"] = num(r.X_diag_norm);
    j["Y_diag_norm"] = num(r.Y_diag_norm);
    j["X_alpha_cross"] = num(r.X_alpha_cross);
    j["Y_third_cross"] = num(r.Y_third_cross);
    j["dual_X_residual"] = num(r.dual_X_residual);
    j["dual_Y_residual"] = num(r.dual_Y_residual);
    j["pass_first"] = r.pass_first;
    j["pass_second"] = r.pass_second;
    j["pass_third"] = r.pass_third;
    j["pass_cmc"] = r.pass_cmc;
    j["pass_monodromy_derivatives"] = r.pass_monodromy_derivatives;
    j["pass_dual"] = r.pass_dual;
    j["closing_passed"] = r.passed();
    return j;
}

namespace {

struct Job {
    FrameData frame;
    PotentialData potential;
};

Job designed_job(const JobConfig& c, json& report, std::vector<std::string>& warnings) {
    const auto ell = read_curve_csv(c.curves.ell, "ell");
    const auto m = read_curve_csv(c.curves.m, "m");
    if (ell.values.size() != m.values.size()) throw IoError("ell and m files differ in length");
    double period = c.curves.period;
    if (period == 0.0) period = (ell.t[1] - ell.t[0]) * static_cast<double>(ell.t.size());
    if (!(period > 0.0)) throw IoError("cannot infer a positive period from the t column");
    CurvePair pair{curve_from_samples(ell.values, period), curve_from_samples(m.values, period)};
    DesignOptions o;
    o.phase_winding = c.curves.phase_winding;
    o.area_tol = c.curves.area_tol;
    DesignResult d;
    try {
        d = design(pair, o);
    } catch (const AreaMismatch& e) {
        report["design_area_ell"] = num(e.area_ell());
        report["design_area_m"] = num(e.area_m());
        throw ConfigError(e.what());
    }
    report["design_period"] = period;
    report["design_area_ell"] = num(d.area_ell);
    report["design_area_m"] = num(d.area_m);
    report["design_m_shift_re"] = num(d.m_shift.real());
    report["design_m_shift_im"] = num(d.m_shift.imag());
    for (auto& w : d.warnings) warnings.push_back(w);
    return {d.frame, d.potential};
}

void write_report(const fs::path& path, RunResult& r) {
    r.report["exit_code"] = r.exit_code;
    r.report["warnings"] = r.warnings;
    if (!r.error.empty()) r.report["error"] = r.error;
    export_report(path, r.report);
    r.written.push_back(path);
}

}  // namespace

RunResult run(const JobConfig& c) {
    RunResult r;
    r.report = json::object();
    fs::path report_path;
    try {
        r.report["config"] = config_to_json(c);
        std::error_code ec;
        fs::create_directories(c.outputs.dir, ec);
        if (!fs::is_directory(c.outputs.dir)) throw IoError("cannot create output directory " + c.outputs.dir.string());
        report_path = c.outputs.dir / c.outputs.report;

        Job job;
        if (c.mode == JobMode::inverse_design) {
            job = designed_job(c, r.report, r.warnings);
        } else {
            auto p = resolve_potential(c);
            job = {std::move(p.frame), std::move(p.potential)};
        }

        IntegrationOptions opts;
        opts.order = c.order;
        opts.steps_per_period = c.rk_steps_per_period;
        opts.steps_per_unit_y = c.rk_steps_per_unit_y;
        ClosingTolerances ctol;
        ctol.closing = c.tol.closing;
        const ClosingMode cm = c.mode == JobMode::cmc_surface ? ClosingMode::cmc_L3 : ClosingMode::nil_cylinder;
        const auto rep = closing_report(job.frame, job.potential, c.n, cm, opts, ctol);
        r.report.update(report_json(rep));
        r.report["period"] = job.potential.period;
        r.report["h_tail_norm"] = job.potential.h.tail_norm();
        r.report["frame_det_deviation"] = job.frame.det_deviation();

        const fs::path csv = c.outputs.dir / c.outputs.curves;
        export_csv(csv, curve_table(job.frame, job.potential, c.n, c.curve_samples));
        r.written.push_back(csv);

        if (c.mode == JobMode::curve_report) {
            r.report["all_pass"] = rep.passed() && rep.pass_monodromy_derivatives && rep.pass_dual;
            write_report(report_path, r);
            return r;
        }

        const bool closes = rep.passed();
        if (!closes) r.warnings.push_back("closing conditions fail: surface is frame-periodic only");
        r.report["surface_label"] = closes ? "cylinder" : "frame-periodic only";

        GridSpec grid = c.grid;
        grid.n = c.n;
        const auto field = integrate_frame(job.potential, grid, opts);
        IwasawaOptions iwo;
        iwo.tol = c.tol.iwasawa;
        const auto iw = frame_from(field, iwo);
        SurfaceOptions so;
        so.theta = c.theta;
        so.target = c.mode == JobMode::cmc_surface ? SurfaceTarget::L3 : SurfaceTarget::nil;
        const auto mesh = surface_grid(field, iw, job.potential, so);

        double f_tail = 0.0;
        for (std::size_t i = 0; i < iw.at.size(); ++i)
            if (iw.valid[i]) f_tail = std::max(f_tail, iw.at[i].F_tail);
        int valid_columns = 0;
        for (int ix = 0; ix < mesh.cols; ++ix) {
            bool any = false;
            for (int iy = 0; iy < mesh.rows && !any; ++iy) any = mesh.valid[mesh.index(ix, iy)] != 0;
            valid_columns += any ? 1 : 0;
        }
        const double closure = closure_residual(mesh);
        r.report["surface_target"] = to_string(so.target);
        r.report["grid_rows"] = mesh.rows;
        r.report["grid_cols"] = mesh.cols;
        r.report["frame_valid_points"] = field.valid_count();
        r.report["iwasawa_valid_points"] = iw.valid_count();
        r.report["mesh_valid_vertices"] = mesh.valid_count();
        r.report["mesh_faces"] = mesh.faces.size();
        r.report["valid_columns"] = valid_columns;
        r.report["frame_boundary_mass"] = num(field.tails.boundary_mass);
        r.report["frame_dropped_flux"] = num(field.tails.dropped_flux);
        r.report["iwasawa_max_reconstruction"] = num(iw.max_reconstruction);
        r.report["iwasawa_max_reality"] = num(iw.max_reality);
        r.report["iwasawa_axis_vplus_deviation"] = num(iw.axis_vplus_deviation);
        r.report["iwasawa_max_F_tail"] = num(f_tail);
        r.report["closure_residual"] = num(closure);
        r.report["closure_pass"] = closure <= c.tol.closure;
        if (!(closure <= c.tol.closure))
            r.warnings.push_back("surface closure residual " + fmt(closure) + " exceeds tolerance");

        if (so.target == SurfaceTarget::L3) {
            const auto d = l3_diagnostics(iw, std::polar(1.0, c.theta));
            r.report["max_det_gauss_error"] = num(d.max_det_gauss_error);
            r.report["max_structure_residual"] = num(d.max_structure_residual);
            r.report["max_gauss_structure_residual"] = num(d.max_gauss_structure_residual);
            const double dx = mesh.cols > 1 ? field.xs[1] - field.xs[0] : 0.0;
            const double dy = mesh.rows > 1 ? field.ys[1] - field.ys[0] : 0.0;
            const auto h = discrete_mean_curvature(mesh, dx, dy);
            r.report["mean_curvature_samples"] = h.values.size();
            r.report["mean_curvature_mean"] = num(h.mean);
            r.report["mean_curvature_min"] = num(h.min);
            r.report["mean_curvature_max"] = num(h.max);
            r.report["mean_curvature_relative_spread"] = num(h.values.empty() ? NAN : h.relative_spread);
            r.report["mean_curvature_skipped"] = h.skipped;
        }

        const fs::path obj = c.outputs.dir / c.outputs.mesh;
        export_obj(obj, mesh);
        r.written.push_back(obj);
        if (valid_columns == 0) {
            r.exit_code = 3;
            r.error = "no valid surface column";
        }
        write_report(report_path, r);
    } catch (const ConfigError& e) {
        r.exit_code = 2;
        r.error = e.what();
    } catch (const IoError& e) {
        r.exit_code = 2;
        r.error = e.what();
    } catch (const std::exception& e) {
        r.exit_code = 3;
        r.error = e.what();
        if (!report_path.empty()) {
            try {
                write_report(report_path, r);
            } catch (const std::exception&) {
            }
        }
    }
    return r;
}

}  // namespace nilcyl
