#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "nilcyl/frame_integration.hpp"
#include "nilcyl/potential.hpp"
#include "nilcyl/sym_immersion.hpp"

namespace nilcyl {

class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Unreadable input or unwritable output.
class IoError : public Error {
  public:
    using Error::Error;
};

enum class JobMode { curve_report, nil_surface, cmc_surface, inverse_design };
std::string to_string(JobMode mode);
JobMode parse_mode(const std::string& s);

/// One entry of a custom potential: Fourier coefficients c_{-K..K}, or a
/// file of equispaced samples over the entry's period.
struct SeriesSource {
    std::vector<cplx> coefficients;
    std::filesystem::path samples_file;
    bool from_file() const { return !samples_file.empty(); }
};

struct CustomPotential {
    double period = 2.0 * 3.14159265358979323846;
    /// 2 for an anti-periodic frame; a0 and b0 then span 2 * period.
    int multiple = 1;
    SeriesSource a0;
    SeriesSource b0;
    SeriesSource h;
    bool has_a0 = false;
    bool has_b0 = false;
};

struct CurveInputs {
    std::filesystem::path ell;
    std::filesystem::path m;
    /// 0 infers the period from the t column.
    double period = 0.0;
    int phase_winding = 0;
    double area_tol = 1e-8;
};

struct JobTolerances {
    double closing = 1e-8;
    double iwasawa = 1e-8;
    double closure = 1e-5;
};

struct JobOutputs {
    std::filesystem::path dir = ".";
    std::string curves = "curves.csv";
    std::string report = "report.json";
    std::string mesh = "mesh.obj";
};

struct JobConfig {
    JobMode mode = JobMode::curve_report;
    /// Preset name; empty when `custom` is used.
    std::string preset;
    CustomPotential custom;
    CurveInputs curves;
    int n = 1;
    int order = 48;
    int rk_steps_per_period = 2048;
    int rk_steps_per_unit_y = 2048;
    /// Samples per period for the curve CSV and for interpolating presets.
    int curve_samples = 256;
    GridSpec grid;
    double theta = 0.0;
    JobTolerances tol;
    JobOutputs outputs;

    bool custom_potential() const { return preset.empty(); }
};

/// Relative input paths are resolved against `base_dir`.
JobConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
JobConfig load_config(const std::filesystem::path& path);
/// Normalized form that parses back to the same job.
nlohmann::json config_to_json(const JobConfig& c);

/// Frame and potential named by the config (preset or custom), period p.
Preset resolve_potential(const JobConfig& c);

struct CurveTable {
    std::vector<double> t;
    std::vector<cplx> ell;
    std::vector<cplx> m;
    std::vector<cplx> alpha;
};

/// samples_per_period * n rows over [0, n p).
CurveTable curve_table(const FrameData& frame, const PotentialData& pot, int n, int samples_per_period);

void export_csv(const std::filesystem::path& path, const CurveTable& curves);
void export_obj(const std::filesystem::path& path, const SurfaceMesh& mesh);
void export_report(const std::filesystem::path& path, const nlohmann::json& report);

/// Reads t and one complex column pair. `which` selects re_<which>/im_<which>
/// when the header has them; otherwise the file is t,re,im.
struct CurveSamples {
    std::vector<double> t;
    std::vector<cplx> values;
};
CurveSamples read_curve_csv(const std::filesystem::path& path, const std::string& which);

nlohmann::json report_json(const ClosingReport& r);

struct RunResult {
    /// 0 ok, 2 config or path error, 3 numerical failure.
    int exit_code = 0;
    std::vector<std::string> warnings;
    std::string error;
    nlohmann::json report;
    std::vector<std::filesystem::path> written;
};

/// Never throws; failures land in exit_code and error.
RunResult run(const JobConfig& config);

}  // namespace nilcyl
