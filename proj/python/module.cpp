#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "nilcyl/cli_pipeline.hpp"
#include "nilcyl/curves.hpp"
#include "nilcyl/frame_integration.hpp"
#include "nilcyl/inverse_design.hpp"
#include "nilcyl/iwasawa.hpp"
#include "nilcyl/sym_immersion.hpp"

namespace py = pybind11;
using namespace nilcyl;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    auto w = a.template mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) w(static_cast<py::ssize_t>(i)) = v[i];
    return a;
}

// (2N+1, 2, 2) array, index 0 holding degree -N.
LoopMatrix loop_from(const CArray& a) {
    if (a.ndim() != 3 || a.shape(1) != 2 || a.shape(2) != 2 || a.shape(0) % 2 == 0)
        throw py::value_error("expected coefficients of shape (2N+1, 2, 2)");
    const int order = static_cast<int>(a.shape(0) / 2);
    LoopMatrix m(order);
    auto r = a.unchecked<3>();
    for (int k = -order; k <= order; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[k](i, j) = r(k + order, i, j);
    return m;
}

CArray loop_to(const LoopMatrix& m) {
    const int order = m.order();
    CArray a({2 * order + 1, 2, 2});
    auto w = a.mutable_unchecked<3>();
    for (int k = -order; k <= order; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) w(k + order, i, j) = m[k](i, j);
    return a;
}

py::object from_json(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json to_json(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ClosingMode closing_mode(const std::string& s) {
    if (s == "nil") return ClosingMode::nil_cylinder;
    if (s == "cmc") return ClosingMode::cmc_L3;
    throw py::value_error("mode must be 'nil' or 'cmc'");
}

py::dict surface_dict(const std::string& name, const std::string& target, int x_samples, double y_min, double y_max,
                      int y_samples, int order, double theta) {
    const auto p = preset(name);
    GridSpec g;
    g.x_samples = x_samples;
    g.y_min = y_min;
    g.y_max = y_max;
    g.y_samples = y_samples;
    IntegrationOptions o;
    o.order = order;
    SurfaceOptions so;
    so.theta = theta;
    if (target == "nil") so.target = SurfaceTarget::nil;
    else if (target == "L3") so.target = SurfaceTarget::L3;
    else throw py::value_error("target must be 'nil' or 'L3'");

    SurfaceMesh mesh;
    IwasawaGrid iw;
    {
        py::gil_scoped_release release;
        const auto field = integrate_frame(p.potential, g, o);
        iw = frame_from(field);
        mesh = surface_grid(field, iw, p.potential, so);
    }
    py::array_t<double> v({mesh.rows, mesh.cols, 3});
    auto w = v.mutable_unchecked<3>();
    py::array_t<bool> valid({mesh.rows, mesh.cols});
    auto vw = valid.mutable_unchecked<2>();
    for (int iy = 0; iy < mesh.rows; ++iy) {
        for (int ix = 0; ix < mesh.cols; ++ix) {
            const auto i = mesh.index(ix, iy);
            for (int c = 0; c < 3; ++c) w(iy, ix, c) = mesh.vertices[i][c];
            vw(iy, ix) = mesh.valid[i] != 0;
        }
    }
    py::array_t<std::int64_t> faces({static_cast<py::ssize_t>(mesh.faces.size()), py::ssize_t{4}});
    auto fw = faces.mutable_unchecked<2>();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        for (int c = 0; c < 4; ++c) fw(f, c) = static_cast<std::int64_t>(mesh.faces[f][c]);
    py::dict d;
    d["vertices"] = v;
    d["valid"] = valid;
    d["faces"] = faces;
    d["closure"] = closure_residual(mesh);
    d["iwasawa_max_reconstruction"] = iw.max_reconstruction;
    d["iwasawa_max_reality"] = iw.max_reality;
    return d;
}

}  // namespace

PYBIND11_MODULE(_nilcyl, m) {
    m.doc() = "Minimal cylinders in Nil3 and spacelike CMC cylinders in L3 from periodic potentials";

    py::register_exception<Error>(m, "Error");

    m.def("preset_names", &preset_names);
    m.def("twisted_circle_area", &twisted_circle_area);
    m.def("twisted_circle_radius", &twisted_circle_radius);
    m.def("balance_radius", &balance_radius, py::arg("area"));

    m.def(
        "signed_area",
        [](const CArray& samples, double period) {
            std::vector<cplx> v(samples.data(), samples.data() + samples.size());
            return signed_area(curve_from_samples(v, period));
        },
        py::arg("samples"), py::arg("period"), "Signed area of the closed curve through equispaced samples.");

    m.def(
        "curves",
        [](const std::string& name, int samples, int n) {
            const auto p = preset(name);
            const auto t = curve_table(p.frame, p.potential, n, samples);
            py::dict d;
            d["t"] = to_array(t.t);
            d["ell"] = to_array(t.ell);
            d["m"] = to_array(t.m);
            d["alpha"] = to_array(t.alpha);
            return d;
        },
        py::arg("preset"), py::arg("samples") = 256, py::arg("n") = 1);

    m.def(
        "closing_report",
        [](const std::string& name, int n, const std::string& mode, int order) {
            const auto p = preset(name);
            IntegrationOptions o;
            o.order = order;
            ClosingReport r;
            {
                py::gil_scoped_release release;
                r = closing_report(p.frame, p.potential, n, closing_mode(mode), o);
            }
            return from_json(report_json(r));
        },
        py::arg("preset"), py::arg("n") = 1, py::arg("mode") = "nil", py::arg("order") = 48);

    m.def(
        "iwasawa",
        [](const CArray& coeffs) {
            const auto r = iwasawa_decompose(loop_from(coeffs));
            py::dict d;
            d["F"] = loop_to(r.F);
            d["Vplus"] = loop_to(r.Vplus);
            d["residual_reconstruction"] = r.residual_reconstruction;
            d["residual_reality"] = r.residual_reality;
            d["in_big_cell"] = r.in_big_cell;
            return d;
        },
        py::arg("coeffs"), "C = F Vplus for Laurent coefficients of shape (2N+1, 2, 2), degree -N first.");

    m.def("surface", &surface_dict, py::arg("preset"), py::arg("target") = "nil", py::arg("x_samples") = 64,
          py::arg("y_min") = -0.2, py::arg("y_max") = 0.2, py::arg("y_samples") = 9, py::arg("order") = 48,
          py::arg("theta") = 0.0);

    m.def(
        "run",
        [](const py::object& config, const std::string& base_dir) {
            const auto c = parse_config(to_json(config), base_dir);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(c);
            }
            return py::make_tuple(r.exit_code, from_json(r.report));
        },
        py::arg("config"), py::arg("base_dir") = "",
        "Runs a job from a config dict; returns (exit_code, report).");
}
