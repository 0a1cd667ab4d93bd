#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nilcyl/sym_immersion.hpp"

using namespace nilcyl;

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

IntegrationOptions opts(int order) {
    IntegrationOptions o;
    o.order = order;
    o.threads = 1;
    return o;
}

// Spacelike hyperboloid x1^2 + x2^2 - x0^2 = -r^2, |H| = 1/r.
SurfaceMesh hyperboloid(double r, int nu, int nv, double du, double dv) {
    SurfaceMesh m;
    m.rows = nv;
    m.cols = nu;
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const double u = 0.5 + i * du, v = j * dv;
            m.vertices.push_back({r * std::sinh(u) * std::cos(v), r * std::sinh(u) * std::sin(v), r * std::cosh(u)});
            m.valid.push_back(1);
        }
    }
    return m;
}
}  // namespace

TEST_CASE("Sym formulas at the identity") {
    const auto id = LoopMatrix::identity(8);
    auto s = sym_L3(id);
    CHECK(entry_norm(s.point + 0.5 * I * sigma3()) < 1e-15);
    CHECK(entry_norm(s.gauss - 0.5 * I * sigma3()) < 1e-15);
    CHECK(std::abs(s.gauss.determinant() - 0.25) < 1e-15);
    const Vec3 p = minkowski_coords(s.point);
    const Vec3 n = minkowski_coords(s.gauss);
    CHECK(p == Vec3{0.0, 0.0, -0.5});
    CHECK(n == Vec3{0.0, 0.0, 0.5});
    CHECK(minkowski_inner(n, n) == doctest::Approx(-0.25));
    CHECK(sym_nil(id) == Vec3{0.0, 0.0, 0.0});
    CHECK(sym_nil(id, std::polar(1.0, 0.7)) == Vec3{0.0, 0.0, 0.0});
}

TEST_CASE("Gauss map determinant and su(1,1) structure for real frames") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        LoopMatrix C = LoopMatrix::identity(16);
        for (int f = 0; f < 4; ++f) {
            LoopMatrix u = LoopMatrix::identity(16);
            u[f % 2 ? 1 : -1](f % 2, 1 - f % 2) = 0.2 * cplx(g(rng), g(rng));
            C = mul(C, u);
        }
        auto r = iwasawa_decompose(C);
        REQUIRE(r.in_big_cell);
        for (double th : {0.0, 0.4, 2.0}) {
            auto s = sym_L3(r.F, std::polar(1.0, th));
            CHECK(std::abs(s.gauss.determinant() - 0.25) < 1e-10);
            CHECK(su11_structure_residual(s.point) < 1e-8);
            CHECK(su11_structure_residual(s.gauss) < 1e-8);
            CHECK(su11_structure_residual(sym_nil_matrix(r.F, std::polar(1.0, th))) < 1e-8);
        }
    }
}

TEST_CASE("mesh faces follow the validity mask") {
    SurfaceMesh m;
    m.rows = 2;
    m.cols = 2;
    m.vertices.assign(4, Vec3{0.0, 0.0, 0.0});
    m.valid.assign(4, 1);
    assign_faces(m);
    REQUIRE(m.faces.size() == 1);
    CHECK(m.faces[0] == std::array<std::size_t, 4>{0, 1, 3, 2});
    m.valid[3] = 0;
    assign_faces(m);
    CHECK(m.faces.empty());
}

TEST_CASE("discrete mean curvature of a hyperboloid") {
    const double r = 2.0;
    auto m = hyperboloid(r, 40, 40, 0.02, 0.05);
    auto h = discrete_mean_curvature(m, 0.02, 0.05);
    CHECK(h.values.size() == 36u * 36u);
    CHECK(std::abs(std::abs(h.mean) - 1.0 / r) < 1e-6);
    CHECK(h.relative_spread < 1e-5);
    m.valid[m.index(20, 20)] = 0;
    CHECK(discrete_mean_curvature(m, 0.02, 0.05).values.size() == 36u * 36u - 25u);
}

TEST_CASE("lemniscate surface closes and its mesh is unmasked on the axis") {
    auto p = preset("identity_lemniscate");
    GridSpec g{.x_samples = 33, .y_min = -0.1, .y_max = 0.1, .y_samples = 3};
    auto f = integrate_frame(p.potential, g, opts(48));
    auto iw = frame_from(f, {}, 1);
    auto nil = surface_grid(f, iw, p.potential);
    CHECK(nil.valid_count() == nil.vertices.size());
    CHECK(closure_residual(nil) < 1e-5);
    CHECK(nil.faces.size() == 32u * 2u);
    const int axis = f.axis_row();
    for (int ix = 0; ix < nil.cols; ++ix) CHECK(nil.valid[nil.index(ix, axis)]);
    CHECK(std::abs(nil.vertices[nil.index(0, axis)][0]) < 1e-12);

    // Permuting the coordinate identification keeps the closure status.
    SurfaceMesh swapped = nil;
    for (auto& v : swapped.vertices) std::swap(v[0], v[2]);
    CHECK(closure_residual(swapped) == doctest::Approx(closure_residual(nil)));

    SurfaceOptions all_masked;
    all_masked.degeneracy_tol = 1e300;
    auto masked = surface_grid(f, iw, p.potential, all_masked);
    CHECK(masked.valid_count() == 0);
    CHECK(masked.faces.empty());
}

TEST_CASE("cmch1 L3 surface closes") {
    auto p = preset("cmch1");
    GridSpec g{.x_samples = 33, .y_min = -0.1, .y_max = 0.1, .y_samples = 3};
    auto f = integrate_frame(p.potential, g, opts(48));
    auto iw = frame_from(f, {}, 1);
    auto m = surface_grid(f, iw, p.potential, {.target = SurfaceTarget::L3});
    CHECK(closure_residual(m) < 1e-5);
    auto d = l3_diagnostics(iw);
    CHECK(d.max_det_gauss_error < 1e-10);
    CHECK(d.max_structure_residual < 1e-8);
    CHECK(m.gauss.size() == m.vertices.size());
}
