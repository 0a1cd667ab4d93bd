#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

#include "nilcyl/frame_integration.hpp"

using namespace nilcyl;

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

PotentialData constant_potential(cplx nu) {
    PotentialData p;
    p.period = 2 * pi;
    p.nu = PeriodicFunction::constant(p.period, nu, 4);
    p.kappa = PeriodicFunction::constant(p.period, 0.0, 4);
    p.h = PeriodicFunction::constant(p.period, 0.0, 4);
    return p;
}

IntegrationOptions opts(int order, int steps = 2048) {
    IntegrationOptions o;
    o.order = order;
    o.steps_per_period = steps;
    o.steps_per_unit_y = steps;
    o.threads = 1;
    return o;
}

std::vector<cplx> circle8() {
    std::vector<cplx> l;
    for (int j = 0; j < 8; ++j) l.push_back(std::polar(1.0, 2 * pi * j / 8));
    return l;
}
}  // namespace

TEST_CASE("zero potential gives the identity frame") {
    auto pot = constant_potential(0.0);
    GridSpec g{.x_samples = 9, .y_min = -0.5, .y_max = 0.5, .y_samples = 5};
    auto f = integrate_frame(pot, g, opts(8, 64));
    CHECK(f.valid_count() == f.C.size());
    for (const auto& c : f.C) CHECK((c - LoopMatrix::identity(8)).wiener_norm() == 0.0);
    auto M = monodromy(f);
    CHECK(X_of(M).wiener_norm() == 0.0);
    CHECK(Y_of(M).wiener_norm() == 0.0);
    const auto l = circle8();
    CHECK(kilian_identity_residual(pot, l, opts(8, 64)) == 0.0);
}

TEST_CASE("diagonal constant potential integrates to the exponential") {
    auto pot = constant_potential(I);
    GridSpec g{.x_samples = 2, .y_min = -0.5, .y_max = 0.5, .y_samples = 3};
    g.n = 1;
    pot.period = 1.0;
    pot.nu = PeriodicFunction::constant(1.0, I, 4);
    pot.kappa = PeriodicFunction::constant(1.0, 0.0, 4);
    pot.h = PeriodicFunction::constant(1.0, 0.0, 4);
    auto f = integrate_frame(pot, g, opts(4));
    for (int ix = 0; ix < f.nx(); ++ix) {
        for (int iy = 0; iy < f.ny(); ++iy) {
            const cplx z = f.z(ix, iy);
            Mat2 e = Mat2::Zero();
            e(0, 0) = std::exp(I * z);
            e(1, 1) = std::exp(-I * z);
            CHECK(entry_norm(f.at(ix, iy).eval_at(1.0) - e) < 1e-10);
            CHECK(entry_norm(f.at(ix, iy).eval_at(I) - e) < 1e-10);
        }
    }
    CHECK(f.axis_row() == 1);
}

TEST_CASE("lemniscate returns to the identity at lambda = 1") {
    auto p = preset("identity_lemniscate");
    auto M = monodromy(p.potential, 1, opts(32));
    CHECK(entry_norm(M.eval_at(1.0) - Mat2::Identity()) < 1e-8);
    CHECK(M.is_twisted(1e-12));
}

TEST_CASE("monodromy property on a double cover grid") {
    // Two periods need a higher order than one.
    for (std::string name : {"twisted_circle", "diagonal_c1_quartic", "cosh_sinh_sech3"}) {
        CAPTURE(name);
        auto p = preset(name);
        GridSpec g{.x_samples = 19, .y_min = 0.0, .y_max = 0.0, .y_samples = 1, .n = 2};
        auto f = integrate_frame(p.potential, g, opts(48));
        auto M = monodromy(f);
        double worst = 0.0;
        for (int j = 1; j <= 8; ++j) {
            for (const cplx l : circle8()) {
                const Mat2 lhs = f.at(j + 9, 0).eval_at(l);
                const Mat2 rhs = M.eval_at(l) * f.at(j, 0).eval_at(l);
                worst = std::max(worst, entry_norm(lhs - rhs) / std::max(1.0, entry_norm(lhs)));
            }
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("reality of the frame on the real axis") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        auto p = preset(name);
        auto M = monodromy(p.potential, 1, opts(32));
        CHECK(hermitian_defect(M) < 1e-12);
        CHECK(reality_residual(M) / M.wiener_norm() < 1e-7);
    }
    auto tw = preset("twisted_circle");
    CHECK(reality_residual(monodromy(tw.potential, 1, opts(32))) < 1e-8);
}

TEST_CASE("vertical columns: holomorphic continuation and validity") {
    auto p = preset("twisted_circle");
    GridSpec g{.x_samples = 5, .y_min = -0.25, .y_max = 0.25, .y_samples = 5};
    auto serial = integrate_frame(p.potential, g, opts(24, 4096));
    auto o = opts(24, 4096);
    o.threads = 3;
    auto par = integrate_frame(p.potential, g, o);
    REQUIRE(serial.valid_count() == serial.C.size());
    for (std::size_t i = 0; i < serial.C.size(); ++i) CHECK((serial.C[i] - par.C[i]).wiener_norm() == 0.0);
    CHECK(serial.at(0, serial.axis_row()).wiener_norm() == doctest::Approx(2.0));

    // Reaching a point by a different path gives the same frame.
    const Zeta zeta(p.potential);
    LoopMatrix c = LoopMatrix::identity(24);
    TailStats t;
    const cplx target = serial.z(2, 4);
    integrate_segment(zeta, c, 0.0, target, 4096, t);
    CHECK((c - serial.at(2, 4)).wiener_norm() < 1e-9);
}

TEST_CASE("a pole in the strip invalidates the rest of the ray") {
    // An entire coefficient that overflows inside the grid stands in for a pole.
    PotentialData pot;
    pot.period = 2 * pi;
    pot.nu = interpolate([](double t) { return I * 1e3 * std::exp(40.0 * I * t); }, 2 * pi, 128);
    pot.kappa = PeriodicFunction::constant(2 * pi, 0.0, 4);
    pot.h = PeriodicFunction::constant(2 * pi, 0.0, 4);
    GridSpec g{.x_samples = 3, .y_min = -40.0, .y_max = 0.0, .y_samples = 3};
    auto f = integrate_frame(pot, g, opts(4, 64));
    CHECK(f.is_valid(0, 2));
    CHECK(f.is_valid(1, 2));
    CHECK_FALSE(f.is_valid(1, 0));
    CHECK(f.valid_count() < f.C.size());
}

TEST_CASE("monodromy derivatives vanish for lambda independent zeta") {
    auto pot = constant_potential(0.5 * I);
    auto M = monodromy(pot, 1, opts(8, 256));
    CHECK(X_of(M).wiener_norm() < 1e-14);
    CHECK(Y_of(M).wiener_norm() < 1e-14);
    const auto l = circle8();
    CHECK(kilian_identity_residual(pot, l, opts(8, 256)) < 1e-14);
}

TEST_CASE("Kilian identity at order 32") {
    const auto l = circle8();
    auto tw = preset("twisted_circle");
    CHECK(kilian_identity_residual(tw.potential, l, opts(32)) < 1e-7);
    for (const char* name : {"identity_lemniscate", "diagonal_c1_quartic", "cosh_sinh_sech3"}) {
        CAPTURE(name);
        auto k = kilian_identity_check(preset(name).potential, l, opts(32));
        CHECK(k.relative < 1e-7);
    }
    const cplx one[1] = {1.0};
    CHECK(kilian_identity_residual(preset("identity_lemniscate").potential, one, opts(32)) < 1e-7);
}

TEST_CASE("closing reports of the presets") {
    for (const char* name : {"identity_lemniscate", "identity_trig3", "diagonal_c1_quartic", "cosh_sinh_sech3",
                             "twisted_circle"}) {
        CAPTURE(name);
        auto p = preset(name);
        auto r = closing_report(p.frame, p.potential, 1, ClosingMode::nil_cylinder, opts(32));
        CHECK(r.passed());
        CHECK(r.pass_monodromy_derivatives);
        CHECK(r.pass_dual);
        CHECK(r.dual_X_residual < 1e-6);
        CHECK(r.dual_Y_residual < 1e-6);
        CHECK(r.X_alpha_cross < 1e-7);
        CHECK(r.Y_third_cross < 1e-7);
        CHECK(std::isfinite(r.frame_error_estimate));
    }
    auto q = preset("diagonal_c1_quartic");
    CHECK(closing_report(q.frame, q.potential).monodromy_sign == -1);
    auto tw = preset("twisted_circle");
    auto r = closing_report(tw.frame, tw.potential, 1, ClosingMode::nil_cylinder, opts(32));
    CHECK(r.area_ell == doctest::Approx(twisted_circle_area()).epsilon(1e-8));
    CHECK(r.area_m == doctest::Approx(twisted_circle_area()).epsilon(1e-8));
}

TEST_CASE("cmc closing reports") {
    for (const char* name : {"cmch1", "cmch2"}) {
        CAPTURE(name);
        auto p = preset(name);
        auto r = closing_report(p.frame, p.potential, 1, ClosingMode::cmc_L3, opts(32));
        CHECK(r.pass_cmc);
        CHECK(r.passed());
        CHECK(std::abs(r.cmc_alpha_residual) < 1e-8);
        CHECK(std::abs(r.cmc_beta_residual) < 1e-8);
    }
}

TEST_CASE("cover index") {
    auto p = preset("twisted_circle");
    auto r1 = closing_report(p.frame, p.potential, 1, ClosingMode::nil_cylinder, opts(32));
    auto r2 = closing_report(p.frame, p.potential, 2, ClosingMode::nil_cylinder, opts(32));
    CHECK(r2.passed());
    CHECK(r2.area_ell == doctest::Approx(r1.area_ell).epsilon(1e-9));
    CHECK(r2.third_lhs == doctest::Approx(2 * r1.third_lhs).epsilon(1e-9));
    CHECK_THROWS_AS(closing_report(p.frame, p.potential, 0), Error);
}

TEST_CASE("fourth order convergence on the diagonal preset") {
    auto p = preset("diagonal_c1_quartic");
    const double e1 = frame_error_estimate(p.potential, 1, 256, 32);
    const double e2 = frame_error_estimate(p.potential, 1, 512, 32);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("dual route with a constant frame") {
    auto p = preset("identity_lemniscate");
    auto d = dual_route(p.frame, p.potential);
    auto M = monodromy(p.potential, 1, opts(32));
    CHECK(entry_norm(X_of(M).eval_at(1.0) - d.X) < 1e-6);
    CHECK(entry_norm(Y_of(M).eval_at(1.0) - d.Y) < 1e-6);
}

TEST_CASE("worker count honours the environment cap") {
    CHECK(worker_count(1) == 1);
    CHECK(worker_count(4) >= 1);
    CHECK(worker_count(4) <= 4);
}
