#include "doctest.h"

#include <cmath>
#include <numbers>

#include "nilcyl/potential.hpp"

using namespace nilcyl;

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

double sup_on_axis(const std::function<cplx(double)>& f, double p, int m = 257) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s = std::max(s, std::abs(f(p * (j + 0.13) / m)));
    return s;
}
}  // namespace

TEST_CASE("nu and kappa of the diagonal frame") {
    const double c = 1.0;
    auto f = make_frame([&](double t) { return std::exp(I * c * t); }, [](double) { return cplx{}; }, pi, 2, 512);
    f.validate();
    CHECK(f.sign() == -1);
    CHECK(entry_norm(f.C0(pi) + Mat2::Identity()) < 1e-13);
    auto nk = extract_nu_kappa(f);
    CHECK(nk.nu.period() == doctest::Approx(pi));
    CHECK(sup_on_axis([&](double t) { return nk.nu(t) - I * c; }, pi) < 1e-12);
    CHECK(nk.kappa.wiener_norm() < 1e-12);
}

TEST_CASE("nu and kappa of the cosh/sinh and twisted frames") {
    auto p3 = preset("cosh_sinh_sech3");
    CHECK(sup_on_axis([&](double t) { return p3.potential.nu(t); }, 2 * pi) < 1e-12);
    CHECK(sup_on_axis([&](double t) { return p3.potential.kappa(t) - std::cos(t); }, 2 * pi) < 1e-12);

    auto p4 = preset("twisted_circle");
    CHECK(sup_on_axis([&](double t) { return p4.potential.nu(t) + I * std::pow(std::cosh(std::sin(t)), 2); },
                      2 * pi) < 1e-12);
    CHECK(sup_on_axis(
              [&](double t) {
                  return p4.potential.kappa(t) -
                         std::exp(I * t) * (std::cos(t) - 0.5 * I * std::sinh(2.0 * std::sin(t)));
              },
              2 * pi) < 1e-12);
}

TEST_CASE("kappa against a finite-difference oracle on C0^-1 C0'") {
    auto p = preset("twisted_circle");
    const auto& fr = p.frame;
    const double eps = 1e-5;
    for (double t : {0.3, 1.9, 4.4}) {
        const Mat2 d = (fr.C0(t + eps) - fr.C0(t - eps)) / (2.0 * eps);
        const Mat2 mc = fr.C0(t).inverse() * d;
        CHECK(std::abs(mc(0, 1) - p.potential.kappa(t)) < 1e-7);
        CHECK(std::abs(mc(0, 0) - p.potential.nu(t)) < 1e-7);
    }
}

TEST_CASE("det condition violation is reported") {
    auto bad = make_frame([](double t) { return cplx(1.0 + 0.1 * std::sin(t)); }, [](double) { return cplx{}; },
                          2 * pi);
    CHECK(bad.det_deviation() > 0.05);
    CHECK_THROWS_AS(bad.validate(), InvalidFrame);
    CHECK_THROWS_AS(extract_nu_kappa(bad), InvalidFrame);
}

TEST_CASE("zeta structure") {
    SUBCASE("constant diagonal potential") {
        const double p = 2 * pi;
        PotentialData pot{PeriodicFunction::constant(p, I), PeriodicFunction::constant(p, 0.0),
                          PeriodicFunction::constant(p, 0.0), p};
        Zeta z(pot);
        auto l = z.loop(0.4);
        CHECK(l[-1].isZero(0.0));
        CHECK(l[1].isZero(0.0));
        CHECK(std::abs(l[0](0, 0) - I) < 1e-15);
        CHECK(std::abs(l[0](1, 1) + I) < 1e-15);
    }
    SUBCASE("diagonal preset with h") {
        auto p = preset("diagonal_c1_quartic");
        Zeta z(p.potential);
        const cplx w{0.7, 0.1};
        const auto t = z.terms(w);
        const cplx hs = std::conj(p.potential.h(std::conj(w)));
        CHECK(std::abs(t.minus(1, 0) + hs) < 1e-12);
        CHECK(std::abs(t.plus(1, 0) - hs) < 1e-12);
        CHECK(std::abs(t.minus(0, 1) - p.potential.h(w)) < 1e-12);
        CHECK(std::abs(t.plus(0, 1) + p.potential.h(w)) < 1e-12);
    }
    SUBCASE("lambda = 1 gives the frame's Maurer-Cartan form and twisting holds") {
        for (const auto& name : preset_names()) {
            auto p = preset(name);
            Zeta z(p.potential);
            for (double t : {0.2, 2.9}) {
                auto l = z.loop(t);
                CHECK(l.is_twisted(0.0));
                const auto terms = z.terms(t);
                Mat2 zeta0;
                const cplx nu = p.potential.nu(t), k = p.potential.kappa(t);
                zeta0 << nu, k, std::conj(k), -nu;
                CHECK(entry_norm(terms.at(1.0) - zeta0) < 1e-12);
                // su(1,1) on the real axis.
                CHECK((tau_lie(l) + l).wiener_norm() < 1e-9);
            }
        }
    }
}

TEST_CASE("presets") {
    auto lem = preset("identity_lemniscate");
    CHECK(lem.frame.period == doctest::Approx(2 * pi));
    const cplx z{0.5, 0.2};
    const cplx s = std::sin(z);
    CHECK(std::abs(lem.potential.h(z) - (1.0 + I * s) / ((I + s) * (I + s))) < 1e-11);
    auto q = preset("diagonal_c1_quartic");
    CHECK(q.frame.period == doctest::Approx(pi));
    CHECK(q.frame.multiple == 2);
    auto q2 = preset("diagonal_c1_quartic", {.n = 2});
    CHECK(q2.frame.period == doctest::Approx(2 * pi));
    CHECK(q2.frame.multiple == 1);
    CHECK(twisted_circle_area() == doctest::Approx(-4.045555290335865).epsilon(1e-14));
    CHECK(twisted_circle_radius() == doctest::Approx(1.134786431015564).epsilon(1e-14));
    CHECK_THROWS_AS(preset("nope"), Error);
    for (const auto& name : preset_names()) {
        auto p = preset(name);
        CHECK_NOTHROW(p.frame.validate());
        CHECK_NOTHROW(p.potential.validate());
    }
}
