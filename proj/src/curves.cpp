#include "nilcyl/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nilcyl {

namespace {

PeriodicFunction at_storage(const PeriodicFunction& f, const FrameData& frame) {
    return frame.multiple == 1 ? f : f.with_period_multiple(frame.multiple);
}

PeriodicFunction to_period(const PeriodicFunction& f, const FrameData& frame) {
    return frame.multiple == 1 ? f : f.reduce_period(frame.multiple);
}

PeriodicFunction two_h_minus_kappa(const PotentialData& pot) { return cplx(2.0) * pot.h - pot.kappa; }

}  // namespace

std::vector<cplx> PlaneCurve::samples(std::size_t m) const {
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = (*this)(period * static_cast<double>(j) / static_cast<double>(m));
    return out;
}

double PlaneCurve::max_abs(std::size_t m) const {
    double s = 0.0;
    for (const auto& v : samples(m)) s = std::max(s, std::abs(v));
    return s;
}

bool PlaneCurve::closed(double rel_tol) const {
    return std::abs(secular_slope) * period <= rel_tol * std::max(max_abs(), 1.0);
}

PlaneCurve curve_from_samples(std::span<const cplx> samples, double period) {
    return {from_samples(samples, period), cplx{}, period};
}

PeriodicFunction a0_b0bar(const FrameData& frame) {
    return to_period(product(frame.a0, frame.b0.conj_reflect()), frame);
}

PeriodicFunction alpha_of(const FrameData& frame, const PotentialData& pot) {
    check_same_period(frame.period, pot.period);
    const auto u = at_storage(two_h_minus_kappa(pot), frame);
    const auto a2 = product(frame.a0, frame.a0);
    const auto b2 = product(frame.b0, frame.b0);
    return to_period(product(a2, u) + product(b2, u.conj_reflect()), frame);
}

PlaneCurve ell_of(const PeriodicFunction& alpha) {
    auto anti = antiderivative(alpha);
    return {std::move(anti.periodic), anti.mean, alpha.period()};
}

PlaneCurve m_of(const FrameData& frame) {
    return {to_period(product(frame.a0, frame.b0), frame), cplx{}, frame.period};
}

double signed_area(const PlaneCurve& c, double rel_tol) {
    if (!c.closed(rel_tol)) throw NotClosed("signed area requires a closed curve");
    // (1/2) int Im(conj(F) F') = pi sum_k k |F_k|^2.
    double s = 0.0;
    for (int k = 1; k <= c.series.active_order(); ++k) {
        s += k * (std::norm(c.series.coeff(k)) - std::norm(c.series.coeff(-k)));
    }
    return std::numbers::pi * s;
}

double shoelace_area(const PlaneCurve& c, std::size_t m) {
    const auto v = c.samples(m);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::imag(std::conj(v[j]) * v[(j + 1) % m]);
    return 0.5 * s;
}

double green_area(const PlaneCurve& c, std::size_t m) {
    const auto d = c.series.derivative();
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = c.period * static_cast<double>(j) / static_cast<double>(m);
        s += std::imag(std::conj(c(t)) * (d(t) + c.secular_slope));
    }
    return 0.5 * s * c.period / static_cast<double>(m);
}

ThirdClosing third_closing_residual(const FrameData& frame, const PotentialData& pot, int n, double rel_tol) {
    const auto alpha = alpha_of(frame, pot);
    const auto ell = ell_of(alpha);
    if (!ell.closed(rel_tol)) throw NotClosed("third closing requires the curve l to be closed");
    const auto m = m_of(frame);
    ThirdClosing out;
    const cplx lhs = std::conj(ell.secular_slope) * first_moment(alpha, n) +
                     static_cast<double>(n) * integral_of_product(alpha, ell.series.conj_reflect());
    out.lhs = lhs.imag();
    out.rhs = n * integral_of_product(a0_b0bar(frame), pot.kappa).imag();
    out.area_ell = signed_area(ell, rel_tol);
    out.area_m = signed_area(m, rel_tol);
    return out;
}

PeriodicFunction beta_of(const FrameData& frame, const PotentialData& pot) {
    return product(a0_b0bar(frame), two_h_minus_kappa(pot)).imag_part();
}

PeriodicFunction beta_re_of(const FrameData& frame, const PotentialData& pot) {
    return product(a0_b0bar(frame), two_h_minus_kappa(pot)).real_part();
}

double cmc_inner_condition(const PeriodicFunction& ellprime, const PlaneCurve& m) {
    return integral_of_product(m.series.conj_reflect(), ellprime).imag();
}

}  // namespace nilcyl
