#include "nilcyl/inverse_design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nilcyl {

AreaMismatch::AreaMismatch(double area_ell, double area_m)
    : Error([&] {
          std::ostringstream os;
          os.precision(12);
          os << "signed areas differ: area(l) = " << area_ell << ", area(m) = " << area_m;
          return os.str();
      }()),
      area_ell_(area_ell),
      area_m_(area_m) {}

FrameData split_m(const PlaneCurve& m_tilde, const SplitOptions& options) {
    const double p = m_tilde.period;
    if (!m_tilde.closed()) throw NotClosed("split_m requires a closed curve");
    if (std::abs(m_tilde(0.0)) > 1e-12 * std::max(1.0, m_tilde.max_abs()))
        throw InvalidFrame("split_m requires m(0) = 0 so that C0(0) = id");
    const std::size_t m =
        options.samples ? options.samples : std::max<std::size_t>(256, 2 * m_tilde.series.order() + 2);
    const double w = 2.0 * std::numbers::pi * options.phase_winding / p;
    std::vector<cplx> a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = p * static_cast<double>(j) / static_cast<double>(m);
        const cplx v = m_tilde.series(t);
        const double r = std::sqrt(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * std::norm(v))));
        const cplx u = std::polar(1.0, w * t);
        a[j] = r * u;
        b[j] = v / (r * u);
    }
    FrameData f{from_samples(a, p).denoised(), from_samples(b, p).denoised(), p, 1};
    const double dev = f.det_deviation();
    if (dev > 1e-8) {
        std::ostringstream os;
        os << "det condition fails after interpolation (deviation " << dev << "); increase sampling";
        throw InvalidFrame(os.str());
    }
    return f;
}

PeriodicFunction mu_of(const FrameData& frame, const PeriodicFunction& alpha) {
    check_same_period(alpha.period(), frame.period);
    const auto al = frame.multiple == 1 ? alpha : alpha.with_period_multiple(frame.multiple);
    const int order = std::max({frame.a0.order(), frame.b0.order(), al.order()});
    const PeriodicFunction args[] = {frame.a0, frame.b0, al};
    auto mu = pointwise(
        args,
        [](std::span<const cplx> v) {
            const cplx a = v[0], b = v[1], x = v[2];
            return (std::conj(a) * std::conj(a) * x - b * b * std::conj(x)) / (std::norm(a) + std::norm(b));
        },
        2 * static_cast<std::size_t>(order) + 2);
    if (frame.multiple != 1) mu = mu.reduce_period(frame.multiple);
    return mu.denoised();
}

PeriodicFunction h_from(const FrameData& frame, const PeriodicFunction& mu) {
    const auto nk = extract_nu_kappa(frame);
    return (cplx(0.5) * (nk.kappa + mu)).denoised();
}

DesignResult design(const CurvePair& pair, const DesignOptions& options) {
    const auto& ell = pair.ell_tilde;
    check_same_period(ell.period, pair.m_tilde.period);
    if (!ell.closed()) throw NotClosed("design requires a closed curve l~");
    if (!pair.m_tilde.closed()) throw NotClosed("design requires a closed curve m~");

    DesignResult out;
    out.area_ell = signed_area(ell);
    out.area_m = signed_area(pair.m_tilde);
    if (std::abs(out.area_ell - out.area_m) > options.area_tol) throw AreaMismatch(out.area_ell, out.area_m);

    PlaneCurve m = pair.m_tilde;
    out.m_shift = m(0.0);
    if (std::abs(out.m_shift) > 1e-12 * std::max(1.0, m.max_abs())) {
        m.series = m.series - PeriodicFunction::constant(m.period, out.m_shift);
        out.warnings.push_back("m~(0) != 0: m~ translated by -m~(0) so that C0(0) = id");
    }

    out.frame = split_m(m, {options.phase_winding, options.samples});
    const auto alpha = ell.series.derivative() + PeriodicFunction::constant(ell.period, ell.secular_slope);
    const auto h = h_from(out.frame, mu_of(out.frame, alpha));
    out.potential = make_potential(out.frame, h);
    return out;
}

double balance_radius(double area) {
    if (!std::isfinite(area)) throw Error("balance_radius: area must be finite");
    if (area > 0.0) throw Error("balance_radius: positive area needs a counterclockwise circle");
    return std::sqrt(-area / std::numbers::pi);
}

}  // namespace nilcyl
