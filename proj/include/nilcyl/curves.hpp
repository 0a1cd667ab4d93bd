#pragma once

#include <vector>

#include "nilcyl/periodic_function.hpp"
#include "nilcyl/potential.hpp"

namespace nilcyl {

class NotClosed : public Error {
  public:
    using Error::Error;
};

/// Plane curve c(t) = secular_slope * t + series(t) over one period.
struct PlaneCurve {
    PeriodicFunction series;
    cplx secular_slope{};
    double period = 1.0;

    cplx operator()(double t) const { return secular_slope * t + series(t); }
    /// Values at M equispaced parameters j p / M.
    std::vector<cplx> samples(std::size_t m) const;
    double max_abs(std::size_t m = 256) const;
    /// |secular_slope| * p <= rel_tol * max(max|c|, 1).
    bool closed(double rel_tol = 1e-8) const;
};

/// Closed curve from equispaced samples over one period.
PlaneCurve curve_from_samples(std::span<const cplx> samples, double period);

/// alpha = a0^2 (2h - kappa) + b0^2 (2h - kappa)*, period p.
PeriodicFunction alpha_of(const FrameData& frame, const PotentialData& pot);
/// l(t) = int_0^t alpha, l(0) = 0.
PlaneCurve ell_of(const PeriodicFunction& alpha);
/// m = a0 b0.
PlaneCurve m_of(const FrameData& frame);

/// (1/2) int_0^p Im(conj(c) c') dt; throws NotClosed.
double signed_area(const PlaneCurve& c, double rel_tol = 1e-8);
/// Polygon shoelace sum over m samples; second order in 1/m.
double shoelace_area(const PlaneCurve& c, std::size_t m);
/// Trapezoid rule for (1/2) Im(conj(c) c') on m samples; exact for m > 4K.
double green_area(const PlaneCurve& c, std::size_t m);

struct ThirdClosing {
    double lhs = 0.0;      // int_0^{np} Im(alpha conj(l))
    double rhs = 0.0;      // int_0^{np} Im(a0 conj(b0) kappa)
    double area_ell = 0.0;
    double area_m = 0.0;
};

/// Both sides of the third closing condition over n periods and the two
/// signed areas (per period). Throws NotClosed when l is not closed.
ThirdClosing third_closing_residual(const FrameData& frame, const PotentialData& pot, int n = 1,
                                    double rel_tol = 1e-8);

/// beta = Im(a0 conj(b0) (2h - kappa)), real on the real axis.
PeriodicFunction beta_of(const FrameData& frame, const PotentialData& pot);
/// Re(a0 conj(b0) (2h - kappa)): the diagonal part of X(1) is -2i times its integral.
PeriodicFunction beta_re_of(const FrameData& frame, const PotentialData& pot);
/// Im of int_0^p conj(m) l'.
double cmc_inner_condition(const PeriodicFunction& ellprime, const PlaneCurve& m);

/// a0 conj(b0) at period p, used by several closing integrals.
PeriodicFunction a0_b0bar(const FrameData& frame);

}  // namespace nilcyl
