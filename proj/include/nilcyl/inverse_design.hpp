#pragma once

#include <string>
#include <vector>

#include "nilcyl/curves.hpp"
#include "nilcyl/potential.hpp"

namespace nilcyl {

class AreaMismatch : public Error {
  public:
    AreaMismatch(double area_ell, double area_m);
    double area_ell() const noexcept { return area_ell_; }
    double area_m() const noexcept { return area_m_; }

  private:
    double area_ell_;
    double area_m_;
};

/// Two closed plane curves of a common period.
struct CurvePair {
    PlaneCurve ell_tilde;
    PlaneCurve m_tilde;
};

struct SplitOptions {
    /// a0 = r exp(2 pi i w t / p) instead of the canonical r > 0.
    int phase_winding = 0;
    /// Samples per period for the splitting; 0 picks 2K + 2 of m, at least 256.
    std::size_t samples = 0;
};

/// a0 b0 = m with a0 a0* - b0 b0* = 1 on the real axis:
/// |a0| = r, r^2 = (1 + sqrt(1 + 4|m|^2)) / 2, b0 = m / a0. Requires m(0) = 0.
FrameData split_m(const PlaneCurve& m_tilde, const SplitOptions& options = {});

/// mu = (a0*^2 alpha - b0^2 alpha*) / (a0 a0* + b0 b0*), so that
/// alpha = a0^2 mu + b0^2 mu*.
PeriodicFunction mu_of(const FrameData& frame, const PeriodicFunction& alpha);

/// h = (kappa + mu) / 2.
PeriodicFunction h_from(const FrameData& frame, const PeriodicFunction& mu);

struct DesignOptions {
    int phase_winding = 0;
    double area_tol = 1e-8;
    std::size_t samples = 0;
};

struct DesignResult {
    FrameData frame;
    PotentialData potential;
    /// m~(0); the construction uses m~ - m~(0) when it is nonzero.
    cplx m_shift{};
    double area_ell = 0.0;
    double area_m = 0.0;
    std::vector<std::string> warnings;
};

/// split_m, extract_nu_kappa, alpha = l~', mu_of, h_from.
DesignResult design(const CurvePair& pair, const DesignOptions& options = {});

/// Radius of the clockwise circle c e^{-it} with signed area T <= 0.
double balance_radius(double area);

}  // namespace nilcyl
