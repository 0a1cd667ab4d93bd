#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nilcyl/loop_matrix.hpp"
#include "nilcyl/periodic_function.hpp"

namespace nilcyl {

class InvalidFrame : public Error {
  public:
    using Error::Error;
};

/// Entries of the periodic matrix C0 = [[a0, b0], [b0*, a0*]].
///
/// a0 and b0 are stored with period multiple * period. multiple = 2 marks an
/// anti-periodic frame, C0(z + p) = -C0(z); all quadratic quantities built
/// from the entries are p-periodic again.
struct FrameData {
    PeriodicFunction a0;
    PeriodicFunction b0;
    double period = 2.0 * 3.14159265358979323846;
    int multiple = 1;

    double storage_period() const { return period * multiple; }
    /// C0(z + p) = sign() * C0(z).
    int sign() const { return multiple == 1 ? 1 : -1; }
    Mat2 C0(cplx z) const;

    /// max |a0 a0* - b0 b0* - 1| over off-grid test points of the real axis.
    double det_deviation(std::size_t points = 97) const;
    /// ||C0(0) - id||.
    double origin_deviation() const;
    /// Throws InvalidFrame citing the deviation.
    void validate(double tol = 1e-9) const;
};

/// Frame from closed-form entries sampled over the storage period.
FrameData make_frame(const std::function<cplx(double)>& a0, const std::function<cplx(double)>& b0,
                     double period, int multiple = 1, std::size_t samples = 256);

/// The identity frame a0 = 1, b0 = 0.
FrameData identity_frame(double period, int order = 0);

struct PotentialData {
    PeriodicFunction nu;
    PeriodicFunction kappa;
    PeriodicFunction h;
    double period = 2.0 * 3.14159265358979323846;

    /// ||nu* + nu||_W.
    double nu_reality_defect() const;
    void validate(double tol = 1e-9) const;
};

struct NuKappa {
    PeriodicFunction nu;
    PeriodicFunction kappa;
};

/// nu = a0* a0' - b0 (b0*)', kappa = a0* b0' - b0 (a0*)'.
NuKappa extract_nu_kappa(const FrameData& frame);

/// Combines the frame's (nu, kappa) with h; all three are denoised.
PotentialData make_potential(const FrameData& frame, const PeriodicFunction& h);

/// zeta(z, lambda) = minus / lambda + zero + plus * lambda.
struct ZetaTerms {
    Mat2 minus;
    Mat2 zero;
    Mat2 plus;

    Mat2 at(cplx lambda) const { return minus / lambda + zero + plus * lambda; }
    /// lambda d/dlambda of zeta at lambda.
    Mat2 lambda_derivative(cplx lambda) const { return -minus / lambda + plus * lambda; }
};

/// Evaluator for the potential
///   (1,1) = nu, (1,2) = h / lambda + (kappa - h) lambda,
///   (2,1) = (kappa* - h*) / lambda + h* lambda, (2,2) = -nu.
class Zeta {
  public:
    explicit Zeta(const PotentialData& pot);

    double period() const noexcept { return period_; }
    ZetaTerms terms(cplx z) const;
    LoopMatrix loop(cplx z, int order = 1) const;

  private:
    double period_;
    int order_;
    // Interleaved coefficients of nu, h, kappa, h*, kappa* per mode.
    std::vector<std::array<cplx, 5>> coeffs_;
};

inline LoopMatrix build_zeta_at(const PotentialData& pot, cplx z) { return Zeta(pot).loop(z); }

struct Preset {
    std::string name;
    FrameData frame;
    PotentialData potential;
};

struct PresetParams {
    /// Period multiplier: the preset is built with period n times its base period.
    int n = 1;
    std::size_t samples = 256;
};

/// identity_lemniscate, identity_trig3, diagonal_c1_quartic, cosh_sinh_sech3,
/// twisted_circle; cmch1 and cmch2 are the c = 0 and c = 1 diagonal data used
/// for the spacelike CMC examples.
Preset preset(std::string_view name, const PresetParams& params = {});
std::vector<std::string> preset_names();

/// T = -(pi/8)(I0(4) - 1), the signed area of m for twisted_circle.
double twisted_circle_area();
/// c1 = sqrt(|T| / pi).
double twisted_circle_radius();

}  // namespace nilcyl
