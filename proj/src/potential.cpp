#include "nilcyl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nilcyl {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

std::string deviation_message(const char* what, double dev) {
    std::ostringstream os;
    os.precision(3);
    os << what << " violated: max deviation " << std::scientific << dev;
    return os.str();
}

}  // namespace

Mat2 FrameData::C0(cplx z) const {
    const cplx a = a0(z);
    const cplx b = b0(z);
    const cplx zb = std::conj(z);
    Mat2 m;
    m << a, b, std::conj(b0(zb)), std::conj(a0(zb));
    return m;
}

double FrameData::det_deviation(std::size_t points) const {
    double dev = 0.0;
    const double ps = storage_period();
    for (std::size_t j = 0; j < points; ++j) {
        const double t = ps * (static_cast<double>(j) + 0.37) / static_cast<double>(points);
        const cplx a = a0(t);
        const cplx b = b0(t);
        dev = std::max(dev, std::abs(std::norm(a) - std::norm(b) - 1.0));
    }
    return dev;
}

double FrameData::origin_deviation() const { return entry_norm(C0(0.0) - Mat2::Identity()); }

void FrameData::validate(double tol) const {
    check_same_period(a0.period(), storage_period());
    check_same_period(b0.period(), storage_period());
    if (multiple != 1 && multiple != 2) throw InvalidFrame("frame period multiple must be 1 or 2");
    const double det = det_deviation();
    if (det > tol) throw InvalidFrame(deviation_message("det condition a0 a0* - b0 b0* = 1", det));
    const double origin = origin_deviation();
    if (origin > tol) throw InvalidFrame(deviation_message("C0(0) = id", origin));
}

FrameData make_frame(const std::function<cplx(double)>& a0, const std::function<cplx(double)>& b0,
                     double period, int multiple, std::size_t samples) {
    const double ps = period * multiple;
    FrameData f;
    f.a0 = interpolate(a0, ps, samples).denoised();
    f.b0 = interpolate(b0, ps, samples).denoised();
    f.period = period;
    f.multiple = multiple;
    return f;
}

FrameData identity_frame(double period, int order) {
    return {PeriodicFunction::constant(period, 1.0, order), PeriodicFunction::constant(period, 0.0, order), period, 1};
}

double PotentialData::nu_reality_defect() const { return (nu.conj_reflect() + nu).wiener_norm(); }

void PotentialData::validate(double tol) const {
    check_same_period(nu.period(), period);
    check_same_period(kappa.period(), period);
    check_same_period(h.period(), period);
    const double d = nu_reality_defect();
    if (d > tol * std::max(1.0, nu.wiener_norm())) throw InvalidFrame(deviation_message("nu* = -nu", d));
}

NuKappa extract_nu_kappa(const FrameData& frame) {
    const double det = frame.det_deviation();
    if (det > 1e-9) throw InvalidFrame(deviation_message("det condition a0 a0* - b0 b0* = 1", det));
    const auto& a = frame.a0;
    const auto& b = frame.b0;
    const auto as = a.conj_reflect();
    const auto bs = b.conj_reflect();
    auto nu = product(as, a.derivative()) - product(b, bs.derivative());
    auto kappa = product(as, b.derivative()) - product(b, as.derivative());
    if (frame.multiple != 1) {
        nu = nu.reduce_period(frame.multiple);
        kappa = kappa.reduce_period(frame.multiple);
    }
    return {nu.denoised(), kappa.denoised()};
}

PotentialData make_potential(const FrameData& frame, const PeriodicFunction& h) {
    check_same_period(h.period(), frame.period);
    auto nk = extract_nu_kappa(frame);
    return {std::move(nk.nu), std::move(nk.kappa), h.denoised(), frame.period};
}

Zeta::Zeta(const PotentialData& pot) : period_(pot.period) {
    const PeriodicFunction* fs[5];
    const auto hs = pot.h.conj_reflect();
    const auto ks = pot.kappa.conj_reflect();
    fs[0] = &pot.nu;
    fs[1] = &pot.h;
    fs[2] = &pot.kappa;
    fs[3] = &hs;
    fs[4] = &ks;
    order_ = 0;
    for (auto* f : fs) {
        check_same_period(f->period(), period_);
        order_ = std::max(order_, f->active_order());
    }
    coeffs_.assign(2 * order_ + 1, {});
    for (int k = -order_; k <= order_; ++k) {
        for (int e = 0; e < 5; ++e) coeffs_[k + order_][e] = fs[e]->coeff(k);
    }
}

ZetaTerms Zeta::terms(cplx z) const {
    const cplx w = std::exp(cplx(0.0, 2.0 * pi / period_) * z);
    const cplx winv = 1.0 / w;
    std::array<cplx, 5> v = coeffs_[order_];
    cplx wp = 1.0;
    cplx wm = 1.0;
    for (int k = 1; k <= order_; ++k) {
        wp *= w;
        wm *= winv;
        const auto& cp = coeffs_[order_ + k];
        const auto& cm = coeffs_[order_ - k];
        for (int e = 0; e < 5; ++e) v[e] += cp[e] * wp + cm[e] * wm;
    }
    const cplx nu = v[0], h = v[1], kappa = v[2], hs = v[3], ks = v[4];
    ZetaTerms t;
    t.minus << 0.0, h, ks - hs, 0.0;
    t.zero << nu, 0.0, 0.0, -nu;
    t.plus << 0.0, kappa - h, hs, 0.0;
    return t;
}

LoopMatrix Zeta::loop(cplx z, int order) const {
    const auto t = terms(z);
    LoopMatrix out(std::max(order, 1));
    out[-1] = t.minus;
    out[0] = t.zero;
    out[1] = t.plus;
    return out;
}

double twisted_circle_area() { return -(pi / 8.0) * (bessel_i0(4.0) - 1.0); }

double twisted_circle_radius() { return std::sqrt(std::abs(twisted_circle_area()) / pi); }

std::vector<std::string> preset_names() {
    return {"identity_lemniscate", "identity_trig3", "diagonal_c1_quartic", "cosh_sinh_sech3", "twisted_circle",
            "cmch1", "cmch2"};
}

Preset preset(std::string_view name, const PresetParams& params) {
    if (params.n < 1) throw Error("preset period multiplier must be positive");
    using Fn = std::function<cplx(double)>;
    Fn a0, b0, h;
    double base = 2.0 * pi;
    bool anti = false;
    if (name == "identity_lemniscate") {
        h = [](double t) {
            const cplx d = I + std::sin(t);
            return (1.0 + I * std::sin(t)) / (d * d);
        };
    } else if (name == "identity_trig3" || name == "cmch1") {
        h = [](double t) { return std::cos(t) - I * std::sin(3.0 * t); };
    } else if (name == "diagonal_c1_quartic" || name == "cmch2") {
        base = pi;
        anti = true;
        a0 = [](double t) { return std::exp(I * t); };
        h = [](double t) { return std::exp(-I * pi / 4.0) + std::sqrt(6.0) * std::cos(4.0 * t); };
    } else if (name == "cosh_sinh_sech3") {
        a0 = [](double t) { return cplx(std::cosh(std::sin(t))); };
        b0 = [](double t) { return cplx(std::sinh(std::sin(t))); };
        h = [](double t) {
            return 0.5 * std::cos(t) + std::cos(t) / std::cosh(2.0 * std::sin(t)) - I * std::sin(3.0 * t);
        };
    } else if (name == "twisted_circle") {
        const double c1 = twisted_circle_radius();
        a0 = [](double t) { return std::exp(-I * t) * std::cosh(std::sin(t)); };
        b0 = [](double t) { return cplx(std::sinh(std::sin(t))); };
        h = [c1](double t) {
            return std::exp(I * t) * (-0.25 * I) * (2.0 * c1 + 2.0 * I * std::cos(t) + std::sinh(2.0 * std::sin(t)));
        };
    } else {
        throw Error("unknown preset: " + std::string(name));
    }

    const double p = base * params.n;
    const int multiple = (anti && params.n % 2 == 1) ? 2 : 1;
    const std::size_t m = params.samples * static_cast<std::size_t>(params.n);
    Preset out;
    out.name = std::string(name);
    if (a0) {
        if (!b0) b0 = [](double) { return cplx{}; };
        out.frame = make_frame(a0, b0, p, multiple, m * multiple);
    } else {
        out.frame = identity_frame(p);
    }
    out.frame.validate();
    out.potential = make_potential(out.frame, interpolate(h, p, m));
    return out;
}

}  // namespace nilcyl
