#include "nilcyl/frame_integration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace nilcyl {

namespace {

const cplx I{0.0, 1.0};

bool finite(const Mat2& m) { return m.allFinite(); }

// Coefficient-level RK4 for dC/ds = C zeta(z(s)) dz/ds, truncated to |k| <= N.
class Stepper {
  public:
    explicit Stepper(int order)
        : n_(order), c_(2 * order + 1), k1_(c_.size()), k2_(c_.size()), k3_(c_.size()), k4_(c_.size()),
          tmp_(c_.size()) {}

    void load(const LoopMatrix& m) {
        for (int k = -n_; k <= n_; ++k) c_[k + n_] = m.coeff(k);
    }

    LoopMatrix store() const { return LoopMatrix(n_, c_); }

    bool finite_state() const {
        return std::all_of(c_.begin(), c_.end(), [](const Mat2& m) { return finite(m); });
    }

    // One step of size h in s; za, zm, zb are zeta at the start, midpoint and end.
    void step(const ZetaTerms& za, const ZetaTerms& zm, const ZetaTerms& zb, cplx dz, double h, TailStats& tails) {
        const double edge = entry_norm(c_.front()) + entry_norm(c_.back());
        tails.boundary_mass = std::max(tails.boundary_mass, edge);
        tails.dropped_flux += h * std::abs(dz) * (entry_norm(c_.back() * za.plus) + entry_norm(c_.front() * za.minus));

        rhs(c_, za, dz, k1_);
        axpy(c_, 0.5 * h, k1_, tmp_);
        rhs(tmp_, zm, dz, k2_);
        axpy(c_, 0.5 * h, k2_, tmp_);
        rhs(tmp_, zm, dz, k3_);
        axpy(c_, h, k3_, tmp_);
        rhs(tmp_, zb, dz, k4_);
        const double w = h / 6.0;
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    }

  private:
    void rhs(const std::vector<Mat2>& c, const ZetaTerms& z, cplx dz, std::vector<Mat2>& out) const {
        const Mat2 zm = z.minus * dz;
        const Mat2 z0 = z.zero * dz;
        const Mat2 zp = z.plus * dz;
        const int m = static_cast<int>(c.size());
        for (int i = 0; i < m; ++i) {
            Mat2 d = c[i] * z0;
            if (i > 0) d.noalias() += c[i - 1] * zp;
            if (i + 1 < m) d.noalias() += c[i + 1] * zm;
            out[i] = d;
        }
    }

    static void axpy(const std::vector<Mat2>& x, double a, const std::vector<Mat2>& y, std::vector<Mat2>& out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
    }

    int n_;
    std::vector<Mat2> c_, k1_, k2_, k3_, k4_, tmp_;
};

int steps_for(double length, double per_unit) {
    return std::max(1, static_cast<int>(std::ceil(per_unit * length - 1e-9)));
}

Mat2 inv2(const Mat2& m) { return m.inverse(); }

}  // namespace

void TailStats::merge(const TailStats& o) {
    boundary_mass = std::max(boundary_mass, o.boundary_mass);
    dropped_flux = std::max(dropped_flux, o.dropped_flux);
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NILCYL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return std::max(1u, n);
}

int FrameField::axis_row() const {
    int best = 0;
    for (int i = 1; i < ny(); ++i)
        if (std::abs(ys[i]) < std::abs(ys[best])) best = i;
    return best;
}

std::size_t FrameField::valid_count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1)); }

void integrate_segment(const Zeta& zeta, LoopMatrix& C, cplx z0, cplx z1, int steps, TailStats& tails) {
    Stepper st(C.order());
    st.load(C);
    const cplx dz = z1 - z0;
    const double h = 1.0 / steps;
    ZetaTerms za = zeta.terms(z0);
    for (int i = 0; i < steps; ++i) {
        const cplx a = z0 + dz * (i * h);
        const ZetaTerms zm = zeta.terms(a + 0.5 * h * dz);
        const ZetaTerms zb = zeta.terms(i + 1 == steps ? z1 : a + h * dz);
        st.step(za, zm, zb, dz, h, tails);
        za = zb;
    }
    C = st.store();
}

AxisRun integrate_real_axis(const Zeta& zeta, double length, int steps, int order, bool keep_nodes) {
    AxisRun run;
    run.step = length / steps;
    Stepper st(order);
    st.load(LoopMatrix::identity(order));
    if (keep_nodes) {
        run.nodes.reserve(steps + 1);
        run.zeta_nodes.reserve(steps + 1);
        run.nodes.push_back(LoopMatrix::identity(order));
    }
    ZetaTerms za = zeta.terms(0.0);
    if (keep_nodes) run.zeta_nodes.push_back(za);
    for (int i = 0; i < steps; ++i) {
        const double a = i * run.step;
        const ZetaTerms zm = zeta.terms(a + 0.5 * run.step);
        const ZetaTerms zb = zeta.terms(i + 1 == steps ? length : a + run.step);
        st.step(za, zm, zb, 1.0, run.step, run.tails);
        za = zb;
        if (keep_nodes) {
            run.nodes.push_back(st.store());
            run.zeta_nodes.push_back(zb);
        }
    }
    run.end = st.store();
    return run;
}

FrameField integrate_frame(const PotentialData& pot, const GridSpec& grid, const IntegrationOptions& options) {
    if (grid.x_samples < 2 || grid.y_samples < 1 || grid.n < 1 || !(grid.y_max >= grid.y_min))
        throw Error("invalid grid specification");
    const Zeta zeta(pot);
    FrameField f;
    f.grid = grid;
    f.period = pot.period;
    f.order = options.order;
    const double length = grid.n * pot.period;
    const int nx = grid.x_samples;
    const int ny = grid.y_samples;
    for (int j = 0; j < nx; ++j) f.xs.push_back(length * j / (nx - 1));
    for (int k = 0; k < ny; ++k)
        f.ys.push_back(ny == 1 ? grid.y_min : grid.y_min + (grid.y_max - grid.y_min) * k / (ny - 1));
    f.C.assign(static_cast<std::size_t>(nx) * ny, LoopMatrix(options.order));
    f.valid.assign(f.C.size(), 0);

    const double dx = length / (nx - 1);
    const int sx = steps_for(dx / pot.period, options.steps_per_period);
    f.step_x = dx / sx;

    std::vector<LoopMatrix> axis(nx);
    std::vector<std::uint8_t> axis_ok(nx, 1);
    axis[0] = LoopMatrix::identity(options.order);
    for (int j = 1; j < nx; ++j) {
        axis[j] = axis[j - 1];
        if (!axis_ok[j - 1]) {
            axis_ok[j] = 0;
            continue;
        }
        integrate_segment(zeta, axis[j], f.xs[j - 1], f.xs[j], sx, f.tails);
        axis_ok[j] = std::all_of(axis[j].coeffs().begin(), axis[j].coeffs().end(), finite);
    }

    // Rows above and below the axis, each ordered outward from y = 0.
    std::vector<int> up, down;
    for (int k = 0; k < ny; ++k) (f.ys[k] >= 0.0 ? up : down).push_back(k);
    std::sort(up.begin(), up.end(), [&](int a, int b) { return f.ys[a] < f.ys[b]; });
    std::sort(down.begin(), down.end(), [&](int a, int b) { return f.ys[a] > f.ys[b]; });
    f.step_y = 1.0 / options.steps_per_unit_y;

    std::vector<TailStats> col_tails(nx);
    auto column = [&](int j) {
        for (const auto* ray : {&up, &down}) {
            LoopMatrix c = axis[j];
            bool ok = axis_ok[j];
            double y = 0.0;
            for (int k : *ray) {
                const double yk = f.ys[k];
                if (ok && yk != y) {
                    integrate_segment(zeta, c, cplx(f.xs[j], y), cplx(f.xs[j], yk),
                                      steps_for(std::abs(yk - y), options.steps_per_unit_y), col_tails[j]);
                    ok = std::all_of(c.coeffs().begin(), c.coeffs().end(), finite);
                    y = yk;
                }
                f.C[f.index(j, k)] = c;
                f.valid[f.index(j, k)] = ok ? 1 : 0;
            }
        }
    };

    const unsigned workers = std::min<unsigned>(worker_count(options.threads), static_cast<unsigned>(nx));
    if (workers <= 1) {
        for (int j = 0; j < nx; ++j) column(j);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int j = next++; j < nx; j = next++) column(j);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& t : col_tails) f.tails.merge(t);
    return f;
}

LoopMatrix monodromy(const PotentialData& pot, int n, const IntegrationOptions& options) {
    const Zeta zeta(pot);
    return integrate_real_axis(zeta, n * pot.period, options.steps_per_period * n, options.order).end;
}

LoopMatrix monodromy(const FrameField& field) {
    const int n = field.grid.n;
    if ((field.nx() - 1) % n != 0) throw Error("grid has no column at x = p");
    const int iy = field.axis_row();
    if (field.ys[iy] != 0.0) throw Error("grid has no row on the real axis");
    const int ix = (field.nx() - 1) / n;
    if (!field.is_valid(ix, iy)) throw Error("frame invalid at z = p");
    return field.at(ix, iy);
}

LoopMatrix X_of(const LoopMatrix& M) {
    return cplx(0.0, -1.0) * mul(M.lambda_d_lambda(), inverse(M), 2 * M.order());
}

LoopMatrix Y_of(const LoopMatrix& M) {
    const auto P = mul(M.lambda_d_lambda(), inverse(M), 2 * M.order());
    return cplx(-0.5) * P.lambda_d_lambda();
}

double frame_error_estimate(const PotentialData& pot, int n, int steps_per_period, int order) {
    IntegrationOptions a;
    a.order = order;
    a.steps_per_period = steps_per_period;
    IntegrationOptions b = a;
    b.steps_per_period = 2 * steps_per_period;
    return (monodromy(pot, n, a) - monodromy(pot, n, b)).wiener_norm();
}

KilianResidual kilian_identity_check(const PotentialData& pot, std::span<const cplx> lambdas,
                                     const IntegrationOptions& options, int z_samples) {
    const Zeta zeta(pot);
    int steps = options.steps_per_period;
    // Simpson needs an even number of intervals between samples.
    const int block = 2 * z_samples;
    steps = ((steps + block - 1) / block) * block;
    const auto run = integrate_real_axis(zeta, pot.period, steps, options.order, true);
    const double h = run.step;
    const int stride = steps / z_samples;
    KilianResidual out;
    for (const cplx lam : lambdas) {
        std::vector<Mat2> g(steps + 1);
        for (int i = 0; i <= steps; ++i) {
            const Mat2 c = run.nodes[i].eval_at(lam);
            g[i] = c * (run.zeta_nodes[i].lambda_derivative(lam) / lam) * inv2(c);
        }
        Mat2 acc = Mat2::Zero();
        for (int i = 0; i + 2 <= steps; i += 2) {
            acc += (h / 3.0) * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
            if ((i + 2) % stride != 0) continue;
            const auto& node = run.nodes[i + 2];
            const Mat2 lhs = (node.lambda_d_lambda().eval_at(lam) / lam) * inv2(node.eval_at(lam));
            const double d = entry_norm(lhs - acc);
            out.absolute = std::max(out.absolute, d);
            out.relative = std::max(out.relative, d / std::max(1.0, entry_norm(lhs)));
            out.scale = std::max(out.scale, entry_norm(lhs));
        }
    }
    return out;
}

double kilian_identity_residual(const PotentialData& pot, std::span<const cplx> lambdas,
                                const IntegrationOptions& options, int z_samples) {
    return kilian_identity_check(pot, lambdas, options, z_samples).absolute;
}

DualRoute dual_route(const FrameData& frame, const PotentialData& pot, int n, std::size_t samples) {
    const Zeta zeta(pot);
    const double p = pot.period;
    std::vector<std::vector<cplx>> a(4, std::vector<cplx>(samples)), k(4, std::vector<cplx>(samples));
    for (std::size_t j = 0; j < samples; ++j) {
        const double t = p * static_cast<double>(j) / static_cast<double>(samples);
        const Mat2 c = frame.C0(t);
        const Mat2 ci = inv2(c);
        const auto z = zeta.terms(t);
        const Mat2 av = c * z.lambda_derivative(1.0) * ci;
        const Mat2 kv = c * (z.minus + z.plus) * ci;
        for (int e = 0; e < 4; ++e) {
            a[e][j] = av(e / 2, e % 2);
            k[e][j] = kv(e / 2, e % 2);
        }
    }
    std::vector<PeriodicFunction> A, K;
    std::vector<Antiderivative> B;
    for (int e = 0; e < 4; ++e) {
        A.push_back(from_samples(a[e], p));
        K.push_back(from_samples(k[e], p));
        B.push_back(antiderivative(A.back()));
    }
    // int_0^{np} f(t) (mean t + F(t)) dt
    auto int_fb = [&](const PeriodicFunction& f, const Antiderivative& b) {
        return b.mean * first_moment(f, n) + static_cast<double>(n) * integral_of_product(f, b.periodic);
    };
    DualRoute out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.X(i, j) = -I * static_cast<double>(n) * A[2 * i + j].quadrature();
            cplx comm = 0.0;
            for (int q = 0; q < 2; ++q) {
                comm += int_fb(A[2 * i + q], B[2 * q + j]) - int_fb(A[2 * q + j], B[2 * i + q]);
            }
            out.Y(i, j) = 0.5 * (comm - static_cast<double>(n) * K[2 * i + j].quadrature());
        }
    }
    return out;
}

std::string to_string(ClosingMode mode) { return mode == ClosingMode::nil_cylinder ? "nil_cylinder" : "cmc_L3"; }

bool ClosingReport::passed() const {
    return pass_first && pass_second && (mode == ClosingMode::nil_cylinder ? pass_third : pass_cmc);
}

ClosingReport closing_report(const FrameData& frame, const PotentialData& pot, int n, ClosingMode mode,
                             const IntegrationOptions& options, const ClosingTolerances& tol) {
    if (n < 1) throw Error("cover index must be positive");
    ClosingReport r;
    r.mode = mode;
    r.n = n;
    r.order = options.order;
    r.steps_per_period = options.steps_per_period;
    r.tol = tol;

    const Zeta zeta(pot);
    const auto run = integrate_real_axis(zeta, n * pot.period, options.steps_per_period * n, options.order);
    const LoopMatrix& M = run.end;
    const auto fine = integrate_real_axis(zeta, n * pot.period, 2 * options.steps_per_period * n, options.order);
    r.frame_error_estimate = (M - fine.end).wiener_norm();
    const Mat2 M1 = M.eval_at(1.0);
    const double rp = entry_norm(M1 - Mat2::Identity());
    const double rm = entry_norm(M1 + Mat2::Identity());
    r.monodromy_residual_at_1 = std::min(rp, rm);
    r.monodromy_sign = rp <= rm ? 1 : -1;
    r.monodromy_tail = entry_norm(M[M.order()]) + entry_norm(M[-M.order()]);
    r.monodromy_reality = reality_residual(M);
    r.monodromy_hermitian_defect = hermitian_defect(M);

    const auto alpha = alpha_of(frame, pot);
    r.second_residual = static_cast<double>(n) * alpha.quadrature();
    r.cmc_alpha_residual = r.second_residual;
    r.cmc_beta_residual = n * beta_of(frame, pot).quadrature().real();
    r.cmc_beta_re_residual = n * beta_re_of(frame, pot).quadrature().real();
    const auto ell = ell_of(alpha);
    r.ell_closed = ell.closed();
    if (r.ell_closed) {
        const auto th = third_closing_residual(frame, pot, n);
        r.third_lhs = th.lhs;
        r.third_rhs = th.rhs;
        r.area_ell = th.area_ell;
        r.area_m = th.area_m;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.third_lhs = r.third_rhs = r.area_ell = nan;
        r.area_m = signed_area(m_of(frame));
    }

    const Mat2 X = X_of(M).eval_at(1.0);
    const Mat2 Y = Y_of(M).eval_at(1.0);
    r.X_offdiag_norm = std::abs(X(0, 1)) + std::abs(X(1, 0));
    r.X_diag_norm = std::abs(X(0, 0)) + std::abs(X(1, 1));
    r.Y_diag_norm = std::abs(Y(0, 0)) + std::abs(Y(1, 1));
    r.X_alpha_cross =
        std::abs(X(0, 1) - I * r.second_residual) + std::abs(X(1, 0) + I * std::conj(r.second_residual));
    r.Y_third_cross = r.ell_closed ? std::abs(Y(0, 0) + I * (r.third_lhs - r.third_rhs))
                                   : std::numeric_limits<double>::quiet_NaN();
    const auto dual = dual_route(frame, pot, n);
    r.dual_X_residual = entry_norm(X - dual.X);
    r.dual_Y_residual = entry_norm(Y - dual.Y);

    r.pass_first = r.monodromy_residual_at_1 <= tol.monodromy;
    r.pass_second = std::abs(r.second_residual) <= tol.closing;
    r.pass_third = r.ell_closed && std::abs(r.third_lhs - r.third_rhs) <= tol.third_direct &&
                   std::abs(r.area_ell - r.area_m) <= tol.closing;
    r.pass_cmc = std::abs(r.cmc_alpha_residual) <= tol.closing && std::abs(r.cmc_beta_residual) <= tol.closing;
    r.pass_monodromy_derivatives = mode == ClosingMode::nil_cylinder
                                       ? (r.X_offdiag_norm <= tol.derivative && r.Y_diag_norm <= tol.derivative)
                                       : (r.X_offdiag_norm + r.X_diag_norm <= tol.derivative);
    r.pass_dual = r.dual_X_residual <= tol.derivative && r.dual_Y_residual <= tol.derivative;
    return r;
}

}  // namespace nilcyl
