#include "netjacobi/spineode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace netjacobi::spineode {

double ode_rhs(const SpineParams& p, double r, double g, double dg) {
    return -(((p.m - 1) / r - r) * dg + (-p.mu / (r * r) + 1.0 - p.lambda) * g) / (1.0 + r * r);
}

double weight_h(const SpineParams& p, double r) {
    return std::pow(r, p.m - 1) * std::pow(1.0 + r * r, -0.5 * p.m);
}

namespace {

struct State {
    double g, dg;
};

State ode_f(const SpineParams& p, double r, const State& y) {
    return {y.dg, ode_rhs(p, r, y.g, y.dg)};
}

State axpy(const State& y, double h, const State& k) { return {y.g + h * k.g, y.dg + h * k.dg}; }

}  // namespace

RadialTrajectory radial_ode_solve(const SpineParams& params, double g0, double dg0, double r0,
                                  double r1, const SolveOptions& opts) {
    if (r0 <= 0) throw OdeError("radial_ode_solve: r0 must be positive");
    if (r1 <= r0) throw OdeError("radial_ode_solve: empty interval");
    if (params.m < 1) throw OdeError("radial_ode_solve: m must be >= 1");

    RadialTrajectory traj;
    traj.params = params;
    const long n = std::lround(std::ceil((r1 - r0) * opts.samples_per_unit));
    const double h_out = (r1 - r0) / static_cast<double>(n);
    traj.step = h_out;
    traj.r.reserve(static_cast<size_t>(n) + 1);
    traj.gamma.reserve(static_cast<size_t>(n) + 1);
    traj.dgamma.reserve(static_cast<size_t>(n) + 1);

    // Dormand-Prince 5(4)
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    State y{g0, dg0};
    double r = r0;
    traj.r.push_back(r);
    traj.gamma.push_back(y.g);
    traj.dgamma.push_back(y.dg);

    double h = h_out;
    long steps = 0;
    for (long i = 1; i <= n; ++i) {
        const double target = r0 + h_out * static_cast<double>(i);
        while (r < target - 1e-14 * target) {
            if (++steps > opts.max_steps)
                throw OdeError("radial_ode_solve: step limit exceeded at r = " +
                               std::to_string(r));
            h = std::min(h, target - r);
            const State k1 = ode_f(params, r, y);
            const State k2 = ode_f(params, r + c2 * h, axpy(y, h * a21, k1));
            const State k3 =
                ode_f(params, r + c3 * h, axpy(axpy(y, h * a31, k1), h * a32, k2));
            const State k4 = ode_f(
                params, r + c4 * h,
                axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3));
            const State k5 = ode_f(params, r + c5 * h,
                                   axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3),
                                        h * a54, k4));
            const State k6 = ode_f(
                params, r + h,
                axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3), h * a64, k4),
                     h * a65, k5));
            State y5{y.g + h * (b1 * k1.g + b3 * k3.g + b4 * k4.g + b5 * k5.g + b6 * k6.g),
                     y.dg + h * (b1 * k1.dg + b3 * k3.dg + b4 * k4.dg + b5 * k5.dg + b6 * k6.dg)};
            const State k7 = ode_f(params, r + h, y5);
            traj.rhs_evals += 7;
            const double err_g =
                h * (e1 * k1.g + e3 * k3.g + e4 * k4.g + e5 * k5.g + e6 * k6.g + e7 * k7.g);
            const double err_dg =
                h * (e1 * k1.dg + e3 * k3.dg + e4 * k4.dg + e5 * k5.dg + e6 * k6.dg + e7 * k7.dg);
            const double sc_g = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.g), std::abs(y5.g));
            const double sc_dg =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y.dg), std::abs(y5.dg));
            const double err = std::sqrt(0.5 * (std::pow(err_g / sc_g, 2) +
                                                std::pow(err_dg / sc_dg, 2)));
            if (err <= 1.0) {
                r += h;
                y = y5;
            }
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
            h *= fac;
            if (h < 1e-12 * std::max(1.0, r))
                throw OdeError("radial_ode_solve: step rejection cascade, smallest reached r = " +
                               std::to_string(r));
        }
        r = target;
        traj.r.push_back(r);
        traj.gamma.push_back(y.g);
        traj.dgamma.push_back(y.dg);
        if (h <= 0 || !std::isfinite(h)) h = h_out;
    }
    return traj;
}

double RadialTrajectory::value(double x) const {
    if (r.empty()) throw OdeError("trajectory is empty");
    if (x <= r.front()) return gamma.front();
    if (x >= r.back()) return gamma.back();
    const double t = (x - r.front()) / step;
    const size_t i = std::min(static_cast<size_t>(t), r.size() - 2);
    const double s = (x - r[i]) / step;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * gamma[i] + h10 * step * dgamma[i] + h01 * gamma[i + 1] +
           h11 * step * dgamma[i + 1];
}

double RadialTrajectory::deriv(double x) const {
    if (r.empty()) throw OdeError("trajectory is empty");
    if (x <= r.front()) return dgamma.front();
    if (x >= r.back()) return dgamma.back();
    const double t = (x - r.front()) / step;
    const size_t i = std::min(static_cast<size_t>(t), r.size() - 2);
    const double s = (x - r[i]) / step;
    const double g00 = 6 * s * (s - 1) / step, g10 = (1 - 4 * s + 3 * s * s);
    const double g01 = -6 * s * (s - 1) / step, g11 = s * (3 * s - 2);
    return g00 * gamma[i] + g10 * dgamma[i] + g01 * gamma[i + 1] + g11 * dgamma[i + 1];
}

double RadialTrajectory::fd_residual() const {
    if (r.size() < 5) throw OdeError("fd_residual: too few samples");
    double worst = 0.0;
    const double h = step;
    for (size_t i = 2; i + 2 < r.size(); ++i) {
        const double d1 =
            (gamma[i - 2] - 8 * gamma[i - 1] + 8 * gamma[i + 1] - gamma[i + 2]) / (12 * h);
        const double d2 = (-gamma[i - 2] + 16 * gamma[i - 1] - 30 * gamma[i] +
                           16 * gamma[i + 1] - gamma[i + 2]) /
                          (12 * h * h);
        const double rr = r[i];
        const double res = (1 + rr * rr) * d2 + ((params.m - 1) / rr - rr) * d1 +
                           (-params.mu / (rr * rr) + 1 - params.lambda) * gamma[i];
        const double scale =
            (1 + rr * rr) * (1.0 + std::abs(gamma[i]) + std::abs(dgamma[i]));
        worst = std::max(worst, std::abs(res) / scale);
    }
    return worst;
}

double RadialTrajectory::divergence_residual() const {
    if (r.size() < 5) throw OdeError("divergence_residual: too few samples");
    std::vector<double> w(r.size());
    for (size_t i = 0; i < r.size(); ++i) w[i] = weight_h(params, r[i]) * dgamma[i];
    double worst = 0.0;
    for (size_t i = 2; i + 2 < r.size(); ++i) {
        const double dw = (w[i - 2] - 8 * w[i - 1] + 8 * w[i + 1] - w[i + 2]) / (12 * step);
        const double rr = r[i];
        const double h = weight_h(params, rr);
        const double res =
            dw + h / (1 + rr * rr) * (-params.mu / (rr * rr) + 1 - params.lambda) * gamma[i];
        const double scale = h * (1.0 + std::abs(gamma[i]) + std::abs(dgamma[i]));
        worst = std::max(worst, std::abs(res) / scale);
    }
    return worst;
}

// ---------------- polynomials & spine PDE ----------------

void Polynomial::add_term(const std::vector<int>& exponents, double coeff) {
    if (static_cast<int>(exponents.size()) != vars_)
        throw OdeError("Polynomial: exponent tuple has wrong arity");
    if (coeff == 0.0) return;
    terms_[exponents] += coeff;
    if (terms_[exponents] == 0.0) terms_.erase(exponents);
}

int Polynomial::degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
        int d = 0;
        for (int k : e) d += k;
        deg = std::max(deg, d);
    }
    return deg;
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[static_cast<size_t>(var)] == 0) continue;
        auto e2 = e;
        --e2[static_cast<size_t>(var)];
        out.add_term(e2, c * e[static_cast<size_t>(var)]);
    }
    return out;
}

Polynomial Polynomial::multiply_by_var(int var) const {
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) {
        auto e2 = e;
        ++e2[static_cast<size_t>(var)];
        out.add_term(e2, c);
    }
    return out;
}

double Polynomial::eval(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != vars_) throw OdeError("Polynomial::eval: bad point arity");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int v = 0; v < vars_; ++v)
            for (int k = 0; k < e[static_cast<size_t>(v)]; ++k) t *= z[static_cast<size_t>(v)];
        s += t;
    }
    return s;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

Polynomial Polynomial::scaled(double f) const {
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) out.add_term(e, c * f);
    return out;
}

Polynomial spine_pde_apply(double lambda, const Polynomial& phi) {
    const int m = phi.vars();
    Polynomial out = phi.scaled(1.0 - lambda);
    for (int j = 0; j < m; ++j) {
        const Polynomial dj = phi.derivative(j);
        out += dj.multiply_by_var(j).scaled(-1.0);
        for (int k = 0; k < m; ++k) {
            const Polynomial djk = dj.derivative(k);
            if (j == k) out += djk;
            out += djk.multiply_by_var(j).multiply_by_var(k);
        }
    }
    return out;
}

double spine_pde_residual(int m, double lambda, const Polynomial& phi,
                          const std::vector<std::vector<double>>& sample_points) {
    if (phi.vars() != m) throw OdeError("spine_pde_residual: polynomial arity != m");
    if (phi.degree() > 4) throw OdeError("spine_pde_residual: degree > 4 unsupported");
    const Polynomial res = spine_pde_apply(lambda, phi);
    double worst = 0.0;
    for (const auto& z : sample_points) worst = std::max(worst, std::abs(res.eval(z)));
    return worst;
}

// ---------------- Caccioppoli ----------------

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

CaccioppoliResult caccioppoli_check(const RadialTrajectory& traj, double rho) {
    if (rho < 4.0) throw OdeError("caccioppoli_check: rho must be >= 4");
    if (!traj.covers(rho / 2, 4 * rho))
        throw OdeError("caccioppoli_check: trajectory does not cover [rho/2, 4 rho]");
    const int panels = 1 << 12;
    CaccioppoliResult out;
    out.lhs = simpson([&](double x) { const double d = traj.deriv(x); return d * d; }, rho,
                      2 * rho, panels);
    out.rhs = simpson([&](double x) { const double g = traj.value(x); return g * g / (x * x); },
                      rho / 2, 4 * rho, panels);
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
    return out;
}

std::vector<SweepCell> caccioppoli_sweep(const SweepOptions& opts) {
    std::vector<SweepCell> cells;
    const double rho_min = *std::min_element(opts.rhos.begin(), opts.rhos.end());
    const double rho_max = *std::max_element(opts.rhos.begin(), opts.rhos.end());
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    for (int m : opts.ms)
        for (double lam : opts.lambdas)
            for (double mu : opts.mus) {
                SpineParams p{m, lam, mu};
                std::vector<SweepCell> row;
                for (double rho : opts.rhos) row.push_back({p, rho, 0.0, caccioppoli_bound(p), 0});
                SolveOptions sopts;
                sopts.samples_per_unit = 64;  // quadrature only; Hermite error ~ h^4
                for (int t = 0; t < opts.trials; ++t) {
                    const double g0 = gauss(rng), dg0 = gauss(rng);
                    const RadialTrajectory traj =
                        radial_ode_solve(p, g0, dg0, rho_min / 2, 4 * rho_max, sopts);
                    for (auto& cell : row) {
                        const auto res = caccioppoli_check(traj, cell.rho);
                        cell.max_ratio = std::max(cell.max_ratio, res.ratio);
                        ++cell.trials;
                    }
                }
                cells.insert(cells.end(), row.begin(), row.end());
            }
    return cells;
}

std::string trajectory_csv(const RadialTrajectory& traj) {
    std::ostringstream os;
    os << "r,gamma,dgamma\n";
    char buf[128];
    for (size_t i = 0; i < traj.r.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", traj.r[i], traj.gamma[i],
                      traj.dgamma[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace netjacobi::spineode
