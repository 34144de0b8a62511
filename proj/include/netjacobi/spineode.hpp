#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace netjacobi::spineode {

struct OdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpineParams {
    int m = 1;          // spine dimension
    double lambda = 0;  // eigenvalue parameter
    double mu = 0;      // spherical-harmonic eigenvalue
};

// Radial equation (1+r^2) g'' + ((m-1)/r - r) g' + (-mu/r^2 + 1 - lambda) g = 0,
// equivalently d/dr(h g') + h/(1+r^2) (-mu/r^2 + 1 - lambda) g = 0 with
// h(r) = r^(m-1) (1+r^2)^(-m/2).
double ode_rhs(const SpineParams& p, double r, double g, double dg);
double weight_h(const SpineParams& p, double r);

struct RadialTrajectory {
    SpineParams params;
    std::vector<double> r, gamma, dgamma;   // uniform grid
    double step = 0.0;
    int order = 5;       // Dormand-Prince 5(4)
    long rhs_evals = 0;

    bool covers(double a, double b) const {
        return !r.empty() && r.front() <= a + 1e-12 && r.back() >= b - 1e-12;
    }
    // cubic Hermite interpolation of gamma / gamma'
    double value(double x) const;
    double deriv(double x) const;
    // max |raw ODE| via centered finite differences on the stored samples,
    // relative to the trajectory scale
    double fd_residual() const;
    // max |divergence form| evaluated with the analytic derivative samples
    double divergence_residual() const;
};

struct SolveOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    // uniform output grid density; 128 keeps the 4th-order stencil truncation
    // below the 1e-8 divergence-form tolerance
    int samples_per_unit = 128;
    int max_steps = 2000000;
};

RadialTrajectory radial_ode_solve(const SpineParams& params, double g0, double dg0, double r0,
                                  double r1, const SolveOptions& opts = {});

// ---- spine PDE on polynomials ----------------------------------------------

// sum_jk (delta_jk + z_j z_k) DjDk phi - sum_j z_j Dj phi + (1-lambda) phi
// evaluated exactly for a multivariate polynomial phi of degree <= 4.
class Polynomial {
  public:
    Polynomial(int vars) : vars_(vars) {}
    // exponents.size() == vars
    void add_term(const std::vector<int>& exponents, double coeff);
    int degree() const;
    int vars() const { return vars_; }
    Polynomial derivative(int var) const;
    Polynomial multiply_by_var(int var) const;
    double eval(const std::vector<double>& z) const;
    Polynomial& operator+=(const Polynomial& other);
    Polynomial scaled(double f) const;

  private:
    int vars_;
    std::map<std::vector<int>, double> terms_;
};

Polynomial spine_pde_apply(double lambda, const Polynomial& phi);

double spine_pde_residual(int m, double lambda, const Polynomial& phi,
                          const std::vector<std::vector<double>>& sample_points);

// ---- Caccioppoli-type inequality --------------------------------------------

struct CaccioppoliResult {
    double lhs = 0.0;   // int_rho^2rho (g')^2
    double rhs = 0.0;   // int_{rho/2}^{4rho} g^2 / r^2
    double ratio = 0.0;
};

// Composite Simpson on 2^12 panels per integral, sampled from the trajectory.
// Requires rho >= 4 and coverage of [rho/2, 4 rho].
CaccioppoliResult caccioppoli_check(const RadialTrajectory& traj, double rho);

// Engineering bound for the inequality constant (the sharp constant is not
// available in closed form): cutoff-test constant 50(1+|mu|+|lambda|), times 16 from
// comparing gamma^2/r^2 to gamma^2/(16 rho^2) on [rho/2, 4 rho], times a
// safety factor; observed ratios sit around 1.
inline double caccioppoli_bound(const SpineParams& p) {
    return 1000.0 * (1.0 + std::abs(p.mu) + std::abs(p.lambda));
}

struct SweepCell {
    SpineParams params;
    double rho = 0.0;
    double max_ratio = 0.0;
    double bound = 0.0;
    int trials = 0;
};

struct SweepOptions {
    std::vector<int> ms = {1, 2, 3};
    std::vector<double> lambdas = {0, 1, 2};
    std::vector<double> mus = {0, 2, 6};
    std::vector<double> rhos = {4, 8, 16, 32};
    int trials = 100;
    unsigned long seed = 12345;
};

std::vector<SweepCell> caccioppoli_sweep(const SweepOptions& opts = {});

// CSV dump: r,gamma,dgamma
std::string trajectory_csv(const RadialTrajectory& traj);

}  // namespace netjacobi::spineode
