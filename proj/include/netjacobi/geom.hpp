#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace netjacobi::geom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default absolute tolerance on unit-scale data.
constexpr double kTol = 1e-10;

// Orthonormal basis of a subspace of R^D.  Basis vectors are columns.
class Subspace {
  public:
    // Orthonormalizes the given spanning set (modified Gram-Schmidt with
    // re-orthogonalization); near-dependent vectors are dropped.
    explicit Subspace(const std::vector<Vec>& span, double tol = kTol);

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Mat& basis() const { return basis_; }

    Vec project(const Vec& v) const;
    // max |B^T B - I|, for invariant checks
    double gram_defect() const;

  private:
    Mat basis_;
};

Vec project(const Subspace& s, const Vec& v);

// Modified Gram-Schmidt with one re-orthogonalization pass.  Returns an
// orthonormal set spanning the input; rank-deficient directions dropped.
Mat orthonormalize(const Mat& columns, double tol = kTol);

double max_abs(const Mat& m);

bool is_skew(const Mat& a, double tol = 1e-12);

// Basis E_{ij} (i<j) of the skew-symmetric matrices on R^D.
std::vector<Mat> skew_basis(int D);

// 90-degree rotation of an in-plane vector, the plane being oriented by the
// ordered pair (omega1, omega2) via Gram-Schmidt.
Vec rotate90(const Vec& omega1, const Vec& omega2, const Vec& v);

struct TripleInput {
    std::array<Vec, 3> omegas;  // unit, summing to zero
    std::array<Vec, 3> vs;      // v_i perpendicular to omega_i
};

// Validates the 120-degree triple preconditions; returns a description of the
// first violated constraint, or nullopt if all hold.
std::optional<std::string> check_triple(const TripleInput& in, double tol = kTol);

// Skew-symmetric A with A omega_i = v_i and A vanishing on the orthogonal
// complement of span(v_1..v_3, omega_1..omega_3).  Requires sum v_i = 0.
// Construction: A = sum_l (c_l w_l^T - w_l c_l^T) with c_l splitting v_l into
// its in-plane part (scaled by 1/3) and out-of-plane part (scaled by 2/3).
Mat skew_extension(const TripleInput& in, double tol = kTol);

// In-plane u with u . omega_i = alpha_i, given sum alpha_i = 0.
// u = alpha_1 omega_1 + (alpha_2 - alpha_3)/sqrt(3) * rot90(omega_1).
Vec scalar_duality_u(const std::array<double, 3>& alphas,
                     const std::array<Vec, 3>& omegas, double tol = kTol);

struct TripleReport {
    bool sum_zero = false;        // sum_i pi_P(v_i) = 0
    bool common_u_exists = false; // exists u with pi_P(v_i) = pi_{<w_i>^perp}(u) in P
    bool equal_alphas = false;    // in-plane alpha_1 = alpha_2 = alpha_3
    bool perp_sum_zero = false;   // sum_i pi_{P^perp}(v_i) = 0
    bool perp_equal = false;      // out-of-plane components all equal
    std::array<double, 3> alphas{};
};

// Evaluates the in-plane/out-of-plane equivalence relations between the
// triple sums and the alpha coefficients, numerically at the given tolerance.
TripleReport triple_sum_tests(const TripleInput& in, double tol = 1e-9);

}  // namespace netjacobi::geom
