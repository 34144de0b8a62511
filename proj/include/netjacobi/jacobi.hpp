#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netjacobi/net.hpp"

namespace netjacobi::jacobi {

using geom::Mat;
using geom::Vec;
using net::GeodesicNet;

// ---- mode basis on an arc -------------------------------------------------
//
// Solutions of u'' + lambda u = 0 are spanned by {phi1, phi0} with
//   phi1(lambda, t) = sin(sqrt(lambda) t)/sqrt(lambda)   (-> t at lambda = 0,
//                     sinh(sqrt(-lambda) t)/sqrt(-lambda) for lambda < 0)
//   phi0(lambda, t) = cos / cosh.
// This scaling keeps the system matrix entire in lambda; at lambda = 1 the
// basis is exactly {sin, cos}, at lambda = 0 it is {t, 1}.

double phi1(double lambda, double t);
double phi0(double lambda, double t);
double dphi1(double lambda, double t);  // = phi0
double dphi0(double lambda, double t);  // = -lambda phi1

// integrals over [0, L] of phiA(l1,t) phiB(l2,t); indices 1 = phi1, 0 = phi0
struct ArcPairIntegrals {
    double i11, i10, i01, i00;
};
ArcPairIntegrals arc_pair_integrals(double l1, double l2, double L);

// ---- fields ----------------------------------------------------------------

// Per-arc orthonormal frame of P(i)^perp, fixed by Gram-Schmidt of the
// standard basis against (v_from, tangent_at_from).
class NetFrames {
  public:
    explicit NetFrames(const GeodesicNet& net);
    const Mat& frame(int arc) const { return frames_[static_cast<size_t>(arc)]; }
    int normal_dim() const { return normal_dim_; }  // D - 2
    int coeffs_per_arc() const { return 2 * normal_dim_; }
    int arc_count() const { return static_cast<int>(frames_.size()); }
    int coeff_count() const { return coeffs_per_arc() * arc_count(); }

  private:
    std::vector<Mat> frames_;
    int normal_dim_ = 0;
};

// Field v(i)(t) = a(i) phi1(lambda, t) + b(i) phi0(lambda, t) with ambient
// a(i), b(i) perpendicular to the arc plane P(i).
struct ArcFieldCoefficients {
    double lambda = 1.0;
    std::vector<Vec> a, b;

    Vec eval(int arc, double t) const {
        return a[static_cast<size_t>(arc)] * phi1(lambda, t) +
               b[static_cast<size_t>(arc)] * phi0(lambda, t);
    }
    Vec deriv(int arc, double t) const {
        return a[static_cast<size_t>(arc)] * dphi1(lambda, t) +
               b[static_cast<size_t>(arc)] * dphi0(lambda, t);
    }
    // max over arcs of the projection defect of a, b onto P(i)^perp
    double frame_defect(const GeodesicNet& net) const;
};

// packing between ambient per-arc (a,b) and the frame coefficient vector
Vec to_coeffs(const NetFrames& frames, const ArcFieldCoefficients& field);
ArcFieldCoefficients from_coeffs(const NetFrames& frames, const GeodesicNet& net, double lambda,
                                 const Vec& coeffs);

// L2(Gamma) inner product via the closed-form arc integrals.
double l2_inner(const GeodesicNet& net, const ArcFieldCoefficients& u,
                const ArcFieldCoefficients& w);
// int |u'|^2 over the net (derivative coefficients stay in the same basis)
double l2_inner_deriv(const GeodesicNet& net, const ArcFieldCoefficients& u,
                      const ArcFieldCoefficients& w);

struct FieldBasis {
    double lambda = 1.0;
    std::vector<ArcFieldCoefficients> fields;
    int dim() const { return static_cast<int>(fields.size()); }
    // max |off-diagonal| and max |diagonal - 1| of the L2 Gram matrix
    double gram_defect(const GeodesicNet& net) const;
};

// ---- compatibility system ---------------------------------------------------

// Junction conditions at frequency lambda, with auxiliary per-vertex vectors
// V_p for the C0 condition.  Column layout: per arc [a-coeffs | b-coeffs] in
// the arc frame, then per vertex V_p (D entries).  Row layout: per vertex in
// index order, the C0 rows of each incident arc (arc index order, D-2 rows
// each), then that vertex's D C1 rows.
//
// The map V_p -> (pi_{P(i)^perp} V_p)_i has the 1-dimensional kernel span(p)
// at every 3-valent vertex, so M(lambda) carries a lambda-independent gauge
// kernel of dimension exactly #vertices; solvers skip it.
struct CompatibilitySystem {
    double lambda = 1.0;
    Mat matrix;
    int arc_coeff_count = 0;   // 2(D-2) #arcs
    int vertex_count = 0;
    int ambient_dim = 0;
    bool has_c1_rows = true;
};

struct SystemOptions {
    double stationarity_tol = 1e-8;
    bool include_c1 = true;   // dropping C1 is a diagnostic, not a physical system
    bool skip_checks = false;
};

CompatibilitySystem compatibility_system(const GeodesicNet& net, double lambda = 1.0,
                                         const SystemOptions& opts = {});

// residual of a field against all junction conditions; V_p chosen per vertex
// by least squares from the C0 rows
double compatibility_residual(const GeodesicNet& net, const ArcFieldCoefficients& field);

// Nullspace of the lambda = 1 system with the V_p unknowns projected out,
// orthonormalized in L2(Gamma).  Singular values below 1e-8 sigma_max count
// as zero.
FieldBasis linear_field_basis(const GeodesicNet& net);

// Same computation at an arbitrary frequency (used by the spectral module).
FieldBasis system_nullspace_basis(const GeodesicNet& net, double lambda,
                                  const SystemOptions& opts = {});

// v(i) = pi_{P(i)^perp} o A restricted to the sphere:
// a(i) = pi(A t), b(i) = pi(A v_from).
ArcFieldCoefficients rotation_field(const GeodesicNet& net, const Mat& A);

struct RotationSubspace {
    FieldBasis basis;
    int dim_stabilizer = 0;
};

// Image of so(D) under rotation_field, orthonormal in L2; the kernel of the
// map is the infinitesimal stabilizer of the cone.
RotationSubspace rotation_subspace(const GeodesicNet& net);

struct IntegrabilityVerdict {
    int dim_solutions = 0;
    int dim_rotations = 0;
    int dim_stabilizer = 0;
    bool integrable = false;
    double residual = 0.0;  // worst compatibility residual of rotation fields
};

IntegrabilityVerdict integrability(const GeodesicNet& net);

struct LocalSkewResult {
    Mat generator;
    double residual = 0.0;
};

// Skew A_L acting like the field on all three wedges at the vertex: value and
// conormal derivative of pi_{P(i)^perp} o A_L match the field on each
// incident arc.  Throws if the field violates compatibility at the vertex.
LocalSkewResult local_skew_reconstruct(const GeodesicNet& net,
                                       const ArcFieldCoefficients& field, int vertex,
                                       double tol = 1e-8);

// ---- scalar reduction (k = 1) ----------------------------------------------

enum class ScalarMode {
    in_sphere,         // f = v . (lhat ^ xhat); D = 3 only
    extra_coordinate,  // f = v . e for a coordinate beyond the ambient R^3
};

struct ScalarTraceStep {
    int row = 0;           // row index in assembly order (BFS from junction 0)
    int column = 0;        // pivot column in the reduced unknown numbering
    double coefficient = 0.0;
};

struct ScalarReduction {
    Mat matrix;            // 3#V rows x 2#arcs columns
    int nullspace_dim = 0;
    // trace of the constrained elimination (three arcs of junction 0 zeroed)
    std::vector<ScalarTraceStep> trace;
    int constrained_nullspace_dim = 0;
    double min_pivot = 0.0;
};

ScalarReduction scalar_reduction(const GeodesicNet& net,
                                 ScalarMode mode = ScalarMode::in_sphere,
                                 bool with_trace = false);

// dim of the linear-field space on the cylinder C0 x R^m: the translation
// part A : R^m -> R^D modulo its kernel, plus the cross-sectional fields.
int cylinder_L_dim(const GeodesicNet& net, int m);

// rank of V -> (pi_{P(i)^perp} V)_i
int translation_rank(const GeodesicNet& net);

// ---- export ----------------------------------------------------------------

// JSON list [{"arc": i, "a": [...], "b": [...]}], ambient coordinates.
std::string field_to_json(const ArcFieldCoefficients& field, int indent = 2);

}  // namespace netjacobi::jacobi
