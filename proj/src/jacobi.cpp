#include "netjacobi/jacobi.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace netjacobi::jacobi {

using net::NetError;

// ---------------- mode basis ----------------

double phi1(double lambda, double t) {
    if (lambda > 1e-30) {
        const double w = std::sqrt(lambda);
        return std::sin(w * t) / w;
    }
    if (lambda < -1e-30) {
        const double w = std::sqrt(-lambda);
        return std::sinh(w * t) / w;
    }
    return t;
}

double phi0(double lambda, double t) {
    if (lambda > 1e-30) return std::cos(std::sqrt(lambda) * t);
    if (lambda < -1e-30) return std::cosh(std::sqrt(-lambda) * t);
    return 1.0;
}

double dphi1(double lambda, double t) { return phi0(lambda, t); }
double dphi0(double lambda, double t) { return -lambda * phi1(lambda, t); }

namespace {

// sin(xL)/x and (1-cos(xL))/x, stable through x = 0
double sinc_l(double x, double L) {
    const double xl = x * L;
    if (std::abs(xl) < 1e-4) return L * (1.0 - xl * xl / 6.0 * (1.0 - xl * xl / 20.0));
    return std::sin(xl) / x;
}
double cosc_l(double x, double L) {
    const double xl = x * L;
    if (std::abs(xl) < 1e-4) return x * L * L / 2.0 * (1.0 - xl * xl / 12.0 * (1.0 - xl * xl / 30.0));
    return (1.0 - std::cos(xl)) / x;
}

}  // namespace

ArcPairIntegrals arc_pair_integrals(double l1, double l2, double L) {
    if (l1 < -1e-30 || l2 < -1e-30) {
        // hyperbolic branch: only the same-frequency case is used (diagnostics)
        if (std::abs(l1 - l2) > 1e-12 * std::max(std::abs(l1), std::abs(l2)))
            throw NetError("arc_pair_integrals: mixed negative frequencies unsupported");
        const double w = std::sqrt(-l1);
        const double sh = std::sinh(w * L), ch = std::cosh(w * L);
        ArcPairIntegrals out{};
        out.i00 = (sh * ch / w + L) / 2.0;
        out.i11 = ((sh * ch / w - L) / 2.0) / (-l1);
        out.i10 = out.i01 = sh * sh / (2.0 * w * w);
        return out;
    }
    const bool z1 = l1 <= 1e-30, z2 = l2 <= 1e-30;
    const double p = z1 ? 0.0 : std::sqrt(l1);
    const double q = z2 ? 0.0 : std::sqrt(l2);
    ArcPairIntegrals out{};
    if (z1 && z2) {
        out.i11 = L * L * L / 3.0;
        out.i10 = out.i01 = L * L / 2.0;
        out.i00 = L;
        return out;
    }
    if (z1) {  // phi(l1) = {t, 1}
        if (q * L < 1e-2) {
            // series in l2; the closed forms cancel catastrophically here
            const double L2 = L * L;
            out.i11 = L * L2 / 3.0 * (1.0 - l2 * L2 / 10.0 + l2 * l2 * L2 * L2 / 280.0);
            out.i10 = L2 / 2.0 * (1.0 - l2 * L2 / 4.0 + l2 * l2 * L2 * L2 / 72.0);
            out.i01 = L2 / 2.0 * (1.0 - l2 * L2 / 12.0 + l2 * l2 * L2 * L2 / 360.0);
        } else {
            out.i11 = (std::sin(q * L) - q * L * std::cos(q * L)) / (q * q * q);
            out.i10 = L * std::sin(q * L) / q - cosc_l(q, L) / q;
            out.i01 = cosc_l(q, L) / q;
        }
        out.i00 = sinc_l(q, L);
        return out;
    }
    if (z2) {
        ArcPairIntegrals sw = arc_pair_integrals(l2, l1, L);
        out.i11 = sw.i11;
        out.i10 = sw.i01;
        out.i01 = sw.i10;
        out.i00 = sw.i00;
        return out;
    }
    if (p * L < 1e-2 && q * L < 1e-2) {
        // both frequencies tiny: double series
        const double a = l1, b = l2, L2 = L * L;
        out.i11 = L * L2 / 3.0 - (a + b) * L2 * L2 * L / 30.0 +
                  (a * b / 252.0 + (a * a + b * b) / 840.0) * std::pow(L, 7);
        out.i10 = L2 / 2.0 - (a / 6.0 + b / 2.0) * L2 * L2 / 4.0 +
                  (a * a / 120.0 + a * b / 12.0 + b * b / 24.0) * L2 * L2 * L2 / 6.0;
        out.i01 = L2 / 2.0 - (b / 6.0 + a / 2.0) * L2 * L2 / 4.0 +
                  (b * b / 120.0 + a * b / 12.0 + a * a / 24.0) * L2 * L2 * L2 / 6.0;
        out.i00 = L - (a + b) * L2 * L / 6.0 +
                  (a * b / 4.0 + (a * a + b * b) / 24.0) * L2 * L2 * L / 5.0;
        return out;
    }
    if (p * L < 1e-2) {
        // expand the small frequency; moments of sin/cos at the large one
        // J_k = int t^k cos(q t), S_k = int t^k sin(q t) over [0, L]
        double J[6], S[6], Lk = 1.0;
        J[0] = sinc_l(q, L);
        S[0] = cosc_l(q, L);
        const double sq = std::sin(q * L), cq = std::cos(q * L);
        for (int k = 1; k <= 5; ++k) {
            Lk *= L;
            J[k] = Lk * sq / q - k / q * S[k - 1];
            S[k] = -Lk * cq / q + k / q * J[k - 1];
        }
        const double a = l1;
        out.i11 = (S[1] - a / 6.0 * S[3] + a * a / 120.0 * S[5]) / q;
        out.i10 = J[1] - a / 6.0 * J[3] + a * a / 120.0 * J[5];
        out.i01 = (S[0] - a / 2.0 * S[2] + a * a / 24.0 * S[4]) / q;
        out.i00 = J[0] - a / 2.0 * J[2] + a * a / 24.0 * J[4];
        return out;
    }
    if (q * L < 1e-2) {
        ArcPairIntegrals sw = arc_pair_integrals(l2, l1, L);
        out.i11 = sw.i11;
        out.i10 = sw.i01;
        out.i01 = sw.i10;
        out.i00 = sw.i00;
        return out;
    }
    out.i11 = (sinc_l(p - q, L) - sinc_l(p + q, L)) / (2.0 * p * q);
    out.i00 = (sinc_l(p - q, L) + sinc_l(p + q, L)) / 2.0;
    out.i10 = (cosc_l(p + q, L) + cosc_l(p - q, L)) / (2.0 * p);
    out.i01 = (cosc_l(p + q, L) + cosc_l(q - p, L)) / (2.0 * q);
    return out;
}

// ---------------- frames & fields ----------------

NetFrames::NetFrames(const GeodesicNet& net) {
    const int D = net.ambient_dim;
    normal_dim_ = D - 2;
    frames_.reserve(net.arcs.size());
    for (int e = 0; e < net.arc_count(); ++e) {
        const Vec anchor = net.point_on_arc(e, 0.0);
        const Vec& t = net.arcs[static_cast<size_t>(e)].tangent_at_from;
        Mat cand(D, D + 2);
        cand.col(0) = anchor;
        cand.col(1) = t;
        cand.rightCols(D) = Mat::Identity(D, D);
        Mat full = geom::orthonormalize(cand, 1e-8);
        if (full.cols() != D) throw NetError("NetFrames: degenerate arc plane");
        frames_.push_back(full.rightCols(D - 2));
    }
}

double ArcFieldCoefficients::frame_defect(const GeodesicNet& net) const {
    double worst = 0.0;
    for (int e = 0; e < net.arc_count(); ++e) {
        const Vec anchor = net.point_on_arc(e, 0.0);
        const Vec& t = net.arcs[static_cast<size_t>(e)].tangent_at_from;
        for (const Vec* v : {&a[static_cast<size_t>(e)], &b[static_cast<size_t>(e)]}) {
            worst = std::max(worst, std::abs(anchor.dot(*v)));
            worst = std::max(worst, std::abs(t.dot(*v)));
        }
    }
    return worst;
}

Vec to_coeffs(const NetFrames& frames, const ArcFieldCoefficients& field) {
    const int na = frames.coeffs_per_arc(), nd = frames.normal_dim();
    Vec x(frames.coeff_count());
    for (int e = 0; e < frames.arc_count(); ++e) {
        x.segment(na * e, nd) = frames.frame(e).transpose() * field.a[static_cast<size_t>(e)];
        x.segment(na * e + nd, nd) = frames.frame(e).transpose() * field.b[static_cast<size_t>(e)];
    }
    return x;
}

ArcFieldCoefficients from_coeffs(const NetFrames& frames, const GeodesicNet& net, double lambda,
                                 const Vec& coeffs) {
    const int na = frames.coeffs_per_arc(), nd = frames.normal_dim();
    ArcFieldCoefficients f;
    f.lambda = lambda;
    f.a.reserve(net.arcs.size());
    f.b.reserve(net.arcs.size());
    for (int e = 0; e < frames.arc_count(); ++e) {
        f.a.push_back(frames.frame(e) * coeffs.segment(na * e, nd));
        f.b.push_back(frames.frame(e) * coeffs.segment(na * e + nd, nd));
    }
    return f;
}

double l2_inner(const GeodesicNet& net, const ArcFieldCoefficients& u,
                const ArcFieldCoefficients& w) {
    double s = 0.0;
    for (int e = 0; e < net.arc_count(); ++e) {
        const auto I =
            arc_pair_integrals(u.lambda, w.lambda, net.arcs[static_cast<size_t>(e)].length);
        const Vec &ua = u.a[static_cast<size_t>(e)], &ub = u.b[static_cast<size_t>(e)];
        const Vec &wa = w.a[static_cast<size_t>(e)], &wb = w.b[static_cast<size_t>(e)];
        s += I.i11 * ua.dot(wa) + I.i10 * ua.dot(wb) + I.i01 * ub.dot(wa) + I.i00 * ub.dot(wb);
    }
    return s;
}

double l2_inner_deriv(const GeodesicNet& net, const ArcFieldCoefficients& u,
                      const ArcFieldCoefficients& w) {
    // u' = a phi0 - lambda b phi1: same basis with (a,b) -> (-lambda b, a)
    ArcFieldCoefficients du = u, dw = w;
    for (size_t e = 0; e < u.a.size(); ++e) {
        du.a[e] = -u.lambda * u.b[e];
        du.b[e] = u.a[e];
        dw.a[e] = -w.lambda * w.b[e];
        dw.b[e] = w.a[e];
    }
    return l2_inner(net, du, dw);
}

double FieldBasis::gram_defect(const GeodesicNet& net) const {
    double worst = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = i; j < dim(); ++j) {
            const double g = l2_inner(net, fields[static_cast<size_t>(i)],
                                      fields[static_cast<size_t>(j)]);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

// ---------------- system assembly ----------------

namespace {

void require_junction_net(const GeodesicNet& net, double stationarity_tol) {
    if (net.closed_circle || net.vertex_count() == 0)
        throw NetError("compatibility system: net has no junctions");
    for (size_t v = 0; v < net.incidence.size(); ++v)
        if (net.incidence[v].size() != 3)
            throw NetError("compatibility system: vertex " + std::to_string(v) +
                           " is not 3-valent");
    const double r = net::stationarity_residual(net);
    if (r > stationarity_tol) {
        std::ostringstream os;
        os << "compatibility system: net is not stationary (residual " << r << ")";
        throw NetError(os.str());
    }
}

double end_theta(const GeodesicNet& net, int arc, int end) {
    return end == 0 ? 0.0 : net.arcs[static_cast<size_t>(arc)].length;
}

}  // namespace

CompatibilitySystem compatibility_system(const GeodesicNet& net, double lambda,
                                         const SystemOptions& opts) {
    if (!opts.skip_checks) require_junction_net(net, opts.stationarity_tol);
    const int D = net.ambient_dim;
    const int nd = D - 2, na = 2 * nd;
    const int nA = net.arc_count(), nV = net.vertex_count();
    NetFrames frames(net);

    int sum_val = 0;
    for (const auto& inc : net.incidence) sum_val += static_cast<int>(inc.size());
    const int rows = nd * sum_val + (opts.include_c1 ? D * nV : 0);
    const int cols = na * nA + D * nV;

    CompatibilitySystem sys;
    sys.lambda = lambda;
    sys.arc_coeff_count = na * nA;
    sys.vertex_count = nV;
    sys.ambient_dim = D;
    sys.has_c1_rows = opts.include_c1;
    sys.matrix = Mat::Zero(rows, cols);
    Mat& M = sys.matrix;

    int row = 0;
    for (int v = 0; v < nV; ++v) {
        auto inc = net.incidence[static_cast<size_t>(v)];
        std::sort(inc.begin(), inc.end());
        // C0: v(i)(p) - pi_{P(i)^perp}(V_p) = 0, in the arc frame
        for (auto [e, end] : inc) {
            const double th = end_theta(net, e, end);
            const double s = phi1(lambda, th), c = phi0(lambda, th);
            for (int r = 0; r < nd; ++r) {
                M(row, na * e + r) = s;
                M(row, na * e + nd + r) = c;
                M.block(row, na * nA + D * v, 1, D) = -frames.frame(e).col(r).transpose();
                ++row;
            }
        }
        if (opts.include_c1) {
            // C1: sum over incident arcs of the outer-conormal derivative
            for (auto [e, end] : inc) {
                const double th = end_theta(net, e, end);
                const double sgn = (end == 0) ? -1.0 : 1.0;
                const double ds = sgn * dphi1(lambda, th), dc = sgn * dphi0(lambda, th);
                for (int r = 0; r < nd; ++r) {
                    M.block(row, 0, D, cols).col(na * e + r) += ds * frames.frame(e).col(r);
                    M.block(row, 0, D, cols).col(na * e + nd + r) += dc * frames.frame(e).col(r);
                }
            }
            row += D;
        }
    }
    return sys;
}

double compatibility_residual(const GeodesicNet& net, const ArcFieldCoefficients& field) {
    NetFrames frames(net);
    const int D = net.ambient_dim;
    double worst = field.frame_defect(net);
    for (int v = 0; v < net.vertex_count(); ++v) {
        const auto& inc = net.incidence[static_cast<size_t>(v)];
        // best single V_p for the C0 conditions
        Mat A(static_cast<Eigen::Index>(inc.size()) * (D - 2), D);
        Vec y(A.rows());
        Eigen::Index r0 = 0;
        for (auto [e, end] : inc) {
            const double th = end_theta(net, e, end);
            A.middleRows(r0, D - 2) = frames.frame(e).transpose();
            y.segment(r0, D - 2) = frames.frame(e).transpose() * field.eval(e, th);
            r0 += D - 2;
        }
        const Vec vp = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
        worst = std::max(worst, (A * vp - y).lpNorm<Eigen::Infinity>());
        Vec c1 = Vec::Zero(D);
        for (auto [e, end] : inc) {
            const double sgn = (end == 0) ? -1.0 : 1.0;
            c1 += sgn * field.deriv(e, end_theta(net, e, end));
        }
        worst = std::max(worst, c1.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

namespace {

// G-orthonormal basis for the span of the given coefficient columns, with the
// rank cut at relative eigenvalue tolerance.
Mat gram_orthonormalize(const GeodesicNet& net, const NetFrames& frames, double lambda,
                        const Mat& cols, double rel_tol = 1e-12) {
    if (cols.cols() == 0) return cols;
    const int na = frames.coeffs_per_arc(), nd = frames.normal_dim();
    // Gram on coefficient space is block-diagonal per arc
    Mat gcols = cols;
    for (int e = 0; e < frames.arc_count(); ++e) {
        const auto I = arc_pair_integrals(lambda, lambda,
                                          net.arcs[static_cast<size_t>(e)].length);
        for (int r = 0; r < nd; ++r) {
            const auto ra = cols.row(na * e + r), rb = cols.row(na * e + nd + r);
            gcols.row(na * e + r) = I.i11 * ra + I.i10 * rb;
            gcols.row(na * e + nd + r) = I.i10 * ra + I.i00 * rb;
        }
    }
    Mat C = cols.transpose() * gcols;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (C + C.transpose()));
    const Vec ev = es.eigenvalues();
    const double cut = rel_tol * std::max(ev.maxCoeff(), 1e-300);
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] > cut) keep.push_back(i);
    Mat out(cols.rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) =
            cols * es.eigenvectors().col(keep[k]) / std::sqrt(ev[keep[k]]);
    return out;
}

FieldBasis basis_from_columns(const GeodesicNet& net, const NetFrames& frames, double lambda,
                              const Mat& cols) {
    FieldBasis basis;
    basis.lambda = lambda;
    for (Eigen::Index j = 0; j < cols.cols(); ++j)
        basis.fields.push_back(from_coeffs(frames, net, lambda, cols.col(j)));
    return basis;
}

}  // namespace

FieldBasis system_nullspace_basis(const GeodesicNet& net, double lambda,
                                  const SystemOptions& opts) {
    CompatibilitySystem sys = compatibility_system(net, lambda, opts);
    NetFrames frames(net);
    Eigen::JacobiSVD<Mat> svd(sys.matrix, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = 1e-8 * (s.size() > 0 ? s[0] : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > cut) ++rank;
    const Eigen::Index nullity = sys.matrix.cols() - rank;
    // arc-coefficient block of the nullspace; the V_p gauge directions drop out
    Mat ncols = svd.matrixV().rightCols(nullity).topRows(sys.arc_coeff_count);
    Mat ortho = gram_orthonormalize(net, frames, lambda, ncols);
    return basis_from_columns(net, frames, lambda, ortho);
}

FieldBasis linear_field_basis(const GeodesicNet& net) {
    return system_nullspace_basis(net, 1.0);
}

ArcFieldCoefficients rotation_field(const GeodesicNet& net, const Mat& A) {
    if (A.rows() != net.ambient_dim || A.cols() != net.ambient_dim)
        throw NetError("rotation_field: generator has wrong dimensions");
    const double scale = std::max(1.0, geom::max_abs(A));
    if (geom::max_abs(A + A.transpose()) > 1e-12 * scale)
        throw NetError("rotation_field: generator is not skew-symmetric");
    NetFrames frames(net);
    ArcFieldCoefficients f;
    f.lambda = 1.0;
    for (int e = 0; e < net.arc_count(); ++e) {
        const Mat& B = frames.frame(e);
        const Vec anchor = net.point_on_arc(e, 0.0);
        const Vec& t = net.arcs[static_cast<size_t>(e)].tangent_at_from;
        f.a.push_back(B * (B.transpose() * (A * t)));
        f.b.push_back(B * (B.transpose() * (A * anchor)));
    }
    // the junction vector of the field at a vertex p is A p itself; check the
    // conditions against it (a stationary net makes them hold identically)
    for (int v = 0; v < net.vertex_count(); ++v) {
        const Vec& p = net.vertices[static_cast<size_t>(v)];
        const Vec vp = A * p;
        Vec dsum = Vec::Zero(net.ambient_dim);
        double worst = 0.0;
        for (auto [e, end] : net.incidence[static_cast<size_t>(v)]) {
            const double th = end_theta(net, e, end);
            const Mat& B = frames.frame(e);
            worst = std::max(worst,
                             (B.transpose() * (f.eval(e, th) - vp)).lpNorm<Eigen::Infinity>());
            dsum += (end == 0 ? -1.0 : 1.0) * f.deriv(e, th);
        }
        worst = std::max(worst, dsum.lpNorm<Eigen::Infinity>());
        if (worst > 1e-9 * scale)
            throw NetError("rotation_field: junction conditions fail at vertex " +
                           std::to_string(v) + " (residual " + std::to_string(worst) +
                           "); the net is out of balance");
    }
    return f;
}

RotationSubspace rotation_subspace(const GeodesicNet& net) {
    const int D = net.ambient_dim;
    NetFrames frames(net);
    const auto gens = geom::skew_basis(D);
    Mat cols(frames.coeff_count(), static_cast<Eigen::Index>(gens.size()));
    for (size_t k = 0; k < gens.size(); ++k)
        cols.col(static_cast<Eigen::Index>(k)) = to_coeffs(frames, rotation_field(net, gens[k]));
    Mat ortho = gram_orthonormalize(net, frames, 1.0, cols);
    RotationSubspace out;
    out.basis = basis_from_columns(net, frames, 1.0, ortho);
    out.dim_stabilizer = static_cast<int>(gens.size()) - out.basis.dim();
    return out;
}

IntegrabilityVerdict integrability(const GeodesicNet& net) {
    if (!net::is_polyhedral(net))
        throw NetError("integrability: net is not polyhedral");
    FieldBasis sol = linear_field_basis(net);
    RotationSubspace rot = rotation_subspace(net);

    IntegrabilityVerdict verdict;
    verdict.dim_solutions = sol.dim();
    verdict.dim_rotations = rot.basis.dim();
    verdict.dim_stabilizer = rot.dim_stabilizer;

    // rotation fields must satisfy the junction conditions...
    for (const auto& f : rot.basis.fields)
        verdict.residual = std::max(verdict.residual, compatibility_residual(net, f));
    // ...and lie in the solution span: measure the projection remainder as an
    // explicit field so roundoff does not get amplified by cancellation
    NetFrames frames(net);
    for (const auto& f : rot.basis.fields) {
        Vec rem = to_coeffs(frames, f);
        for (const auto& s : sol.fields)
            rem -= l2_inner(net, f, s) * to_coeffs(frames, s);
        const ArcFieldCoefficients rem_field = from_coeffs(frames, net, 1.0, rem);
        const double defect = std::sqrt(std::max(0.0, l2_inner(net, rem_field, rem_field)));
        if (defect > 1e-8) {
            std::ostringstream os;
            os << "integrability: rotation field escapes the solution space "
               << "(projection defect " << defect << "); system assembly is inconsistent";
            throw NetError(os.str());
        }
    }
    verdict.integrable = (verdict.dim_solutions == verdict.dim_rotations);
    return verdict;
}

LocalSkewResult local_skew_reconstruct(const GeodesicNet& net,
                                       const ArcFieldCoefficients& field, int vertex,
                                       double tol) {
    if (vertex < 0 || vertex >= net.vertex_count())
        throw NetError("local_skew_reconstruct: bad vertex index");
    auto inc = net.incidence[static_cast<size_t>(vertex)];
    if (inc.size() != 3) throw NetError("local_skew_reconstruct: vertex is not 3-valent");
    std::sort(inc.begin(), inc.end());
    const int D = net.ambient_dim;
    const Vec& p = net.vertices[static_cast<size_t>(vertex)];
    NetFrames frames(net);

    std::array<Vec, 3> n, alpha, val;
    for (int j = 0; j < 3; ++j) {
        auto [e, end] = inc[static_cast<size_t>(j)];
        const double th = end_theta(net, e, end);
        n[static_cast<size_t>(j)] = -net.inward_tangent(e, end);
        const double sgn = (end == 0) ? -1.0 : 1.0;
        alpha[static_cast<size_t>(j)] = sgn * field.deriv(e, th);
        val[static_cast<size_t>(j)] = field.eval(e, th);
    }
    double scale = 1.0;
    for (int j = 0; j < 3; ++j)
        scale = std::max({scale, alpha[static_cast<size_t>(j)].norm(),
                          val[static_cast<size_t>(j)].norm()});

    // C1 at the vertex: conormal derivatives must cancel
    const Vec dsum = alpha[0] + alpha[1] + alpha[2];
    if (dsum.norm() > tol * scale)
        throw NetError("local_skew_reconstruct: C1 condition violated at vertex (residual " +
                       std::to_string(dsum.norm()) + ")");
    // C0 at the vertex: values come from one junction vector b, taken in p^perp
    Mat tang = geom::orthonormalize(Mat::Identity(D, D) - p * p.transpose(), 1e-8);
    Mat A0(3 * (D - 2), tang.cols());
    Vec y0(A0.rows());
    for (int j = 0; j < 3; ++j) {
        auto [e, end] = inc[static_cast<size_t>(j)];
        A0.middleRows(static_cast<Eigen::Index>(j) * (D - 2), D - 2) =
            frames.frame(e).transpose() * tang;
        y0.segment(static_cast<Eigen::Index>(j) * (D - 2), D - 2) =
            frames.frame(e).transpose() * val[static_cast<size_t>(j)];
    }
    const Vec bc = A0.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y0);
    if ((A0 * bc - y0).lpNorm<Eigen::Infinity>() > tol * scale)
        throw NetError("local_skew_reconstruct: C0 condition violated at vertex (residual " +
                       std::to_string((A0 * bc - y0).lpNorm<Eigen::Infinity>()) + ")");
    const Vec b = tang * bc;

    geom::TripleInput tri;
    for (int j = 0; j < 3; ++j) {
        tri.omegas[static_cast<size_t>(j)] = n[static_cast<size_t>(j)];
        // clean up roundoff so the extension's preconditions hold exactly enough
        Vec v = alpha[static_cast<size_t>(j)] - dsum / 3.0;
        v -= n[static_cast<size_t>(j)].dot(v) * n[static_cast<size_t>(j)];
        tri.vs[static_cast<size_t>(j)] = v;
    }
    const Mat Ap = geom::skew_extension(tri, 1e-6);
    const Vec w = b - Ap * p;
    Mat A = Ap + w * p.transpose() - p * w.transpose();

    LocalSkewResult out;
    out.generator = A;
    for (int j = 0; j < 3; ++j) {
        auto [e, end] = inc[static_cast<size_t>(j)];
        const Mat& B = frames.frame(e);
        const Vec dv = B * (B.transpose() * (A * n[static_cast<size_t>(j)])) -
                       alpha[static_cast<size_t>(j)];
        const Vec vv = B * (B.transpose() * (A * p)) - val[static_cast<size_t>(j)];
        out.residual = std::max({out.residual, dv.norm(), vv.norm()});
    }
    return out;
}

// ---------------- scalar reduction ----------------

namespace {

// BFS order of vertices starting from vertex 0
std::vector<int> bfs_order(const GeodesicNet& net) {
    std::vector<std::set<int>> adj(static_cast<size_t>(net.vertex_count()));
    for (const auto& a : net.arcs) {
        adj[static_cast<size_t>(a.from)].insert(a.to);
        adj[static_cast<size_t>(a.to)].insert(a.from);
    }
    std::vector<int> order;
    std::vector<bool> seen(static_cast<size_t>(net.vertex_count()), false);
    std::deque<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (int w : adj[static_cast<size_t>(v)])
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = true;
                queue.push_back(w);
            }
    }
    for (bool s : seen)
        if (!s) throw NetError("scalar_reduction: net is disconnected");
    return order;
}

}  // namespace

ScalarReduction scalar_reduction(const GeodesicNet& net, ScalarMode mode, bool with_trace) {
    if (mode == ScalarMode::in_sphere && net.ambient_dim != 3)
        throw NetError("scalar_reduction: in-sphere mode requires ambient dimension 3");
    require_junction_net(net, 1e-8);
    const int nA = net.arc_count(), nV = net.vertex_count();
    const std::vector<int> order = bfs_order(net);

    ScalarReduction out;
    out.matrix = Mat::Zero(3 * nV, 2 * nA);
    Mat& M = out.matrix;
    int row = 0;
    for (int v : order) {
        auto inc = net.incidence[static_cast<size_t>(v)];
        std::sort(inc.begin(), inc.end());
        // value and derivative coefficient rows per incident arc
        std::array<Eigen::RowVector2d, 3> fr, dr;
        std::array<double, 3> eps{};
        std::array<int, 3> arc{};
        for (int j = 0; j < 3; ++j) {
            auto [e, end] = inc[static_cast<size_t>(j)];
            const double th = end_theta(net, e, end);
            fr[static_cast<size_t>(j)] << std::sin(th), std::cos(th);
            dr[static_cast<size_t>(j)] << std::cos(th), -std::sin(th);
            eps[static_cast<size_t>(j)] = (end == 0) ? -1.0 : 1.0;  // n . lhat
            arc[static_cast<size_t>(j)] = e;
        }
        auto put = [&](int r, int j, const Eigen::RowVector2d& c, double w) {
            M.block(r, 2 * arc[static_cast<size_t>(j)], 1, 2) += w * c;
        };
        if (mode == ScalarMode::in_sphere) {
            // sum_j (n . lhat) f(p) = 0 ; f'(i1) = f'(i2) = f'(i3)
            for (int j = 0; j < 3; ++j) put(row, j, fr[static_cast<size_t>(j)], eps[static_cast<size_t>(j)]);
            ++row;
            put(row, 0, dr[0], 1.0);
            put(row, 1, dr[1], -1.0);
            ++row;
            put(row, 1, dr[1], 1.0);
            put(row, 2, dr[2], -1.0);
            ++row;
        } else {
            // f(i1) = f(i2) = f(i3) ; sum_j (n . lhat) f'(p) = 0
            put(row, 0, fr[0], 1.0);
            put(row, 1, fr[1], -1.0);
            ++row;
            put(row, 1, fr[1], 1.0);
            put(row, 2, fr[2], -1.0);
            ++row;
            for (int j = 0; j < 3; ++j) put(row, j, dr[static_cast<size_t>(j)], eps[static_cast<size_t>(j)]);
            ++row;
        }
    }

    {
        Eigen::JacobiSVD<Mat> svd(M);
        const auto& s = svd.singularValues();
        int rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] > 1e-8 * s[0]) ++rank;
        out.nullspace_dim = 2 * nA - rank;
    }

    if (with_trace) {
        // constrained elimination: kill the three arcs at junction 0 and
        // resolve the rest row by row, recording each pivot
        std::set<int> j0;
        for (auto [e, end] : net.incidence[0]) j0.insert(e);
        std::vector<int> cols;
        for (int c = 0; c < 2 * nA; ++c)
            if (!j0.count(c / 2)) cols.push_back(c);
        Mat A(M.rows(), static_cast<Eigen::Index>(cols.size()));
        for (size_t k = 0; k < cols.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = M.col(cols[k]);

        std::vector<std::pair<int, int>> pivots;  // (row, col)
        out.min_pivot = std::numeric_limits<double>::infinity();
        for (int r = 0; r < A.rows(); ++r) {
            Vec rowv = A.row(r);
            for (auto [pr, pc] : pivots) {
                const double f = rowv[pc] / A(pr, pc);
                rowv -= f * A.row(pr).transpose();
            }
            A.row(r) = rowv;
            Eigen::Index c;
            const double mag = rowv.cwiseAbs().maxCoeff(&c);
            if (mag > 1e-9 && pivots.size() < static_cast<size_t>(A.cols())) {
                pivots.push_back({r, static_cast<int>(c)});
                out.trace.push_back({r, static_cast<int>(c), rowv[c]});
                out.min_pivot = std::min(out.min_pivot, std::abs(rowv[c]));
            }
        }
        out.constrained_nullspace_dim = static_cast<int>(A.cols()) - static_cast<int>(pivots.size());
        if (pivots.empty()) out.min_pivot = 0.0;
    }
    return out;
}

int translation_rank(const GeodesicNet& net) {
    NetFrames frames(net);
    const int D = net.ambient_dim;
    Mat T(static_cast<Eigen::Index>(net.arc_count()) * (D - 2), D);
    for (int e = 0; e < net.arc_count(); ++e)
        T.middleRows(static_cast<Eigen::Index>(e) * (D - 2), D - 2) = frames.frame(e).transpose();
    Eigen::JacobiSVD<Mat> svd(T);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > 1e-10 * s[0]) ++rank;
    return rank;
}

int cylinder_L_dim(const GeodesicNet& net, int m) {
    if (m < 0) throw NetError("cylinder_L_dim: m must be nonnegative");
    // the per-column maps of A -> (pi(A e_j))_{i,j} are independent copies of
    // the translation map
    return m * translation_rank(net) + linear_field_basis(net).dim();
}

std::string field_to_json(const ArcFieldCoefficients& field, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    for (size_t e = 0; e < field.a.size(); ++e) {
        nlohmann::json j;
        j["arc"] = e;
        j["a"] = std::vector<double>(field.a[e].data(), field.a[e].data() + field.a[e].size());
        j["b"] = std::vector<double>(field.b[e].data(), field.b[e].data() + field.b[e].size());
        arr.push_back(std::move(j));
    }
    return arr.dump(indent);
}

}  // namespace netjacobi::jacobi
