#include "netjacobi/geom.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace netjacobi::geom {

Mat orthonormalize(const Mat& columns, double tol) {
    const int n = static_cast<int>(columns.cols());
    std::vector<Vec> kept;
    for (int j = 0; j < n; ++j) {
        Vec v = columns.col(j);
        const double scale = v.norm();
        // two MGS passes
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& b : kept) v -= b.dot(v) * b;
        if (v.norm() > tol * std::max(1.0, scale)) kept.push_back(v.normalized());
    }
    Mat out(columns.rows(), static_cast<Eigen::Index>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
    return out;
}

Subspace::Subspace(const std::vector<Vec>& span, double tol) {
    if (span.empty()) throw std::invalid_argument("Subspace: empty spanning set");
    Mat cols(span[0].size(), static_cast<Eigen::Index>(span.size()));
    for (size_t j = 0; j < span.size(); ++j) {
        if (span[j].size() != span[0].size())
            throw std::invalid_argument("Subspace: inconsistent vector dimensions");
        cols.col(static_cast<Eigen::Index>(j)) = span[j];
    }
    basis_ = orthonormalize(cols, tol);
}

Vec Subspace::project(const Vec& v) const {
    if (v.size() != basis_.rows())
        throw std::invalid_argument("Subspace::project: dimension mismatch");
    return basis_ * (basis_.transpose() * v);
}

double Subspace::gram_defect() const {
    Mat g = basis_.transpose() * basis_;
    g -= Mat::Identity(g.rows(), g.cols());
    return max_abs(g);
}

Vec project(const Subspace& s, const Vec& v) { return s.project(v); }

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_skew(const Mat& a, double tol) {
    return max_abs(a + a.transpose()) <= tol;
}

std::vector<Mat> skew_basis(int D) {
    std::vector<Mat> out;
    out.reserve(static_cast<size_t>(D) * (D - 1) / 2);
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            Mat a = Mat::Zero(D, D);
            a(i, j) = 1.0;
            a(j, i) = -1.0;
            out.push_back(std::move(a));
        }
    return out;
}

Vec rotate90(const Vec& omega1, const Vec& omega2, const Vec& v) {
    const Vec e1 = omega1.normalized();
    Vec e2 = omega2 - e1.dot(omega2) * e1;
    const double n2 = e2.norm();
    if (n2 < 1e-12) throw std::invalid_argument("rotate90: degenerate plane");
    e2 /= n2;
    return e1.dot(v) * e2 - e2.dot(v) * e1;
}

std::optional<std::string> check_triple(const TripleInput& in, double tol) {
    const auto fail = [](const std::string& what, double res) {
        std::ostringstream os;
        os << what << " (residual " << res << ")";
        return os.str();
    };
    const Eigen::Index D = in.omegas[0].size();
    for (int i = 0; i < 3; ++i) {
        if (in.omegas[i].size() != D || in.vs[i].size() != D)
            return "dimension mismatch across omegas/vs";
        const double r = std::abs(in.omegas[i].norm() - 1.0);
        if (r > tol) return fail("omega_" + std::to_string(i + 1) + " not unit", r);
    }
    Vec s = in.omegas[0] + in.omegas[1] + in.omegas[2];
    if (s.norm() > tol) return fail("sum of omegas nonzero", s.norm());
    for (int i = 0; i < 3; ++i) {
        const double r = std::abs(in.vs[i].dot(in.omegas[i]));
        if (r > tol) return fail("v_" + std::to_string(i + 1) + " not perpendicular to omega", r);
    }
    return std::nullopt;
}

Mat skew_extension(const TripleInput& in, double tol) {
    if (auto err = check_triple(in, tol))
        throw std::invalid_argument("skew_extension: " + *err);
    Vec vsum = in.vs[0] + in.vs[1] + in.vs[2];
    double vscale = std::max({1.0, in.vs[0].norm(), in.vs[1].norm(), in.vs[2].norm()});
    if (vsum.norm() > tol * vscale) {
        std::ostringstream os;
        os << "skew_extension: sum of vs nonzero (residual " << vsum.norm() << ")";
        throw std::invalid_argument(os.str());
    }
    const Eigen::Index D = in.omegas[0].size();
    const Vec e1 = in.omegas[0].normalized();
    Vec e2 = in.omegas[1] - e1.dot(in.omegas[1]) * e1;
    e2.normalize();
    Mat a = Mat::Zero(D, D);
    for (int l = 0; l < 3; ++l) {
        const Vec vt = e1.dot(in.vs[l]) * e1 + e2.dot(in.vs[l]) * e2;
        const Vec vp = in.vs[l] - vt;
        const Vec c = vt / 3.0 + vp / 1.5;
        a += c * in.omegas[l].transpose() - in.omegas[l] * c.transpose();
    }
    return a;
}

Vec scalar_duality_u(const std::array<double, 3>& alphas,
                     const std::array<Vec, 3>& omegas, double tol) {
    const double s = alphas[0] + alphas[1] + alphas[2];
    if (std::abs(s) > std::max(tol, 1e-12)) {
        std::ostringstream os;
        os << "scalar_duality_u: alphas do not sum to zero (sum " << s << ")";
        throw std::invalid_argument(os.str());
    }
    const Vec r1 = rotate90(omegas[0], omegas[1], omegas[0]);
    return alphas[0] * omegas[0] + (alphas[1] - alphas[2]) / std::sqrt(3.0) * r1;
}

TripleReport triple_sum_tests(const TripleInput& in, double tol) {
    if (auto err = check_triple(in, std::max(tol, kTol)))
        throw std::invalid_argument("triple_sum_tests: " + *err);
    const Vec e1 = in.omegas[0].normalized();
    Vec e2 = in.omegas[1] - e1.dot(in.omegas[1]) * e1;
    const double n2 = e2.norm();
    if (n2 < 1e-8) throw std::invalid_argument("triple_sum_tests: omegas do not span a 2-plane");
    e2 /= n2;

    TripleReport rep;
    std::array<Vec, 3> vt, vp;
    for (int i = 0; i < 3; ++i) {
        vt[i] = e1.dot(in.vs[i]) * e1 + e2.dot(in.vs[i]) * e2;
        vp[i] = in.vs[i] - vt[i];
        // in-plane part of v_i is alpha_i * rot90(omega_i)
        rep.alphas[i] = vt[i].dot(rotate90(in.omegas[0], in.omegas[1], in.omegas[i]));
    }
    const double scale = 1.0 + std::max({in.vs[0].norm(), in.vs[1].norm(), in.vs[2].norm()});
    rep.sum_zero = (vt[0] + vt[1] + vt[2]).norm() <= tol * scale;
    rep.equal_alphas = std::abs(rep.alphas[0] - rep.alphas[1]) <= tol * scale &&
                       std::abs(rep.alphas[1] - rep.alphas[2]) <= tol * scale;
    // In-plane common u exists iff sum alpha_i = 0.
    rep.common_u_exists =
        std::abs(rep.alphas[0] + rep.alphas[1] + rep.alphas[2]) <= tol * scale;
    rep.perp_sum_zero = (vp[0] + vp[1] + vp[2]).norm() <= tol * scale;
    rep.perp_equal = (vp[0] - vp[1]).norm() <= tol * scale &&
                     (vp[1] - vp[2]).norm() <= tol * scale;
    return rep;
}

}  // namespace netjacobi::geom
