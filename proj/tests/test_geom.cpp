#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "netjacobi/geom.hpp"

using namespace netjacobi;
using geom::Mat;
using geom::Vec;

namespace {

Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

// random 120-degree conormal triple with admissible v_i (v_i perp omega_i,
// sum v_i = 0), in dimension D
struct TripleGen {
    std::mt19937_64 rng;
    explicit TripleGen(unsigned long seed) : rng(seed) {}

    Vec gauss(int D) {
        std::normal_distribution<double> g;
        Vec v(D);
        for (int i = 0; i < D; ++i) v[i] = g(rng);
        return v;
    }

    geom::TripleInput make(int D, bool zero_sum) {
        Mat frame(D, 2);
        frame.col(0) = gauss(D).normalized();
        Vec t = gauss(D);
        t -= frame.col(0).dot(t) * frame.col(0);
        frame.col(1) = t.normalized();
        geom::TripleInput in;
        for (int i = 0; i < 3; ++i) {
            const double ang = 2 * M_PI * i / 3;
            in.omegas[static_cast<size_t>(i)] =
                std::cos(ang) * frame.col(0) + std::sin(ang) * frame.col(1);
        }
        for (int i = 0; i < 3; ++i) {
            Vec v = gauss(D);
            v -= in.omegas[static_cast<size_t>(i)].dot(v) * in.omegas[static_cast<size_t>(i)];
            in.vs[static_cast<size_t>(i)] = v;
        }
        if (zero_sum) {
            // least-norm correction keeping v_i perp omega_i
            Mat A(D, 3 * D);
            for (int i = 0; i < 3; ++i)
                A.middleCols(i * D, D) =
                    Mat::Identity(D, D) -
                    in.omegas[static_cast<size_t>(i)] * in.omegas[static_cast<size_t>(i)].transpose();
            const Vec target = -(in.vs[0] + in.vs[1] + in.vs[2]);
            const Vec x = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
            for (int i = 0; i < 3; ++i) {
                Vec dv = x.segment(i * D, D);
                dv -= in.omegas[static_cast<size_t>(i)].dot(dv) * in.omegas[static_cast<size_t>(i)];
                in.vs[static_cast<size_t>(i)] += dv;
            }
        }
        return in;
    }
};

}  // namespace

TEST_CASE("projection onto a coordinate axis") {
    geom::Subspace s({vec2(1, 0)});
    const Vec p = geom::project(s, vec2(3, 4));
    CHECK(p[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("projection onto the full space is the identity") {
    geom::Subspace s({vec3(1, 1, 0), vec3(0, 1, 1), vec3(1, 0, 4)});
    REQUIRE(s.dim() == 3);
    const Vec v = vec3(0.3, -1.7, 2.9);
    CHECK((s.project(v) - v).norm() < 1e-12);
}

TEST_CASE("projection is idempotent on random subspaces") {
    TripleGen gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int D = 2 + trial % 7;
        std::vector<Vec> span;
        for (int k = 0; k < 1 + trial % D; ++k) span.push_back(gen.gauss(D));
        geom::Subspace s(span);
        CHECK(s.gram_defect() < 1e-12);
        const Vec v = gen.gauss(D);
        const Vec p = s.project(v);
        CHECK((s.project(p) - p).norm() < 1e-12);
    }
}

TEST_CASE("projection rejects dimension mismatch") {
    geom::Subspace s({vec3(1, 0, 0)});
    CHECK_THROWS(s.project(vec2(1, 2)));
}

TEST_CASE("skew extension of the zero field is zero") {
    TripleGen gen(11);
    auto in = gen.make(4, true);
    for (auto& v : in.vs) v.setZero();
    const Mat a = geom::skew_extension(in);
    CHECK(geom::max_abs(a) < 1e-12);
}

TEST_CASE("skew extension reproduces the planar rotation generator") {
    geom::TripleInput in;
    for (int i = 0; i < 3; ++i) {
        const double ang = 2 * M_PI * i / 3;
        in.omegas[static_cast<size_t>(i)] = vec2(std::cos(ang), std::sin(ang));
        in.vs[static_cast<size_t>(i)] = vec2(-std::sin(ang), std::cos(ang));
    }
    const Mat a = geom::skew_extension(in);
    for (int i = 0; i < 3; ++i)
        CHECK((a * in.omegas[static_cast<size_t>(i)] - in.vs[static_cast<size_t>(i)]).norm() <
              1e-12);
    Mat rot(2, 2);
    rot << 0, -1, 1, 0;
    CHECK(geom::max_abs(a - rot) < 1e-12);
}

TEST_CASE("skew extension: randomized property oracle in D=5") {
    TripleGen gen(42);
    double worst_map = 0, worst_skew = 0, worst_offspan = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto in = gen.make(5, true);
        const Mat a = geom::skew_extension(in);
        double vmax = 1.0;
        for (const auto& v : in.vs) vmax = std::max(vmax, v.norm());
        for (int i = 0; i < 3; ++i)
            worst_map = std::max(worst_map, (a * in.omegas[static_cast<size_t>(i)] -
                                             in.vs[static_cast<size_t>(i)])
                                                    .norm() /
                                                vmax);
        worst_skew = std::max(worst_skew, geom::max_abs(a + a.transpose()));
        // vanishing off span(omega, v)
        std::vector<Vec> span(in.omegas.begin(), in.omegas.end());
        span.insert(span.end(), in.vs.begin(), in.vs.end());
        geom::Subspace s(span);
        Vec w = gen.gauss(5);
        w -= s.project(w);
        if (w.norm() > 1e-8) worst_offspan = std::max(worst_offspan, (a * w).norm() / w.norm());
    }
    CHECK(worst_map < 1e-10);
    CHECK(worst_skew < 1e-12);
    CHECK(worst_offspan < 1e-10);
}

TEST_CASE("skew extension reports which precondition failed") {
    TripleGen gen(3);
    auto in = gen.make(3, true);
    in.omegas[0] *= 1.5;
    CHECK_THROWS_WITH_AS(geom::skew_extension(in),
                         doctest::Contains("omega_1 not unit"), std::invalid_argument);
    auto in2 = gen.make(3, false);
    CHECK_THROWS_WITH_AS(geom::skew_extension(in2),
                         doctest::Contains("sum of vs nonzero"), std::invalid_argument);
}

TEST_CASE("scalar duality vector: zero and collapsed cases") {
    TripleGen gen(5);
    const auto in = gen.make(2, true);
    const Vec u0 = geom::scalar_duality_u({0, 0, 0}, in.omegas);
    CHECK(u0.norm() < 1e-12);
    // alpha = (2,-1,-1) collapses to 2 omega_1
    const Vec u = geom::scalar_duality_u({2, -1, -1}, in.omegas);
    CHECK((u - 2 * in.omegas[0]).norm() < 1e-12);
    for (int i = 0; i < 3; ++i)
        CHECK(u.dot(in.omegas[static_cast<size_t>(i)]) ==
              doctest::Approx(i == 0 ? 2.0 : -1.0).epsilon(1e-12));
}

TEST_CASE("scalar duality vector reproduces dot products, standard triple") {
    std::array<Vec, 3> omegas;
    for (int i = 0; i < 3; ++i) {
        const double ang = 2 * M_PI * i / 3;
        omegas[static_cast<size_t>(i)] = vec2(std::cos(ang), std::sin(ang));
    }
    const Vec u = geom::scalar_duality_u({1, -1, 0}, omegas);
    CHECK(u.dot(omegas[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u.dot(omegas[1]) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(u.dot(omegas[2]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scalar duality vector: 1000 random triples and linearity") {
    TripleGen gen(99);
    std::uniform_real_distribution<double> uni(-2, 2);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int D = 2 + trial % 5;
        const auto in = gen.make(D, true);
        const double a1 = uni(gen.rng), a2 = uni(gen.rng);
        const std::array<double, 3> al{a1, a2, -a1 - a2};
        const Vec u = geom::scalar_duality_u(al, in.omegas);
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst,
                             std::abs(u.dot(in.omegas[static_cast<size_t>(i)]) -
                                      al[static_cast<size_t>(i)]));
        // superposition
        const double b1 = uni(gen.rng), b2 = uni(gen.rng);
        const std::array<double, 3> bl{b1, b2, -b1 - b2};
        const std::array<double, 3> sum{a1 + b1, a2 + b2, -a1 - a2 - b1 - b2};
        const Vec lin = geom::scalar_duality_u(sum, in.omegas) - u -
                        geom::scalar_duality_u(bl, in.omegas);
        worst = std::max(worst, lin.norm());
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("scalar duality rejects alphas that do not cancel") {
    TripleGen gen(1);
    const auto in = gen.make(3, true);
    CHECK_THROWS_AS(geom::scalar_duality_u({1, 1, 1}, in.omegas), std::invalid_argument);
}

TEST_CASE("triple report: equal in-plane alphas give in-plane sum zero") {
    TripleGen gen(21);
    auto in = gen.make(3, false);
    for (int i = 0; i < 3; ++i)
        in.vs[static_cast<size_t>(i)] =
            0.7 * geom::rotate90(in.omegas[0], in.omegas[1], in.omegas[static_cast<size_t>(i)]);
    const auto rep = geom::triple_sum_tests(in);
    CHECK(rep.sum_zero);
    CHECK(rep.equal_alphas);
    CHECK_FALSE(rep.common_u_exists);  // alphas sum to 2.1, not 0
}

TEST_CASE("triple report: alphas (1,-1,0) admit a common vector but no cancellation") {
    TripleGen gen(22);
    auto in = gen.make(4, false);
    const std::array<double, 3> al{1, -1, 0};
    for (int i = 0; i < 3; ++i)
        in.vs[static_cast<size_t>(i)] =
            al[static_cast<size_t>(i)] *
            geom::rotate90(in.omegas[0], in.omegas[1], in.omegas[static_cast<size_t>(i)]);
    const auto rep = geom::triple_sum_tests(in);
    CHECK(rep.common_u_exists);
    CHECK_FALSE(rep.sum_zero);
}

TEST_CASE("triple report: equal out-of-plane multiples admit a common vector") {
    TripleGen gen(23);
    auto in = gen.make(5, false);
    Vec v = gen.gauss(5);
    v -= geom::Subspace(std::vector<Vec>{in.omegas[0], in.omegas[1]}).project(v);
    for (int i = 0; i < 3; ++i) in.vs[static_cast<size_t>(i)] = 1.3 * v;
    const auto rep = geom::triple_sum_tests(in);
    CHECK(rep.perp_equal);
    CHECK_FALSE(rep.perp_sum_zero);
}

TEST_CASE("triple report equivalences hold on 1000 random configurations") {
    TripleGen gen(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const int D = 3 + trial % 4;
        const auto in = gen.make(D, trial % 2 == 0);
        const auto rep = geom::triple_sum_tests(in, 1e-9);
        // in-plane sum zero iff the alphas coincide
        CHECK(rep.sum_zero == rep.equal_alphas);
        // common in-plane vector iff the alphas cancel
        const double asum = rep.alphas[0] + rep.alphas[1] + rep.alphas[2];
        CHECK(rep.common_u_exists == (std::abs(asum) <= 1e-9 * (1 + std::abs(rep.alphas[0]))));
        if (trial % 2 == 0) {
            // admissible input: full sums vanish
            CHECK(rep.sum_zero == rep.equal_alphas);
            CHECK(rep.perp_sum_zero);
        }
    }
}

TEST_CASE("triple report rejects a degenerate plane") {
    geom::TripleInput in;
    in.omegas[0] = vec3(1, 0, 0);
    in.omegas[1] = vec3(-1, 0, 0);
    in.omegas[2] = vec3(0, 0, 0);
    in.vs[0] = in.vs[1] = in.vs[2] = vec3(0, 0, 0);
    CHECK_THROWS(geom::triple_sum_tests(in));
}
