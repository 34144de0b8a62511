#pragma once

#include <string>
#include <vector>

#include "netjacobi/jacobi.hpp"

namespace netjacobi::spectral {

using geom::Mat;
using jacobi::FieldBasis;
using net::GeodesicNet;

// Frequency-parameterized junction system M(lambda); identical to the jacobi
// compatibility system at lambda = 1.  The arc basis is {sin(w t)/w, cos(w t)}
// for lambda = w^2 > 0, {t, 1} at lambda = 0 and {sinh/w, cosh} for lambda < 0
// (the scaling keeps the entries analytic in lambda).
struct SecularSystem {
    GeodesicNet net;
    explicit SecularSystem(GeodesicNet n) : net(std::move(n)) {}
    Mat matrix(double lambda) const;
};

// Smallest singular value of M(lambda) transverse to the per-vertex gauge
// kernel (the #vertices directions V_p = p that exist for every lambda):
// zero exactly at the eigenvalues of -u'' with the junction conditions.
double secular_sigma_min(const GeodesicNet& net, double lambda);

struct Eigenvalue {
    double lambda = 0.0;
    int multiplicity = 0;
};

struct SpectrumOptions {
    double lambda_max = 200.0;
    double grid_step = 0.05;   // in sqrt(lambda)
    double tol = 1e-10;        // root refinement tolerance on lambda
    double root_sigma_tol = 1e-7;
    int threads = 1;
};

struct SpectrumResult {
    std::vector<Eigenvalue> eigenvalues;          // ascending
    std::vector<FieldBasis> modes;                // one basis per eigenvalue
    double lambda_max = 0.0;
    double grid_step = 0.0;
    double tol = 0.0;
    std::vector<std::string> warnings;            // unresolved clusters etc.

    int count() const {
        int n = 0;
        for (const auto& e : eigenvalues) n += e.multiplicity;
        return n;
    }
};

// Scans sigma_min on a sqrt(lambda) grid, refines each bracketed minimum by
// golden-section search, and extracts multiplicities and orthonormal modes
// from the numerical nullspace.
SpectrumResult eigenvalues(const GeodesicNet& net, const SpectrumOptions& opts = {});

// Modes at a given eigenvalue; throws if lambda is not an eigenvalue.
FieldBasis eigenmodes(const GeodesicNet& net, double lambda, double sigma_tol = 1e-7);

// max |off-diagonal L2 Gram entry| across all computed modes
double gram_check(const GeodesicNet& net, const SpectrumResult& result);

// Weyl counting data: N(lambda_max) vs (L_tot/pi) sqrt(lambda_max).
struct WeylCount {
    int count = 0;
    double predicted = 0.0;
};
WeylCount weyl_count(const GeodesicNet& net, const SpectrumResult& result);

// {"eigenvalues":[{"lambda":..,"multiplicity":..}],"weyl":{...}}
std::string spectrum_to_json(const GeodesicNet& net, const SpectrumResult& result,
                             int indent = 2);

}  // namespace netjacobi::spectral
