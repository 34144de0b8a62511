#include "netjacobi/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

namespace netjacobi::spectral {

using net::NetError;

Mat SecularSystem::matrix(double lambda) const {
    return jacobi::compatibility_system(net, lambda).matrix;
}

namespace {

// singular values of M(lambda), ascending; values-only BDC is an order of
// magnitude faster than one-sided Jacobi on the larger embedded systems
Eigen::VectorXd singular_values(const GeodesicNet& net, double lambda) {
    const Mat M = jacobi::compatibility_system(net, lambda).matrix;
    Eigen::BDCSVD<Mat> svd(M);
    return svd.singularValues().reverse();
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double secular_sigma_min(const GeodesicNet& net, double lambda) {
    const Eigen::VectorXd s = singular_values(net, lambda);
    const int skip = net.vertex_count();  // gauge kernel, present at every lambda
    if (skip >= s.size()) throw NetError("secular_sigma_min: system too small");
    return s[skip];
}

FieldBasis eigenmodes(const GeodesicNet& net, double lambda, double sigma_tol) {
    const Eigen::VectorXd s = singular_values(net, lambda);
    const double smax = s[s.size() - 1];
    if (secular_sigma_min(net, lambda) > sigma_tol * smax) {
        std::ostringstream os;
        os << "eigenmodes: lambda " << lambda << " is not an eigenvalue (sigma "
           << secular_sigma_min(net, lambda) << ")";
        throw NetError(os.str());
    }
    jacobi::SystemOptions opts;
    return jacobi::system_nullspace_basis(net, lambda, opts);
}

SpectrumResult eigenvalues(const GeodesicNet& net, const SpectrumOptions& opts) {
    SpectrumResult result;
    result.lambda_max = opts.lambda_max;
    result.grid_step = opts.grid_step;
    result.tol = opts.tol;
    if (opts.lambda_max <= 0) throw NetError("eigenvalues: lambda_max must be positive");

    const int nV = net.vertex_count();
    auto sigma = [&](double lam) { return secular_sigma_min(net, lam); };

    // sigma scan on the sqrt(lambda) grid, one step past the boundary so that
    // roots near lambda_max still get an interior bracket
    std::vector<double> grid;
    for (double w = 0.0; (w - opts.grid_step) * (w - opts.grid_step) <= opts.lambda_max + 1e-12;
         w += opts.grid_step)
        grid.push_back(w);
    std::vector<double> vals(grid.size());
    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        for (size_t i = 0; i < grid.size(); ++i) vals[i] = sigma(grid[i] * grid[i]);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<size_t> next{0};
        for (int t = 0; t < threads; ++t)
            futs.push_back(std::async(std::launch::async, [&] {
                for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                    vals[i] = sigma(grid[i] * grid[i]);
            }));
        for (auto& f : futs) f.get();
    }

    // reference scale for root acceptance
    double sigma_scale = 0.0;
    for (double v : vals) sigma_scale = std::max(sigma_scale, v);
    const double accept = opts.root_sigma_tol * std::max(sigma_scale, 1e-30);

    std::vector<double> roots;
    if (vals[0] < accept) roots.push_back(grid[0] * grid[0]);
    for (size_t k = 1; k + 1 < grid.size(); ++k) {
        if (vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1]) {
            const double lo = grid[k - 1] * grid[k - 1], hi = grid[k + 1] * grid[k + 1];
            const double lam = golden_section(sigma, lo, hi, opts.tol);
            if (sigma(lam) < accept && lam <= opts.lambda_max + opts.tol) roots.push_back(lam);
        }
    }
    std::sort(roots.begin(), roots.end());
    // merge duplicates from adjacent brackets; flag genuinely close pairs
    std::vector<double> unique_roots;
    for (double r : roots) {
        if (!unique_roots.empty() && std::abs(r - unique_roots.back()) < 10 * opts.tol) continue;
        if (!unique_roots.empty()) {
            const double wprev = std::sqrt(std::max(unique_roots.back(), 0.0));
            const double wcur = std::sqrt(std::max(r, 0.0));
            if (wcur - wprev < 0.5 * opts.grid_step) {
                std::ostringstream os;
                os << "cluster near lambda " << unique_roots.back() << " and " << r
                   << " approaches the grid resolution; refine grid_step to separate";
                result.warnings.push_back(os.str());
            }
        }
        unique_roots.push_back(r);
    }

    for (double lam : unique_roots) {
        const Eigen::VectorXd s = singular_values(net, lam);
        const double smax = s[s.size() - 1];
        int null_count = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] < 1e-7 * smax) ++null_count;
        const int mult = null_count - nV;
        if (mult <= 0) continue;
        result.eigenvalues.push_back({lam, mult});
        result.modes.push_back(eigenmodes(net, lam, opts.root_sigma_tol));
        if (result.modes.back().dim() != mult) {
            std::ostringstream os;
            os << "eigenvalue " << lam << ": nullspace dim " << result.modes.back().dim()
               << " disagrees with singular-value multiplicity " << mult;
            result.warnings.push_back(os.str());
        }
    }
    return result;
}

double gram_check(const GeodesicNet& net, const SpectrumResult& result) {
    std::vector<const jacobi::ArcFieldCoefficients*> all;
    for (const auto& basis : result.modes)
        for (const auto& f : basis.fields) all.push_back(&f);
    double worst = 0.0;
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            worst = std::max(worst, std::abs(jacobi::l2_inner(net, *all[i], *all[j])));
    return worst;
}

WeylCount weyl_count(const GeodesicNet& net, const SpectrumResult& result) {
    WeylCount out;
    out.count = result.count();
    out.predicted = net::total_length(net) / std::numbers::pi * std::sqrt(result.lambda_max);
    return out;
}

std::string spectrum_to_json(const GeodesicNet& net, const SpectrumResult& result, int indent) {
    nlohmann::json j;
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& e : result.eigenvalues)
        j["eigenvalues"].push_back({{"lambda", e.lambda}, {"multiplicity", e.multiplicity}});
    const WeylCount wc = weyl_count(net, result);
    j["weyl"] = {{"count", wc.count}, {"predicted", wc.predicted}};
    return j.dump(indent);
}

}  // namespace netjacobi::spectral
