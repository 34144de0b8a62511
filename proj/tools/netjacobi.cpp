#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "netjacobi/report.hpp"
#include "netjacobi/spineode.hpp"

namespace nj = netjacobi;
using nj::net::GeodesicNet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

GeodesicNet resolve_net(const std::string& name_or_empty, const std::string& file) {
    if (!file.empty()) return nj::net::load_net_file(file);
    if (auto name = nj::net::parse_net_name(name_or_empty)) return nj::net::catalog(*name);
    throw nj::net::NetError("unknown net '" + name_or_empty +
                            "' (use `netjacobi list` for catalog names, or --file)");
}

int cmd_list(bool as_json) {
    if (as_json) {
        std::cout << "[";
        bool first = true;
        for (auto name : nj::net::all_net_names()) {
            const auto& net = nj::net::catalog(name);
            std::cout << (first ? "" : ", ") << "{\"name\": \"" << to_string(name)
                      << "\", \"polyhedral\": " << (nj::net::is_polyhedral(net) ? "true" : "false")
                      << "}";
            first = false;
        }
        std::cout << "]\n";
        return kExitOk;
    }
    std::printf("%-18s %-10s %8s %8s\n", "name", "polyhedral", "vertices", "arcs");
    for (auto name : nj::net::all_net_names()) {
        const auto& net = nj::net::catalog(name);
        std::printf("%-18s %-10s %8d %8d\n", to_string(name).c_str(),
                    nj::net::is_polyhedral(net) ? "yes" : "no", net.vertex_count(),
                    net.arc_count());
    }
    return kExitOk;
}

int cmd_validate(const GeodesicNet& net, double tol, bool as_json) {
    std::vector<std::string> problems;
    for (size_t v = 0; v < net.incidence.size(); ++v)
        if (net.incidence[v].size() != 3)
            problems.push_back("vertex " + std::to_string(v) + " has valence " +
                               std::to_string(net.incidence[v].size()));
    const double res = nj::net::stationarity_residual(net);
    if (res > tol)
        problems.push_back("stationarity residual " + nj::report::format_g17(res) +
                           " exceeds tolerance " + nj::report::format_g17(tol));
    for (size_t e = 0; e < net.arcs.size(); ++e) {
        const auto& a = net.arcs[e];
        if (!net.closed_circle) {
            const auto& p = net.vertices[static_cast<size_t>(a.from)];
            if (std::abs(p.dot(a.tangent_at_from)) > 1e-12)
                problems.push_back("arc " + std::to_string(e) + ": tangent not orthogonal");
            const nj::geom::Vec endpoint = net.point_on_arc(static_cast<int>(e), a.length);
            if ((endpoint - net.vertices[static_cast<size_t>(a.to)]).norm() > 1e-10)
                problems.push_back("arc " + std::to_string(e) + ": does not reach its endpoint");
        }
    }
    if (as_json) {
        std::cout << "{\"valid\": " << (problems.empty() ? "true" : "false")
                  << ", \"stationarity_residual\": " << nj::report::format_g17(res)
                  << ", \"problems\": [";
        for (size_t i = 0; i < problems.size(); ++i)
            std::cout << (i ? ", " : "") << "\"" << problems[i] << "\"";
        std::cout << "]}\n";
    } else {
        if (problems.empty()) {
            std::cout << "valid: stationarity residual " << nj::report::format_g17(res) << "\n";
        } else {
            for (const auto& p : problems) std::cout << "invalid: " << p << "\n";
        }
    }
    return problems.empty() ? kExitOk : kExitInput;
}

int cmd_report(const GeodesicNet& net, const nj::report::ReportOptions& opts, bool as_json) {
    const auto rep = nj::report::make_report(net, opts);
    std::cout << (as_json ? nj::report::report_to_json(rep) + "\n"
                          : nj::report::report_to_text(rep));
    return kExitOk;
}

int cmd_spectrum(const GeodesicNet& net, const nj::spectral::SpectrumOptions& opts, bool as_json) {
    const auto result = nj::spectral::eigenvalues(net, opts);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    if (as_json) {
        std::cout << nj::spectral::spectrum_to_json(net, result) << "\n";
    } else {
        std::printf("%-22s %s\n", "lambda", "multiplicity");
        for (const auto& e : result.eigenvalues)
            std::printf("%-22.12f %d\n", e.lambda, e.multiplicity);
        const auto wc = nj::spectral::weyl_count(net, result);
        std::printf("count %d up to lambda %.17g (Weyl prediction %.6f)\n", wc.count,
                    result.lambda_max, wc.predicted);
    }
    return kExitOk;
}

int cmd_integrability(const GeodesicNet& net, int codim, bool as_json) {
    GeodesicNet working = codim > 1 ? nj::net::embed(net, 2 + codim) : net;
    const auto v = nj::jacobi::integrability(working);
    if (as_json) {
        std::cout << "{\"dim_solutions\": " << v.dim_solutions
                  << ", \"dim_rotations\": " << v.dim_rotations
                  << ", \"dim_stabilizer\": " << v.dim_stabilizer
                  << ", \"integrable\": " << (v.integrable ? "true" : "false")
                  << ", \"residual\": " << nj::report::format_g17(v.residual) << "}\n";
    } else {
        std::cout << (v.integrable ? "integrable" : "NOT integrable") << ": dim solutions "
                  << v.dim_solutions << ", dim rotations " << v.dim_rotations << ", stabilizer "
                  << v.dim_stabilizer << ", rotation-field residual "
                  << nj::report::format_g17(v.residual) << "\n";
    }
    return kExitOk;
}

struct SpineArgs {
    int m = 2;
    double lambda = 1.0;
    double mu = 0.0;
    double rho = 4.0;
    bool sweep = false;
    int trials = 100;
};

int cmd_spine(const SpineArgs& args, bool as_json) {
    if (args.lambda < 0) {
        std::cerr << "error: lambda must be >= 0\n";
        return kExitInput;
    }
    if (args.mu < 0) {
        std::cerr << "error: mu must be >= 0\n";
        return kExitInput;
    }
    if (!args.sweep && args.rho < 4) {
        std::cerr << "error: rho must be >= 4\n";
        return kExitInput;
    }
    if (args.m < 1) {
        std::cerr << "error: m must be >= 1\n";
        return kExitInput;
    }
    bool all_ok = true;
    if (args.sweep) {
        nj::spineode::SweepOptions opts;
        opts.trials = args.trials;
        const auto cells = nj::spineode::caccioppoli_sweep(opts);
        if (as_json) {
            std::cout << "[";
            for (size_t i = 0; i < cells.size(); ++i) {
                const auto& c = cells[i];
                std::cout << (i ? ", " : "") << "{\"m\": " << c.params.m
                          << ", \"lambda\": " << nj::report::format_g17(c.params.lambda)
                          << ", \"mu\": " << nj::report::format_g17(c.params.mu)
                          << ", \"rho\": " << nj::report::format_g17(c.rho)
                          << ", \"max_ratio\": " << nj::report::format_g17(c.max_ratio)
                          << ", \"bound\": " << nj::report::format_g17(c.bound) << "}";
            }
            std::cout << "]\n";
        } else {
            std::printf("%3s %7s %5s %6s %12s %10s\n", "m", "lambda", "mu", "rho", "max_ratio",
                        "bound");
            for (const auto& c : cells)
                std::printf("%3d %7.2f %5.2f %6.1f %12.6f %10.1f\n", c.params.m, c.params.lambda,
                            c.params.mu, c.rho, c.max_ratio, c.bound);
        }
        for (const auto& c : cells) all_ok = all_ok && c.max_ratio <= c.bound;
    } else {
        nj::spineode::SpineParams p{args.m, args.lambda, args.mu};
        const auto traj = nj::spineode::radial_ode_solve(p, 1.0, 0.5, args.rho / 2, 4 * args.rho);
        const auto res = nj::spineode::caccioppoli_check(traj, args.rho);
        const double bound = nj::spineode::caccioppoli_bound(p);
        if (as_json) {
            std::cout << "{\"lhs\": " << nj::report::format_g17(res.lhs)
                      << ", \"rhs\": " << nj::report::format_g17(res.rhs)
                      << ", \"ratio\": " << nj::report::format_g17(res.ratio)
                      << ", \"bound\": " << nj::report::format_g17(bound) << "}\n";
        } else {
            std::printf("lhs %.12g  rhs %.12g  ratio %.12g  bound %.1f\n", res.lhs, res.rhs,
                        res.ratio, bound);
        }
        all_ok = res.ratio <= bound;
    }
    return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equiangular geodesic nets: validation, Jacobi systems, spectra"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after a subcommand too
    bool as_json = false;
    double tol = 1e-8;
    app.add_flag("--json", as_json, "JSON output");
    app.add_option("--tol", tol, "validation tolerance");

    auto* list = app.add_subcommand("list", "catalog nets and their polyhedral flags");

    std::string name, file;
    auto add_net_args = [&](CLI::App* cmd) {
        cmd->add_option("name", name, "catalog net name");
        cmd->add_option("--file", file, "net JSON file instead of a catalog name");
    };

    auto* validate = app.add_subcommand("validate", "check net invariants");
    add_net_args(validate);

    nj::report::ReportOptions ropts;
    auto* report = app.add_subcommand("report", "full per-net report");
    add_net_args(report);
    report->add_option("--codim", ropts.codim, "ambient codimension (dimension = 2 + codim)");
    report->add_option("--lambda-max", ropts.lambda_max, "spectrum scan upper bound");
    report->add_option("--threads", ropts.threads, "threads for the spectrum scan");

    nj::spectral::SpectrumOptions sopts;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of -u'' on the net");
    add_net_args(spectrum);
    spectrum->add_option("--lambda-max", sopts.lambda_max, "scan upper bound");
    spectrum->add_option("--grid-step", sopts.grid_step, "scan step in sqrt(lambda)");
    spectrum->add_option("--threads", sopts.threads, "scan threads");

    int codim = 1;
    auto* integrability = app.add_subcommand("integrability", "linear-field integrability verdict");
    add_net_args(integrability);
    integrability->add_option("--codim", codim, "ambient codimension");

    SpineArgs sargs;
    auto* spine = app.add_subcommand("spine", "radial spine ODE estimates");
    spine->add_option("--m", sargs.m, "spine dimension");
    spine->add_option("--lambda", sargs.lambda, "eigenvalue parameter (>= 0)");
    spine->add_option("--mu", sargs.mu, "spherical-harmonic eigenvalue (>= 0)");
    spine->add_option("--rho", sargs.rho, "annulus scale (>= 4)");
    spine->add_flag("--sweep", sargs.sweep, "run the full parameter sweep");
    spine->add_option("--trials", sargs.trials, "random initial conditions per sweep cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (list->parsed()) return cmd_list(as_json);
        if (spine->parsed()) return cmd_spine(sargs, as_json);
        const GeodesicNet net = resolve_net(name, file);
        if (validate->parsed()) return cmd_validate(net, tol, as_json);
        if (report->parsed()) return cmd_report(net, ropts, as_json);
        if (spectrum->parsed()) return cmd_spectrum(net, sopts, as_json);
        if (integrability->parsed()) return cmd_integrability(net, codim, as_json);
    } catch (const nj::net::NetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nj::spineode::OdeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
