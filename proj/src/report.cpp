#include "netjacobi/report.hpp"

#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace netjacobi::report {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_deg3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

NetReport make_report(const GeodesicNet& net, const ReportOptions& opts) {
    GeodesicNet working = net;
    if (opts.codim > 1) working = net::embed(net, 2 + opts.codim);
    else if (opts.codim != 1)
        throw net::NetError("make_report: codim must be >= 1");

    NetReport rep;
    rep.name = working.name.value_or("(unnamed)");
    rep.ambient_dim = working.ambient_dim;
    rep.vertex_count = working.vertex_count();
    rep.arc_count = working.arc_count();
    rep.stationarity_residual = net::stationarity_residual(working);
    rep.edge_profile_deg = net::edge_length_profile(working);
    rep.polyhedral = net::is_polyhedral(working);
    rep.suspension = net::is_suspension(working);
    rep.lambda_max = opts.lambda_max;

    if (rep.polyhedral) {
        rep.verdict = jacobi::integrability(working);
    } else {
        rep.skipped_note = working.closed_circle
                               ? "integrability and spectrum skipped: no junctions"
                               : "integrability skipped: net is not polyhedral";
    }
    const bool has_junctions = rep.vertex_count > 0 && !working.closed_circle;
    if (has_junctions) {
        spectral::SpectrumOptions sopts;
        sopts.lambda_max = opts.lambda_max;
        sopts.threads = opts.threads;
        const auto spec = spectral::eigenvalues(working, sopts);
        rep.lambda0_multiplicity = 0;
        rep.lambda1_multiplicity = 0;
        for (const auto& e : spec.eigenvalues) {
            if (std::abs(e.lambda) < 1e-8) rep.lambda0_multiplicity = e.multiplicity;
            if (std::abs(e.lambda - 1.0) < 1e-8) rep.lambda1_multiplicity = e.multiplicity;
        }
    }
    return rep;
}

std::string report_to_json(const NetReport& rep, int indent) {
    using nlohmann::json;
    // assemble with string-formatted numbers for byte-stable output
    std::ostringstream os;
    const std::string pad(static_cast<size_t>(indent), ' ');
    os << "{\n";
    os << pad << "\"name\": \"" << rep.name << "\",\n";
    os << pad << "\"ambient_dim\": " << rep.ambient_dim << ",\n";
    os << pad << "\"vertices\": " << rep.vertex_count << ",\n";
    os << pad << "\"arcs\": " << rep.arc_count << ",\n";
    os << pad << "\"stationarity_residual\": " << format_g17(rep.stationarity_residual) << ",\n";
    os << pad << "\"edge_profile_deg\": [";
    for (size_t i = 0; i < rep.edge_profile_deg.size(); ++i)
        os << (i ? ", " : "") << format_deg3(rep.edge_profile_deg[i]);
    os << "],\n";
    os << pad << "\"polyhedral\": " << (rep.polyhedral ? "true" : "false") << ",\n";
    os << pad << "\"suspension\": " << (rep.suspension ? "true" : "false") << ",\n";
    if (rep.verdict) {
        os << pad << "\"integrability\": {\n";
        os << pad << pad << "\"dim_solutions\": " << rep.verdict->dim_solutions << ",\n";
        os << pad << pad << "\"dim_rotations\": " << rep.verdict->dim_rotations << ",\n";
        os << pad << pad << "\"dim_stabilizer\": " << rep.verdict->dim_stabilizer << ",\n";
        os << pad << pad << "\"integrable\": " << (rep.verdict->integrable ? "true" : "false")
           << ",\n";
        os << pad << pad << "\"residual\": " << format_g17(rep.verdict->residual) << "\n";
        os << pad << "},\n";
    } else {
        os << pad << "\"integrability\": null,\n";
        os << pad << "\"note\": \"" << rep.skipped_note.value_or("") << "\",\n";
    }
    os << pad << "\"lambda_max\": " << format_g17(rep.lambda_max) << ",\n";
    os << pad << "\"lambda0_multiplicity\": ";
    if (rep.lambda0_multiplicity) os << *rep.lambda0_multiplicity;
    else os << "null";
    os << ",\n";
    os << pad << "\"lambda1_multiplicity\": ";
    if (rep.lambda1_multiplicity) os << *rep.lambda1_multiplicity;
    else os << "null";
    os << "\n}";
    return os.str();
}

std::string report_to_text(const NetReport& rep) {
    std::ostringstream os;
    os << "net:                 " << rep.name << "\n";
    os << "ambient dimension:   " << rep.ambient_dim << "\n";
    os << "vertices / arcs:     " << rep.vertex_count << " / " << rep.arc_count << "\n";
    os << "stationarity:        " << format_g17(rep.stationarity_residual) << "\n";
    // profile as value x count, 3 decimals
    std::map<std::string, int> prof;
    for (double d : rep.edge_profile_deg) ++prof[format_deg3(d)];
    os << "edge lengths (deg):  ";
    bool first = true;
    for (const auto& [len, cnt] : prof) {
        os << (first ? "" : ", ") << len << " x" << cnt;
        first = false;
    }
    os << "\n";
    os << "polyhedral:          " << (rep.polyhedral ? "yes" : "no");
    if (rep.suspension) os << " (suspension)";
    os << "\n";
    if (rep.verdict) {
        os << "integrability:       " << (rep.verdict->integrable ? "integrable" : "NOT integrable")
           << "  dim solutions " << rep.verdict->dim_solutions << ", dim rotations "
           << rep.verdict->dim_rotations << ", stabilizer " << rep.verdict->dim_stabilizer
           << ", residual " << format_g17(rep.verdict->residual) << "\n";
    } else {
        os << "integrability:       " << rep.skipped_note.value_or("skipped") << "\n";
    }
    if (rep.lambda0_multiplicity)
        os << "eigenvalue 0 mult:   " << *rep.lambda0_multiplicity << " (up to lambda_max "
           << format_g17(rep.lambda_max) << ")\n";
    if (rep.lambda1_multiplicity)
        os << "eigenvalue 1 mult:   " << *rep.lambda1_multiplicity << "\n";
    return os.str();
}

}  // namespace netjacobi::report
