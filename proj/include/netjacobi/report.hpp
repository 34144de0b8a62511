#pragma once

#include <optional>
#include <string>

#include "netjacobi/jacobi.hpp"
#include "netjacobi/spectral.hpp"

namespace netjacobi::report {

using net::GeodesicNet;

struct ReportOptions {
    double lambda_max = 10.0;
    int codim = 1;      // ambient dimension = 2 + codim
    int threads = 1;
};

// Aggregated per-net summary.  Non-polyhedral nets carry no integrability
// verdict; nets without junctions (the circle) carry no spectrum either.
struct NetReport {
    std::string name;
    int ambient_dim = 0;
    int vertex_count = 0;
    int arc_count = 0;
    double stationarity_residual = 0.0;
    std::vector<double> edge_profile_deg;  // ascending, full precision
    bool polyhedral = false;
    bool suspension = false;
    std::optional<jacobi::IntegrabilityVerdict> verdict;
    std::optional<std::string> skipped_note;
    std::optional<int> lambda0_multiplicity;
    std::optional<int> lambda1_multiplicity;
    double lambda_max = 0.0;
};

NetReport make_report(const GeodesicNet& net, const ReportOptions& opts = {});

// Deterministic renderings: doubles at 17 significant digits in JSON, lengths
// rounded to 3 decimals in the text table.
std::string report_to_json(const NetReport& rep, int indent = 2);
std::string report_to_text(const NetReport& rep);

std::string format_g17(double v);
std::string format_deg3(double v);

}  // namespace netjacobi::report
