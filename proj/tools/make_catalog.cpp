// Regenerates the bundled catalog data: relaxes each built-in seed to
// stationarity and writes the net JSON files.
#include <filesystem>
#include <iostream>

#include "netjacobi/net.hpp"

int main(int argc, char** argv) {
    namespace nj = netjacobi::net;
    if (argc != 2) {
        std::cerr << "usage: netjacobi-make-catalog <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    for (auto name : nj::all_net_names()) {
        nj::GeodesicNet net = nj::catalog_seed(name);
        if (net.vertex_count() > 0) {
            nj::RelaxOptions opts;
            opts.tol = 1e-13;
            net = nj::relax(net, opts);
        }
        const auto path = dir / (to_string(name) + ".json");
        nj::save_net_file(net, path.string());
        std::cout << path.string() << "  residual " << nj::stationarity_residual(net) << "\n";
    }
    return 0;
}
