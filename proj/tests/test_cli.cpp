#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "netjacobi/net.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path tmp = fs::temp_directory_path() /
                         ("netjacobi_cli_" + std::to_string(getpid()) + "_" +
                          std::to_string(counter++) + ".out");
    const std::string cmd = std::string(NETJACOBI_CLI_PATH) + " " + args + " > " +
                            tmp.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    fs::remove(tmp);
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("list: ten nets, eight polyhedral, stable bytes") {
    const auto r1 = run_cli("list");
    CHECK(r1.exit_code == 0);
    int rows = 0, poly = 0;
    std::istringstream is(r1.out);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ++rows;
        if (line.find(" yes ") != std::string::npos) ++poly;
    }
    CHECK(rows == 10);
    CHECK(poly == 8);
    const auto r2 = run_cli("list");
    CHECK(r1.out == r2.out);

    const auto js = run_cli("list --json");
    CHECK(js.exit_code == 0);
    size_t n = 0, pos = 0;
    while ((pos = js.out.find("\"name\"", pos)) != std::string::npos) {
        ++n;
        ++pos;
    }
    CHECK(n == 10);
}

TEST_CASE("golden reports: byte-identical across runs, threads, and the pinned files") {
    for (netjacobi::net::NetName name : netjacobi::net::all_net_names()) {
        const std::string nm = to_string(name);
        CAPTURE(nm);
        const auto r1 = run_cli("report " + nm + " --json");
        CHECK(r1.exit_code == 0);
        const auto r2 = run_cli("report " + nm + " --json");
        CHECK(r1.out == r2.out);
        const auto r4 = run_cli("report " + nm + " --json --threads 4");
        CHECK(r1.out == r4.out);
        const fs::path golden = fs::path(NETJACOBI_GOLDEN_DIR) / ("report_" + nm + ".json");
        CHECK_MESSAGE(r1.out == read_file(golden), "golden mismatch for " << nm);
    }
}

TEST_CASE("report gating: suspension skips integrability, circle skips both") {
    const auto y = run_cli("report y_suspension --json");
    CHECK(y.exit_code == 0);
    CHECK(y.out.find("\"polyhedral\": false") != std::string::npos);
    CHECK(y.out.find("\"integrability\": null") != std::string::npos);
    CHECK(y.out.find("not polyhedral") != std::string::npos);
    // the suspension still has a junction spectrum
    CHECK(y.out.find("\"lambda0_multiplicity\": 2") != std::string::npos);

    const auto gc = run_cli("report great_circle --json");
    CHECK(gc.exit_code == 0);
    CHECK(gc.out.find("\"lambda0_multiplicity\": null") != std::string::npos);
}

TEST_CASE("report --codim 3 reaches the embedded dims (9,9)") {
    const auto r = run_cli("report tetrahedron --codim 3 --json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"dim_solutions\": 9") != std::string::npos);
    CHECK(r.out.find("\"dim_rotations\": 9") != std::string::npos);
    CHECK(r.out.find("\"integrable\": true") != std::string::npos);
}

TEST_CASE("validate: catalog nets pass, corrupted files exit 2 with diagnostics") {
    CHECK(run_cli("validate tetrahedron").exit_code == 0);

    const fs::path tmp = fs::temp_directory_path() / "netjacobi_bad_net.json";
    {
        netjacobi::net::GeodesicNet n = netjacobi::net::catalog(netjacobi::net::NetName::cube);
        n.vertices[0] = (n.vertices[0] + 0.05 * n.vertices[1]).normalized();
        std::ofstream out(tmp);
        out << to_json(n);
    }
    const auto bad = run_cli("validate --file " + tmp.string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("stationarity") != std::string::npos);
    fs::remove(tmp);

    const auto missing = run_cli("validate --file /nonexistent/net.json");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("unknown net name exits 2") {
    const auto r = run_cli("report octahedron");
    CHECK(r.exit_code == 2);
}

TEST_CASE("spine arguments outside the estimate's hypotheses are rejected") {
    CHECK(run_cli("spine --lambda -1").exit_code == 2);
    CHECK(run_cli("spine --rho 2").exit_code == 2);
    const auto ok = run_cli("spine --m 2 --lambda 1 --mu 0 --rho 4 --json");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("\"ratio\"") != std::string::npos);
}

TEST_CASE("spectrum command prints eigenvalue table and JSON") {
    const auto r = run_cli("spectrum tetrahedron --lambda-max 5 --json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"eigenvalues\"") != std::string::npos);
    CHECK(r.out.find("\"weyl\"") != std::string::npos);
}

TEST_CASE("NETJACOBI_CATALOG_DIR override falls back to relaxing the seeds") {
    const std::string prefix = "NETJACOBI_CATALOG_DIR=/nonexistent_catalog_dir ";
    const fs::path tmp = fs::temp_directory_path() / "netjacobi_fallback.out";
    const std::string cmd = prefix + NETJACOBI_CLI_PATH + " integrability tetrahedron --json > " +
                            tmp.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("\"integrable\": true") != std::string::npos);
    fs::remove(tmp);
}
