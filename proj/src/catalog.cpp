#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>

#include "netjacobi/net.hpp"

#ifndef NETJACOBI_DEFAULT_CATALOG_DIR
#define NETJACOBI_DEFAULT_CATALOG_DIR ""
#endif

namespace netjacobi::net {

namespace {

constexpr double kPi = std::numbers::pi;

Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

// latitude/longitude in degrees
Vec sph(double lat, double lon) {
    const double a = lat * kPi / 180.0, b = lon * kPi / 180.0;
    return v3(std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), std::sin(a));
}

GeodesicNet build(const std::vector<Vec>& verts, const std::vector<ArcSpec>& specs,
                  NetName name, bool allow_nonpoly = false) {
    AssembleOptions opts;
    opts.allow_nonpolyhedral = allow_nonpoly;
    GeodesicNet net = assemble_net(3, verts, specs, opts);
    net.name = to_string(name);
    return net;
}

std::vector<ArcSpec> edges(std::initializer_list<std::pair<int, int>> list) {
    std::vector<ArcSpec> out;
    for (auto [i, j] : list) out.push_back({i, j, std::nullopt});
    return out;
}

GeodesicNet seed_y_suspension() {
    std::vector<Vec> verts = {v3(0, 0, 1), v3(0, 0, -1)};
    std::vector<ArcSpec> specs;
    for (int k = 0; k < 3; ++k) {
        ArcSpec s;
        s.from = 0;
        s.to = 1;
        s.via = v3(std::cos(2 * kPi * k / 3), std::sin(2 * kPi * k / 3), 0);
        specs.push_back(std::move(s));
    }
    return build(verts, specs, NetName::y_suspension);
}

GeodesicNet seed_tetrahedron() {
    const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
    std::vector<Vec> verts = {
        v3(1, 0, 0),
        v3(-1.0 / 3, 2 * r2 / 3, 0),
        v3(-1.0 / 3, -r2 / 3, r6 / 3),
        v3(-1.0 / 3, -r2 / 3, -r6 / 3),
    };
    for (auto& v : verts) v.normalize();
    return build(verts, edges({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}),
                 NetName::tetrahedron);
}

GeodesicNet seed_cube() {
    std::vector<Vec> verts;
    std::map<std::array<int, 3>, int> idx;
    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) {
                idx[{sx, sy, sz}] = static_cast<int>(verts.size());
                verts.push_back(v3(sx, sy, sz).normalized());
            }
    std::vector<ArcSpec> specs;
    for (const auto& [key, i] : idx)
        for (int d = 0; d < 3; ++d) {
            auto key2 = key;
            key2[static_cast<size_t>(d)] *= -1;
            const int j = idx.at(key2);
            if (i < j) specs.push_back({i, j, std::nullopt});
        }
    return build(verts, specs, NetName::cube);
}

GeodesicNet seed_dodecahedron() {
    const double phi = (1 + std::sqrt(5.0)) / 2;
    std::vector<Vec> verts;
    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) verts.push_back(v3(sx, sy, sz).normalized());
    for (int a : {1, -1})
        for (int b : {1, -1}) {
            verts.push_back(v3(0, a / phi, b * phi).normalized());
            verts.push_back(v3(a / phi, b * phi, 0).normalized());
            verts.push_back(v3(a * phi, 0, b / phi).normalized());
        }
    const int n = static_cast<int>(verts.size());
    double dmin = 10.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dmin = std::min(dmin, (verts[i] - verts[j]).norm());
    std::vector<ArcSpec> specs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((verts[i] - verts[j]).norm() < 1.2 * dmin) specs.push_back({i, j, std::nullopt});
    return build(verts, specs, NetName::dodecahedron);
}

GeodesicNet seed_prism(int sides, double lat, NetName name) {
    std::vector<Vec> verts;
    for (int k = 0; k < sides; ++k) verts.push_back(sph(lat, 360.0 * k / sides));
    for (int k = 0; k < sides; ++k) verts.push_back(sph(-lat, 360.0 * k / sides));
    std::vector<ArcSpec> specs;
    for (int k = 0; k < sides; ++k) specs.push_back({k, (k + 1) % sides, std::nullopt});
    for (int k = 0; k < sides; ++k)
        specs.push_back({sides + k, sides + (k + 1) % sides, std::nullopt});
    for (int k = 0; k < sides; ++k) specs.push_back({k, sides + k, std::nullopt});
    return build(verts, specs, name);
}

GeodesicNet seed_quad2_pent8() {
    const double a = std::asin(1.0 / std::sqrt(3.0)) * 180.0 / kPi;  // 35.264
    const double b = a - 21.428;
    std::vector<Vec> verts;
    for (int k = 0; k < 4; ++k) verts.push_back(sph(a, 90.0 * k));         // north quad
    for (int k = 0; k < 4; ++k) verts.push_back(sph(-a, 45.0 + 90.0 * k)); // south quad
    for (int k = 0; k < 8; ++k) verts.push_back(sph(k % 2 == 0 ? b : -b, 45.0 * k));
    std::vector<ArcSpec> specs;
    for (int k = 0; k < 4; ++k) specs.push_back({k, (k + 1) % 4, std::nullopt});
    for (int k = 0; k < 4; ++k) specs.push_back({4 + k, 4 + (k + 1) % 4, std::nullopt});
    for (int k = 0; k < 4; ++k) specs.push_back({k, 8 + 2 * k, std::nullopt});
    for (int k = 0; k < 4; ++k) specs.push_back({4 + k, 8 + 2 * k + 1, std::nullopt});
    for (int k = 0; k < 8; ++k) specs.push_back({8 + k, 8 + (k + 1) % 8, std::nullopt});
    return build(verts, specs, NetName::quad2_pent8);
}

GeodesicNet seed_quad4_pent4() {
    const double sg = (83.802 / 2) * kPi / 180.0;
    const double xa = 0.66783, za = 0.1075;
    const double ya = std::sqrt(1 - xa * xa - za * za);
    const Vec s1 = v3(std::sin(sg), 0, std::cos(sg));
    const Vec s2 = v3(-std::sin(sg), 0, std::cos(sg));
    const Vec a1 = v3(xa, ya, za), a2 = v3(-xa, ya, za);
    const Vec b1 = v3(xa, -ya, za), b2 = v3(-xa, -ya, za);
    auto rot = [](const Vec& v) { return v3(v[1], v[0], -v[2]); };
    // order: s1 s2 a1 a2 b1 b2 | s1' s2' c1 c2 d1 d2
    std::vector<Vec> verts = {s1,      s2,      a1,      a2,      b1,      b2,
                              rot(s1), rot(s2), rot(a1), rot(a2), rot(b1), rot(b2)};
    return build(verts,
                 edges({{0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 4}, {1, 5}, {4, 5},
                        {6, 7}, {6, 8}, {7, 9}, {8, 9}, {6, 10}, {7, 11}, {10, 11},
                        {2, 8}, {3, 10}, {4, 9}, {5, 11}}),
                 NetName::quad4_pent4);
}

GeodesicNet seed_quad3_pent6() {
    const double u = std::atan(std::sqrt(2.0)) * 180.0 / kPi;  // 54.736
    std::vector<Vec> verts = {v3(0, 0, 1), v3(0, 0, -1)};
    for (int k = 0; k < 3; ++k) {
        const double az = 120.0 * k;
        verts.push_back(sph(u, az));       // top of quad k
        verts.push_back(sph(-u, az));      // bottom
        verts.push_back(sph(0, az + u));   // right
        verts.push_back(sph(0, az - u));   // left
    }
    std::vector<ArcSpec> specs;
    for (int k = 0; k < 3; ++k) {
        const int t = 2 + 4 * k, bo = 3 + 4 * k, r = 4 + 4 * k, l = 5 + 4 * k;
        for (auto [i, j] : {std::pair{t, r}, {r, bo}, {bo, l}, {l, t}, {0, t}, {1, bo}})
            specs.push_back({i, j, std::nullopt});
    }
    for (int k = 0; k < 3; ++k)
        specs.push_back({4 + 4 * k, 5 + 4 * ((k + 1) % 3), std::nullopt});
    return build(verts, specs, NetName::quad3_pent6);
}

}  // namespace

GeodesicNet catalog_seed(NetName name) {
    switch (name) {
        case NetName::great_circle: return make_great_circle(3);
        case NetName::y_suspension: return seed_y_suspension();
        case NetName::tetrahedron: return seed_tetrahedron();
        case NetName::cube: return seed_cube();
        case NetName::pentagonal_prism:
            // ring latitude from matching the pentagon arc to 41.810 deg
            return seed_prism(5, 52.6226, NetName::pentagonal_prism);
        case NetName::triangular_prism:
            return seed_prism(3, std::asin(1.0 / 3.0) * 180.0 / kPi, NetName::triangular_prism);
        case NetName::dodecahedron: return seed_dodecahedron();
        case NetName::quad2_pent8: return seed_quad2_pent8();
        case NetName::quad4_pent4: return seed_quad4_pent4();
        case NetName::quad3_pent6: return seed_quad3_pent6();
    }
    throw NetError("catalog_seed: unknown name");
}

std::string catalog_dir() {
    if (const char* env = std::getenv("NETJACOBI_CATALOG_DIR"); env && *env) return env;
    return NETJACOBI_DEFAULT_CATALOG_DIR;
}

const GeodesicNet& catalog(NetName name) {
    static std::map<NetName, GeodesicNet> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;

    GeodesicNet net = [&] {
        const std::string dir = catalog_dir();
        if (!dir.empty()) {
            const auto path = std::filesystem::path(dir) / (to_string(name) + ".json");
            if (std::filesystem::exists(path)) return load_net_file(path.string());
        }
        GeodesicNet s = catalog_seed(name);
        return s.vertex_count() == 0 ? s : relax(s);
    }();
    return cache.emplace(name, std::move(net)).first->second;
}

}  // namespace netjacobi::net
