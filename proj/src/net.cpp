#include "netjacobi/net.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

namespace netjacobi::net {

namespace {
constexpr double kPi = std::numbers::pi;

double angle_between(const Vec& a, const Vec& b) {
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}
}  // namespace

const std::vector<NetName>& all_net_names() {
    static const std::vector<NetName> names = {
        NetName::great_circle,   NetName::y_suspension,     NetName::tetrahedron,
        NetName::cube,           NetName::pentagonal_prism, NetName::triangular_prism,
        NetName::dodecahedron,   NetName::quad2_pent8,      NetName::quad4_pent4,
        NetName::quad3_pent6,
    };
    return names;
}

std::string to_string(NetName name) {
    switch (name) {
        case NetName::great_circle: return "great_circle";
        case NetName::y_suspension: return "y_suspension";
        case NetName::tetrahedron: return "tetrahedron";
        case NetName::cube: return "cube";
        case NetName::pentagonal_prism: return "pentagonal_prism";
        case NetName::triangular_prism: return "triangular_prism";
        case NetName::dodecahedron: return "dodecahedron";
        case NetName::quad2_pent8: return "quad2_pent8";
        case NetName::quad4_pent4: return "quad4_pent4";
        case NetName::quad3_pent6: return "quad3_pent6";
    }
    return "?";
}

std::optional<NetName> parse_net_name(const std::string& s) {
    for (NetName n : all_net_names())
        if (to_string(n) == s) return n;
    return std::nullopt;
}

Vec GeodesicNet::inward_tangent(int arc, int end) const {
    const GeodesicArc& a = arcs[static_cast<size_t>(arc)];
    if (end == 0) return a.tangent_at_from;
    const Vec& v = vertices[static_cast<size_t>(a.from)];
    // gamma'(L) points out of the arc at the to-end
    return std::sin(a.length) * v - std::cos(a.length) * a.tangent_at_from;
}

const Vec& GeodesicNet::endpoint(int arc, int end) const {
    const GeodesicArc& a = arcs[static_cast<size_t>(arc)];
    return vertices[static_cast<size_t>(end == 0 ? a.from : a.to)];
}

Vec GeodesicNet::point_on_arc(int arc, double theta) const {
    const GeodesicArc& a = arcs[static_cast<size_t>(arc)];
    const Vec& v = closed_circle ? *a.via : vertices[static_cast<size_t>(a.from)];
    return std::cos(theta) * v + std::sin(theta) * a.tangent_at_from;
}

GeodesicNet assemble_net(int D, const std::vector<Vec>& vertices,
                         const std::vector<ArcSpec>& arc_specs,
                         const AssembleOptions& opts) {
    GeodesicNet net;
    net.ambient_dim = D;
    net.vertices = vertices;
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].size() != D)
            throw NetError("assemble_net: vertex " + std::to_string(i) + " has wrong dimension");
        if (!vertices[i].allFinite())
            throw NetError("assemble_net: vertex " + std::to_string(i) + " has non-finite entries");
        if (std::abs(vertices[i].norm() - 1.0) > opts.tol)
            throw NetError("assemble_net: vertex " + std::to_string(i) + " is not unit");
    }
    net.incidence.assign(vertices.size(), {});
    for (size_t k = 0; k < arc_specs.size(); ++k) {
        const ArcSpec& spec = arc_specs[k];
        if (spec.from < 0 || spec.to < 0 || spec.from >= static_cast<int>(vertices.size()) ||
            spec.to >= static_cast<int>(vertices.size()))
            throw NetError("assemble_net: arc " + std::to_string(k) + " has bad endpoint index");
        const Vec& p = vertices[static_cast<size_t>(spec.from)];
        const Vec& q = vertices[static_cast<size_t>(spec.to)];
        GeodesicArc arc;
        arc.from = spec.from;
        arc.to = spec.to;
        const double c = std::clamp(p.dot(q), -1.0, 1.0);
        if (c < -1.0 + 1e-10) {
            if (!spec.via)
                throw NetError("assemble_net: arc " + std::to_string(k) +
                               " joins antipodal endpoints and needs a via point");
            Vec w = *spec.via;
            if (w.size() != D) throw NetError("assemble_net: via point has wrong dimension");
            if (!w.allFinite())
                throw NetError("assemble_net: via point of arc " + std::to_string(k) +
                               " has non-finite entries");
            w -= w.dot(p) * p;
            if (w.norm() < 1e-8)
                throw NetError("assemble_net: via point of arc " + std::to_string(k) +
                               " is collinear with the endpoints");
            arc.tangent_at_from = w.normalized();
            arc.length = kPi;
            arc.via = spec.via->normalized();
        } else {
            if (spec.via)
                throw NetError("assemble_net: arc " + std::to_string(k) +
                               " has a via point but non-antipodal endpoints");
            Vec t = q - c * p;
            arc.length = angle_between(p, q);
            if (arc.length <= 1e-6)
                throw NetError("assemble_net: arc " + std::to_string(k) + " is degenerate");
            arc.tangent_at_from = t.normalized();
        }
        const int idx = static_cast<int>(net.arcs.size());
        net.arcs.push_back(std::move(arc));
        net.incidence[static_cast<size_t>(spec.from)].push_back({idx, 0});
        net.incidence[static_cast<size_t>(spec.to)].push_back({idx, 1});
    }
    // duplicate arcs: same endpoints and same starting tangent
    for (size_t i = 0; i < net.arcs.size(); ++i)
        for (size_t j = i + 1; j < net.arcs.size(); ++j) {
            const auto& a = net.arcs[i];
            const auto& b = net.arcs[j];
            if (a.from == b.from && a.to == b.to &&
                (a.tangent_at_from - b.tangent_at_from).norm() < 1e-10)
                throw NetError("assemble_net: arcs " + std::to_string(i) + " and " +
                               std::to_string(j) + " coincide");
        }
    if (!opts.allow_nonpolyhedral) {
        for (size_t v = 0; v < net.incidence.size(); ++v)
            if (net.incidence[v].size() != 3)
                throw NetError("assemble_net: vertex " + std::to_string(v) + " has valence " +
                               std::to_string(net.incidence[v].size()) + ", expected 3");
    }
    return net;
}

GeodesicNet make_great_circle(int D) {
    if (D < 3) throw NetError("make_great_circle: ambient dimension must be >= 3");
    GeodesicNet net;
    net.ambient_dim = D;
    net.closed_circle = true;
    net.name = to_string(NetName::great_circle);
    GeodesicArc arc;
    arc.from = -1;
    arc.to = -1;
    Vec anchor = Vec::Zero(D), tangent = Vec::Zero(D);
    anchor[0] = 1.0;
    tangent[1] = 1.0;
    arc.via = anchor;  // anchor point of the parameterization
    arc.tangent_at_from = tangent;
    arc.length = 2 * kPi;
    net.arcs.push_back(std::move(arc));
    return net;
}

double stationarity_residual(const GeodesicNet& net) {
    double worst = 0.0;
    for (int v = 0; v < net.vertex_count(); ++v) {
        Vec s = Vec::Zero(net.ambient_dim);
        for (auto [arc, end] : net.incidence[static_cast<size_t>(v)])
            s += net.inward_tangent(arc, end);
        worst = std::max(worst, s.norm());
    }
    return worst;
}

namespace {

// Rebuilds arcs from moved vertices, keeping combinatorics and via points.
GeodesicNet rebuild(const GeodesicNet& proto, const std::vector<Vec>& verts) {
    std::vector<ArcSpec> specs;
    specs.reserve(proto.arcs.size());
    for (const auto& a : proto.arcs) {
        ArcSpec s;
        s.from = a.from;
        s.to = a.to;
        if (a.via) {
            // keep a via only while the endpoints stay (near-)antipodal
            const Vec& p = verts[static_cast<size_t>(a.from)];
            const Vec& q = verts[static_cast<size_t>(a.to)];
            if (p.dot(q) < -1.0 + 1e-10) s.via = a.via;
        }
        specs.push_back(std::move(s));
    }
    AssembleOptions opts;
    opts.allow_nonpolyhedral = true;
    GeodesicNet out = assemble_net(proto.ambient_dim, verts, specs, opts);
    out.name = proto.name;
    return out;
}

Vec residual_vector(const GeodesicNet& net) {
    const int D = net.ambient_dim;
    Vec r(D * net.vertex_count());
    for (int v = 0; v < net.vertex_count(); ++v) {
        Vec s = Vec::Zero(D);
        for (auto [arc, end] : net.incidence[static_cast<size_t>(v)])
            s += net.inward_tangent(arc, end);
        r.segment(D * v, D) = s;
    }
    return r;
}

}  // namespace

GeodesicNet relax(const GeodesicNet& seed, const RelaxOptions& opts) {
    if (seed.vertex_count() == 0) return seed;
    const int D = seed.ambient_dim;
    const int nv = seed.vertex_count();
    std::vector<Vec> verts = seed.vertices;

    auto check_degeneration = [&](const GeodesicNet& n) {
        for (size_t e = 0; e < n.arcs.size(); ++e)
            if (n.arcs[e].length < opts.min_arc_length)
                throw NetError("relax: arc " + std::to_string(e) + " degenerated (length " +
                               std::to_string(n.arcs[e].length) + ")");
    };

    GeodesicNet cur = rebuild(seed, verts);
    Vec F = residual_vector(cur);
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        check_degeneration(cur);
        if (F.lpNorm<Eigen::Infinity>() < opts.tol) return cur;

        // tangent bases at each vertex
        std::vector<Mat> bases(static_cast<size_t>(nv));
        int ndof = 0;
        for (int v = 0; v < nv; ++v) {
            Mat proj = Mat::Identity(D, D) - verts[static_cast<size_t>(v)] *
                                                 verts[static_cast<size_t>(v)].transpose();
            bases[static_cast<size_t>(v)] = geom::orthonormalize(proj, 1e-8);
            ndof += static_cast<int>(bases[static_cast<size_t>(v)].cols());
        }
        // finite-difference Jacobian in the tangent parameterization
        Mat J(F.size(), ndof);
        const double h = 1e-7;
        int col = 0;
        for (int v = 0; v < nv; ++v) {
            for (int k = 0; k < bases[static_cast<size_t>(v)].cols(); ++k) {
                std::vector<Vec> verts2 = verts;
                verts2[static_cast<size_t>(v)] =
                    (verts[static_cast<size_t>(v)] + h * bases[static_cast<size_t>(v)].col(k))
                        .normalized();
                J.col(col++) = (residual_vector(rebuild(cur, verts2)) - F) / h;
            }
        }
        Vec d = J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-F);

        // backtracking on the residual norm
        double step = 1.0;
        bool accepted = false;
        const double f0 = F.norm();
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<Vec> verts2 = verts;
            int c = 0;
            for (int v = 0; v < nv; ++v) {
                const int nb = static_cast<int>(bases[static_cast<size_t>(v)].cols());
                verts2[static_cast<size_t>(v)] =
                    (verts[static_cast<size_t>(v)] +
                     step * bases[static_cast<size_t>(v)] * d.segment(c, nb))
                        .normalized();
                c += nb;
            }
            GeodesicNet cand = rebuild(cur, verts2);
            Vec F2 = residual_vector(cand);
            if (F2.norm() < f0) {
                verts = std::move(verts2);
                cur = std::move(cand);
                F = std::move(F2);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw NetError("relax: line search stalled at residual " + std::to_string(f0));
    }
    if (F.lpNorm<Eigen::Infinity>() < opts.tol) return cur;
    throw NetError("relax: no convergence within " + std::to_string(opts.max_iters) +
                   " iterations (residual " + std::to_string(F.norm()) + ")");
}

bool is_suspension(const GeodesicNet& net) {
    if (net.vertex_count() != 2) return false;
    if ((net.vertices[0] + net.vertices[1]).norm() > 1e-8) return false;
    for (const auto& a : net.arcs) {
        const bool joins_poles = (a.from == 0 && a.to == 1) || (a.from == 1 && a.to == 0);
        if (!joins_poles) return false;
    }
    return true;
}

bool is_polyhedral(const GeodesicNet& net, double tol) {
    if (net.closed_circle || net.vertex_count() == 0) return false;
    for (const auto& inc : net.incidence)
        if (inc.size() != 3) return false;
    if (stationarity_residual(net) > tol) return false;
    return !is_suspension(net);
}

std::vector<double> edge_length_profile(const GeodesicNet& net) {
    std::vector<double> out;
    out.reserve(net.arcs.size());
    for (const auto& a : net.arcs) out.push_back(a.length * 180.0 / kPi);
    std::sort(out.begin(), out.end());
    return out;
}

GeodesicNet embed(const GeodesicNet& net, int new_D) {
    if (new_D < net.ambient_dim) throw NetError("embed: target dimension too small");
    auto pad = [&](const Vec& v) {
        Vec w = Vec::Zero(new_D);
        w.head(v.size()) = v;
        return w;
    };
    GeodesicNet out = net;
    out.ambient_dim = new_D;
    for (auto& v : out.vertices) v = pad(v);
    for (auto& a : out.arcs) {
        a.tangent_at_from = pad(a.tangent_at_from);
        if (a.via) a.via = pad(*a.via);
    }
    return out;
}

double total_length(const GeodesicNet& net) {
    double s = 0.0;
    for (const auto& a : net.arcs) s += a.length;
    return s;
}

// ---------------- JSON ----------------

namespace {
using nlohmann::json;

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}
}  // namespace

std::string to_json(const GeodesicNet& net, int indent) {
    json j;
    j["ambient_dim"] = net.ambient_dim;
    j["vertices"] = json::array();
    for (const auto& v : net.vertices) j["vertices"].push_back(vec_to_json(v));
    j["arcs"] = json::array();
    for (const auto& a : net.arcs) {
        json ja;
        ja["from"] = a.from;
        ja["to"] = a.to;
        ja["via"] = a.via ? vec_to_json(*a.via) : json(nullptr);
        j["arcs"].push_back(std::move(ja));
    }
    j["name"] = net.name ? json(*net.name) : json(nullptr);
    return j.dump(indent);
}

GeodesicNet net_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw NetError(std::string("net_from_json: parse error: ") + e.what());
    }
    for (const char* key : {"ambient_dim", "vertices", "arcs"})
        if (!j.contains(key)) throw NetError(std::string("net_from_json: missing field '") + key + "'");
    const int D = j["ambient_dim"].get<int>();
    if (D < 2) throw NetError("net_from_json: ambient_dim must be >= 2");

    std::vector<Vec> verts;
    for (const auto& jv : j["vertices"]) {
        Vec v = vec_from_json(jv);
        if (v.size() != D) throw NetError("net_from_json: vertex dimension != ambient_dim");
        verts.push_back(std::move(v));
    }
    std::vector<ArcSpec> specs;
    bool circle = false;
    for (const auto& ja : j["arcs"]) {
        ArcSpec s;
        s.from = ja.at("from").get<int>();
        s.to = ja.at("to").get<int>();
        if (ja.contains("via") && !ja["via"].is_null()) s.via = vec_from_json(ja["via"]);
        if (s.from == -1 && s.to == -1) circle = true;
        specs.push_back(std::move(s));
    }
    std::optional<std::string> name;
    if (j.contains("name") && !j["name"].is_null()) name = j["name"].get<std::string>();

    if (circle) {
        if (!verts.empty() || specs.size() != 1)
            throw NetError("net_from_json: a closed-circle entry must have no vertices and one arc");
        GeodesicNet net = make_great_circle(D);
        net.name = name;
        return net;
    }
    AssembleOptions opts;
    opts.allow_nonpolyhedral = true;  // validation is reported, not forced, on load
    GeodesicNet net = assemble_net(D, verts, specs, opts);
    net.name = name;
    return net;
}

GeodesicNet load_net_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetError("load_net_file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return net_from_json(ss.str());
}

void save_net_file(const GeodesicNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NetError("save_net_file: cannot open " + path);
    out << to_json(net) << "\n";
}

}  // namespace netjacobi::net
