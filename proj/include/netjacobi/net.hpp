#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netjacobi/geom.hpp"

namespace netjacobi::net {

using geom::Mat;
using geom::Vec;

struct NetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Great-circle arc between two vertices of a net.  Parameterized by arclength
// as gamma(theta) = cos(theta) v_from + sin(theta) tangent_at_from.
struct GeodesicArc {
    int from = -1;
    int to = -1;
    Vec tangent_at_from;
    double length = 0.0;
    // Interior point fixing the circle when the endpoints are antipodal
    // (also carries the plane of the closed-circle special entry).
    std::optional<Vec> via;
};

enum class NetName {
    great_circle,
    y_suspension,
    tetrahedron,
    cube,
    pentagonal_prism,
    triangular_prism,
    dodecahedron,
    quad2_pent8,
    quad4_pent4,
    quad3_pent6,
};

const std::vector<NetName>& all_net_names();
std::string to_string(NetName name);
std::optional<NetName> parse_net_name(const std::string& s);

struct ArcSpec {
    int from = -1;
    int to = -1;
    std::optional<Vec> via;
};

class GeodesicNet {
  public:
    int ambient_dim = 0;
    std::vector<Vec> vertices;
    std::vector<GeodesicArc> arcs;
    // per vertex: (arc index, end) pairs, end 0 = from, 1 = to
    std::vector<std::vector<std::pair<int, int>>> incidence;
    std::optional<std::string> name;
    // The net consisting of a single closed great circle (no junctions).
    bool closed_circle = false;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int arc_count() const { return static_cast<int>(arcs.size()); }

    // Unit tangent at the given end of an arc, pointing into the arc.
    Vec inward_tangent(int arc, int end) const;
    // Position of the given end of an arc.
    const Vec& endpoint(int arc, int end) const;
    Vec point_on_arc(int arc, double theta) const;
};

struct AssembleOptions {
    double tol = 1e-8;
    bool allow_nonpolyhedral = false;
};

// Builds arcs (tangents, lengths) and incidence from endpoint specs.
// Rejects non-unit vertices, antipodal pairs without via, and vertices of
// valence != 3 unless allow_nonpolyhedral is set.
GeodesicNet assemble_net(int D, const std::vector<Vec>& vertices,
                         const std::vector<ArcSpec>& arc_specs,
                         const AssembleOptions& opts = {});

// The canonical closed great circle in the coordinate (0,1)-plane.
GeodesicNet make_great_circle(int D = 3);

// max over vertices of |sum of inward unit tangents|
double stationarity_residual(const GeodesicNet& net);

struct RelaxOptions {
    int max_iters = 100;
    double tol = 1e-12;
    double min_arc_length = 1e-6;
};

// Moves the vertices (combinatorics fixed) to a stationary configuration:
// damped Gauss-Newton on the junction balance residual, with backtracking on
// the residual norm.  Throws NetError on non-convergence or if an arc
// degenerates.  Note the equiangular nets are saddle points of total length,
// so the iteration targets the stationarity residual, not the length.
GeodesicNet relax(const GeodesicNet& seed, const RelaxOptions& opts = {});

// True iff the vertex set is a single antipodal pair and every arc joins the
// two poles (the suspension obstruction to being polyhedral).
bool is_suspension(const GeodesicNet& net);

// 3-valent everywhere, stationary, and neither a suspension nor the circle.
bool is_polyhedral(const GeodesicNet& net, double tol = 1e-8);

// Ascending arc lengths in degrees.
std::vector<double> edge_length_profile(const GeodesicNet& net);

// Zero-pads all vectors into a larger ambient space.
GeodesicNet embed(const GeodesicNet& net, int new_D);

double total_length(const GeodesicNet& net);

// ---- JSON (schema: ambient_dim, vertices, arcs[{from,to,via}], name) ----
std::string to_json(const GeodesicNet& net, int indent = 2);
GeodesicNet net_from_json(const std::string& text);
GeodesicNet load_net_file(const std::string& path);
void save_net_file(const GeodesicNet& net, const std::string& path);

// ---- catalog ----

// Combinatorial seed with approximate coordinates for a catalog entry.
GeodesicNet catalog_seed(NetName name);

// Directory holding the bundled relaxed catalog nets; NETJACOBI_CATALOG_DIR
// overrides the built-in default.
std::string catalog_dir();

// Relaxed catalog net.  Loads the bundled data file when present, otherwise
// relaxes the built-in seed.  Cached per process.
const GeodesicNet& catalog(NetName name);

}  // namespace netjacobi::net
