// lattice.hpp - the r-diluted square lattice: finite windows, periodic boxes
// with their closing edges, vertex levels, r-edge decomposition of unit edges,
// and the reflection automorphisms of the boxes.
#pragma once

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errw/graph.hpp"

namespace errw {

inline long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline long long floor_mod(long long a, long long b) {
    return a - floor_div(a, b) * b;
}

// Membership in the diluted lattice: at least one coordinate divisible by r.
inline bool in_diluted_lattice(const LatticeVertex& v, int r) {
    return floor_mod(v.x1, r) == 0 || floor_mod(v.x2, r) == 0;
}

// Membership in the set of four-way crossings (both coordinates in rZ).
inline bool in_crossing_set(const LatticeVertex& v, int r) {
    return floor_mod(v.x1, r) == 0 && floor_mod(v.x2, r) == 0;
}

// Square-shell index of a diluted-lattice vertex: ceil(|v|_inf / r).
inline long long level_of(const LatticeVertex& v, int r) {
    if (r < 2) throw std::invalid_argument("dilution factor r must be >= 2");
    if (!in_diluted_lattice(v, r)) throw std::invalid_argument("vertex not on the diluted lattice");
    const long long n = linf_norm(v);
    return (n + r - 1) / r;
}

struct PeriodicBoxSpec {
    int r = 2;  // dilution factor, >= 2
    int i = 2;  // box size, > 1

    long long period() const { return static_cast<long long>(r) * i; }
    // canonical representatives live in (lo, hi] per coordinate
    long long hi() const { return static_cast<long long>(r) * (i / 2); }
    long long lo() const { return hi() - period(); }

    void validate() const {
        if (i <= 1) throw std::invalid_argument("box size i must be > 1");
        if (r < 2) throw std::invalid_argument("dilution factor r must be >= 2");
    }

    long long wrap1(long long z) const {
        return lo() + 1 + floor_mod(z - lo() - 1, period());
    }

    LatticeVertex wrap(const LatticeVertex& v) const {
        return {wrap1(v.x1), wrap1(v.x2)};
    }
};

// A finite graph cut from (or wrapped around) the diluted lattice, together
// with the structure the bound machinery needs: per-edge r-edge membership
// and per-vertex levels of the representative coordinates.
struct LatticeGraph {
    FiniteGraph graph;
    int r = 2;
    bool torus = false;
    PeriodicBoxSpec spec;                 // meaningful when torus
    long long extent = 0;                 // meaningful when !torus
    std::vector<int> r_edge_id;           // per edge
    std::vector<long long> level;         // per vertex
    std::unordered_map<long long, VertexId> index;  // coord key -> vertex

    std::optional<VertexId> vertex_at(const LatticeVertex& p) const {
        auto it = index.find(coord_key(p));
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    // unique for coordinates below 2^31 in magnitude, far beyond any window
    static long long coord_key(const LatticeVertex& p) {
        const auto a = static_cast<std::uint32_t>(static_cast<std::int32_t>(p.x1));
        const auto b = static_cast<std::uint32_t>(static_cast<std::int32_t>(p.x2));
        return static_cast<long long>((static_cast<std::uint64_t>(a) << 32) | b);
    }
};

// Decomposition of a unit lattice edge {u, v} into its containing r-edge
// {u', v'} with offsets j_u + j_v = r - 1. The endpoint of the edge that
// touches a crossing point gets offset r - 1.
struct REdgeDecomposition {
    LatticeVertex u_prime, v_prime;
    int j_u = 0, j_v = 0;
};

inline REdgeDecomposition r_edge_of(const LatticeVertex& u, const LatticeVertex& v, int r) {
    if (r < 2) throw std::invalid_argument("dilution factor r must be >= 2");
    if (!in_diluted_lattice(u, r) || !in_diluted_lattice(v, r))
        throw std::invalid_argument("edge endpoints not on the diluted lattice");
    const long long dx = v.x1 - u.x1, dy = v.x2 - u.x2;
    if (std::llabs(dx) + std::llabs(dy) != 1)
        throw std::invalid_argument("not a unit lattice edge");

    const bool horizontal = (dy == 0);
    // a horizontal unit edge needs x2 in rZ (consecutive x1 cannot both be in rZ)
    const long long var_u = horizontal ? u.x1 : u.x2;
    const long long var_v = horizontal ? v.x1 : v.x2;
    const long long fixed = horizontal ? u.x2 : u.x1;
    if (floor_mod(fixed, r) != 0)
        throw std::invalid_argument("edge does not lie inside an r-edge segment");

    const long long w = std::min(var_u, var_v);
    const long long x0 = r * floor_div(w, r);
    const int d = static_cast<int>(w - x0);  // offset of the lower endpoint, 0..r-1

    REdgeDecomposition out;
    const LatticeVertex low = horizontal ? LatticeVertex{x0, fixed} : LatticeVertex{fixed, x0};
    const LatticeVertex high = horizontal ? LatticeVertex{x0 + r, fixed} : LatticeVertex{fixed, x0 + r};
    if (var_u < var_v) {
        out.u_prime = low;
        out.v_prime = high;
        out.j_u = r - 1 - d;
        out.j_v = d;
    } else {
        out.u_prime = high;
        out.v_prime = low;
        out.j_u = d;
        out.j_v = r - 1 - d;
    }
    return out;
}

// The r unit edges contained in the straight segment of an r-edge.
struct REdge {
    LatticeVertex a, b;  // crossing-point endpoints, |a - b| = r

    std::vector<std::pair<LatticeVertex, LatticeVertex>> unit_edges() const {
        const long long dx = (b.x1 > a.x1) - (b.x1 < a.x1);
        const long long dy = (b.x2 > a.x2) - (b.x2 < a.x2);
        std::vector<std::pair<LatticeVertex, LatticeVertex>> out;
        LatticeVertex p = a;
        while (!(p == b)) {
            LatticeVertex q{p.x1 + dx, p.x2 + dy};
            out.emplace_back(p, q);
            p = q;
        }
        return out;
    }
};

namespace detail {

// shared r-edge id assignment: key = (lower segment endpoint, axis),
// ids handed out in first-encounter order over edges in id order
class REdgeIdAssigner {
public:
    explicit REdgeIdAssigner(const PeriodicBoxSpec* wrap_spec) : spec_(wrap_spec) {}

    int id_for(const LatticeVertex& u, bool horizontal, int r) {
        const long long var = horizontal ? u.x1 : u.x2;
        const long long fixed = horizontal ? u.x2 : u.x1;
        const long long x0 = r * floor_div(var, r);
        LatticeVertex low = horizontal ? LatticeVertex{x0, fixed} : LatticeVertex{fixed, x0};
        if (spec_) low = spec_->wrap(low);
        const auto key = std::make_tuple(low.x1, low.x2, horizontal);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        const int id = static_cast<int>(ids_.size());
        ids_.emplace(key, id);
        return id;
    }

    int count() const { return static_cast<int>(ids_.size()); }

private:
    const PeriodicBoxSpec* spec_;
    std::map<std::tuple<long long, long long, bool>, int> ids_;
};

} // namespace detail

// Periodic box: vertex set = diluted-lattice points of the fundamental domain
// (half-open box of Eq-style representatives), edges wrapped modulo ri, with
// the non-representable ones tagged as periodically closing. Vertex ids are
// assigned in row-major order of the representatives, so identical specs give
// identical graphs everywhere.
inline LatticeGraph build_periodic_box(const PeriodicBoxSpec& spec) {
    spec.validate();
    LatticeGraph out;
    out.r = spec.r;
    out.torus = true;
    out.spec = spec;

    const long long lo = spec.lo(), hi = spec.hi();
    std::vector<LatticeVertex> coords;
    std::vector<std::uint8_t> core;
    for (long long x2 = lo + 1; x2 <= hi; ++x2)
        for (long long x1 = lo + 1; x1 <= hi; ++x1) {
            const LatticeVertex p{x1, x2};
            if (!in_diluted_lattice(p, spec.r)) continue;
            out.index.emplace(LatticeGraph::coord_key(p), static_cast<VertexId>(coords.size()));
            core.push_back(in_crossing_set(p, spec.r) ? 1 : 0);
            coords.push_back(p);
        }

    out.graph.reset(static_cast<int>(coords.size()));
    std::vector<std::uint8_t> closing;
    detail::REdgeIdAssigner rids(&spec);
    for (VertexId vid = 0; vid < static_cast<int>(coords.size()); ++vid) {
        const LatticeVertex& u = coords[static_cast<std::size_t>(vid)];
        for (int axis = 0; axis < 2; ++axis) {
            const LatticeVertex w = (axis == 0) ? LatticeVertex{u.x1 + 1, u.x2}
                                                : LatticeVertex{u.x1, u.x2 + 1};
            if (!in_diluted_lattice(w, spec.r)) continue;
            const bool off_domain = (axis == 0) ? (w.x1 > hi) : (w.x2 > hi);
            const LatticeVertex wr = spec.wrap(w);
            const auto nb = out.vertex_at(wr);
            out.graph.add_edge(vid, *nb);
            closing.push_back(off_domain ? 1 : 0);
            out.r_edge_id.push_back(rids.id_for(u, axis == 0, spec.r));
        }
    }
    out.graph.set_coords(coords);
    out.graph.set_periodic_closing(std::move(closing));
    out.graph.set_lattice_core(std::move(core));
    out.level.reserve(coords.size());
    for (const auto& p : coords) out.level.push_back(level_of(p, spec.r));
    return out;
}

// Finite window of the infinite diluted lattice: all vertices with
// |v|_inf <= extent and the unit edges between them.
inline LatticeGraph build_window_graph(int r, long long extent) {
    if (r < 2) throw std::invalid_argument("dilution factor r must be >= 2");
    if (extent < r) throw std::invalid_argument("window extent must be >= r");
    LatticeGraph out;
    out.r = r;
    out.extent = extent;

    std::vector<LatticeVertex> coords;
    std::vector<std::uint8_t> core;
    for (long long x2 = -extent; x2 <= extent; ++x2)
        for (long long x1 = -extent; x1 <= extent; ++x1) {
            const LatticeVertex p{x1, x2};
            if (!in_diluted_lattice(p, r)) continue;
            out.index.emplace(LatticeGraph::coord_key(p), static_cast<VertexId>(coords.size()));
            core.push_back(in_crossing_set(p, r) ? 1 : 0);
            coords.push_back(p);
        }

    out.graph.reset(static_cast<int>(coords.size()));
    detail::REdgeIdAssigner rids(nullptr);
    for (VertexId vid = 0; vid < static_cast<int>(coords.size()); ++vid) {
        const LatticeVertex& u = coords[static_cast<std::size_t>(vid)];
        for (int axis = 0; axis < 2; ++axis) {
            const LatticeVertex w = (axis == 0) ? LatticeVertex{u.x1 + 1, u.x2}
                                                : LatticeVertex{u.x1, u.x2 + 1};
            if (!in_diluted_lattice(w, r)) continue;
            const auto nb = out.vertex_at(w);
            if (!nb) continue;  // outside the window
            out.graph.add_edge(vid, *nb);
            out.r_edge_id.push_back(rids.id_for(u, axis == 0, r));
        }
    }
    out.graph.set_coords(coords);
    out.graph.set_lattice_core(std::move(core));
    out.level.reserve(coords.size());
    for (const auto& p : coords) out.level.push_back(level_of(p, r));
    return out;
}

// Smallest box size i for which the crossing point ell has its full degree-4
// neighborhood among the representatives: i = 2(|ell|_inf / r + 1).
inline int i0_for(const LatticeVertex& ell, int r) {
    if (!in_crossing_set(ell, r)) throw std::invalid_argument("ell must be a crossing point");
    return static_cast<int>(2 * (linf_norm(ell) / r + 1));
}

// true when the crossing point has all four incident edges representable
// inside the fundamental domain (none periodically closing)
inline bool has_full_crossing_neighborhood(const LatticeGraph& box, const LatticeVertex& ell) {
    const auto v = box.vertex_at(box.spec.wrap(ell));
    if (!v || !box.graph.in_lattice_core(*v)) return false;
    const auto& inc = box.graph.incident_edges(*v);
    if (inc.size() != 4) return false;
    for (EdgeId e : inc)
        if (box.graph.periodic_closing(e)) return false;
    return true;
}

// The reflection v -> ell - v (mod ri) of a periodic box; swaps the origin
// with ell and is an involution.
inline VertexPermutation reflection_automorphism(const LatticeVertex& ell, const LatticeGraph& box) {
    if (!box.torus) throw std::invalid_argument("reflection automorphism requires a periodic box");
    if (!in_crossing_set(ell, box.r)) throw std::invalid_argument("ell must be a crossing point");
    const auto lv = box.vertex_at(box.spec.wrap(ell));
    if (!lv) throw std::invalid_argument("ell not in the box");
    VertexPermutation f(static_cast<std::size_t>(box.graph.vertex_count()));
    for (VertexId v = 0; v < box.graph.vertex_count(); ++v) {
        const LatticeVertex& p = box.graph.coord(v);
        const LatticeVertex img = box.spec.wrap({ell.x1 - p.x1, ell.x2 - p.x2});
        const auto iv = box.vertex_at(img);
        if (!iv) throw std::logic_error("reflection image missing from box");
        f[static_cast<std::size_t>(v)] = *iv;
    }
    return f;
}

// Window that doubles its extent whenever the walker reaches the rim, so a
// simulation on the infinite lattice never sees a truncated neighborhood.
class GrowableWindow {
public:
    GrowableWindow(int r, long long initial_extent)
        : window_(build_window_graph(r, std::max<long long>(initial_extent, r))) {}

    const LatticeGraph& lattice() const { return window_; }

    VertexId origin() const { return *window_.vertex_at({0, 0}); }

    // Grows (and remaps the per-edge counters through coordinate identity)
    // until vertex v has its full infinite-lattice neighborhood. Returns the
    // id of v in the possibly rebuilt graph.
    VertexId ensure_interior(VertexId v, std::vector<long long>& edge_counts) {
        LatticeVertex p = window_.graph.coord(v);
        while (linf_norm(p) >= window_.extent) {
            regrow(window_.extent * 2, edge_counts);
        }
        return *window_.vertex_at(p);
    }

private:
    void regrow(long long new_extent, std::vector<long long>& edge_counts) {
        LatticeGraph bigger = build_window_graph(window_.r, new_extent);
        std::vector<long long> remapped(static_cast<std::size_t>(bigger.graph.edge_count()), 0);
        for (EdgeId e = 0; e < window_.graph.edge_count(); ++e) {
            if (edge_counts[static_cast<std::size_t>(e)] == 0) continue;
            const auto& ep = window_.graph.endpoints(e);
            const auto u = bigger.vertex_at(window_.graph.coord(ep[0]));
            const auto v = bigger.vertex_at(window_.graph.coord(ep[1]));
            const auto ne = bigger.graph.find_edge(*u, *v);
            remapped[static_cast<std::size_t>(*ne)] = edge_counts[static_cast<std::size_t>(e)];
        }
        edge_counts = std::move(remapped);
        window_ = std::move(bigger);
    }

    LatticeGraph window_;
};

} // namespace errw
