// graph.hpp - finite undirected graphs with dense integer indexing, initial
// weights, weighted-graph automorphisms, and the reflection-symmetry check
// that the whole bound machinery rests on.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace errw {

using VertexId = int;
using EdgeId = int;

// Integer lattice point; only meaningful for graphs built from Z^2 pieces.
struct LatticeVertex {
    long long x1 = 0;
    long long x2 = 0;

    friend bool operator==(const LatticeVertex&, const LatticeVertex&) = default;
};

inline long long linf_norm(const LatticeVertex& v) {
    return std::max(std::llabs(v.x1), std::llabs(v.x2));
}

// Finite connected undirected graph. No self-loops, no parallel edges.
// Vertices and edges carry dense contiguous ids assigned at construction;
// lattice-derived graphs additionally carry coordinates and tags.
class FiniteGraph {
public:
    FiniteGraph() = default;

    explicit FiniteGraph(int n_vertices) { reset(n_vertices); }

    void reset(int n_vertices) {
        if (n_vertices <= 0) throw std::invalid_argument("graph needs at least one vertex");
        n_ = n_vertices;
        edges_.clear();
        incident_.assign(static_cast<std::size_t>(n_), {});
        edge_lookup_.clear();
        coords_.clear();
        periodic_closing_.clear();
        in_lattice_core_.clear();
    }

    EdgeId add_edge(VertexId u, VertexId v) {
        if (u == v) throw std::invalid_argument("self-loop rejected");
        if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::invalid_argument("edge endpoint out of range");
        if (u > v) std::swap(u, v);
        const std::uint64_t key = pair_key(u, v);
        if (edge_lookup_.count(key)) throw std::invalid_argument("parallel edge rejected");
        const EdgeId id = static_cast<EdgeId>(edges_.size());
        edges_.push_back({u, v});
        edge_lookup_.emplace(key, id);
        incident_[static_cast<std::size_t>(u)].push_back(id);
        incident_[static_cast<std::size_t>(v)].push_back(id);
        return id;
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::array<VertexId, 2>& endpoints(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

    VertexId other_end(EdgeId e, VertexId v) const {
        const auto& ep = endpoints(e);
        if (ep[0] == v) return ep[1];
        if (ep[1] == v) return ep[0];
        throw std::invalid_argument("vertex not on edge");
    }

    bool edge_has_vertex(EdgeId e, VertexId v) const {
        const auto& ep = endpoints(e);
        return ep[0] == v || ep[1] == v;
    }

    const std::vector<EdgeId>& incident_edges(VertexId v) const {
        return incident_[static_cast<std::size_t>(v)];
    }

    int degree(VertexId v) const { return static_cast<int>(incident_edges(v).size()); }

    std::optional<EdgeId> find_edge(VertexId u, VertexId v) const {
        if (u > v) std::swap(u, v);
        auto it = edge_lookup_.find(pair_key(u, v));
        if (it == edge_lookup_.end()) return std::nullopt;
        return it->second;
    }

    bool adjacent(VertexId u, VertexId v) const { return find_edge(u, v).has_value(); }

    bool connected() const {
        if (n_ == 0) return false;
        std::vector<char> seen(static_cast<std::size_t>(n_), 0);
        std::vector<VertexId> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (EdgeId e : incident_edges(v)) {
                VertexId w = other_end(e, v);
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        return reached == n_;
    }

    // --- optional lattice annotations ---

    bool has_coords() const { return !coords_.empty(); }

    void set_coords(std::vector<LatticeVertex> coords) {
        if (static_cast<int>(coords.size()) != n_) throw std::invalid_argument("coords size mismatch");
        coords_ = std::move(coords);
    }

    const LatticeVertex& coord(VertexId v) const { return coords_[static_cast<std::size_t>(v)]; }

    std::optional<VertexId> vertex_at(const LatticeVertex& p) const {
        for (VertexId v = 0; v < n_; ++v)
            if (coords_[static_cast<std::size_t>(v)] == p) return v;
        return std::nullopt;
    }

    void set_periodic_closing(std::vector<std::uint8_t> tags) {
        if (static_cast<int>(tags.size()) != edge_count()) throw std::invalid_argument("edge tag size mismatch");
        periodic_closing_ = std::move(tags);
    }

    bool periodic_closing(EdgeId e) const {
        return !periodic_closing_.empty() && periodic_closing_[static_cast<std::size_t>(e)] != 0;
    }

    void set_lattice_core(std::vector<std::uint8_t> tags) {
        if (static_cast<int>(tags.size()) != n_) throw std::invalid_argument("vertex tag size mismatch");
        in_lattice_core_ = std::move(tags);
    }

    // true when the vertex is a four-way crossing (member of L_r)
    bool in_lattice_core(VertexId v) const {
        return !in_lattice_core_.empty() && in_lattice_core_[static_cast<std::size_t>(v)] != 0;
    }

private:
    static std::uint64_t pair_key(VertexId u, VertexId v) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    }

    int n_ = 0;
    std::vector<std::array<VertexId, 2>> edges_;
    std::vector<std::vector<EdgeId>> incident_;
    std::unordered_map<std::uint64_t, EdgeId> edge_lookup_;
    std::vector<LatticeVertex> coords_;
    std::vector<std::uint8_t> periodic_closing_;
    std::vector<std::uint8_t> in_lattice_core_;
};

// Strictly positive per-edge initial weights a_e with the derived per-vertex
// sums a_v.
struct InitialWeights {
    std::vector<double> edge;    // a_e
    std::vector<double> vertex;  // a_v = sum of a_e over incident edges

    static InitialWeights constant(const FiniteGraph& g, double a) {
        if (!(a > 0.0)) throw std::invalid_argument("initial weight must be positive");
        return from_edges(g, std::vector<double>(static_cast<std::size_t>(g.edge_count()), a));
    }

    static InitialWeights from_edges(const FiniteGraph& g, std::vector<double> a_e) {
        if (static_cast<int>(a_e.size()) != g.edge_count())
            throw std::invalid_argument("one initial weight per edge required");
        for (double a : a_e)
            if (!(a > 0.0)) throw std::invalid_argument("initial weights must be positive");
        InitialWeights w;
        w.edge = std::move(a_e);
        w.vertex.assign(static_cast<std::size_t>(g.vertex_count()), 0.0);
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            for (EdgeId e : g.incident_edges(v))
                w.vertex[static_cast<std::size_t>(v)] += w.edge[static_cast<std::size_t>(e)];
        return w;
    }
};

// Vertex permutation, f[v] = image of v.
using VertexPermutation = std::vector<VertexId>;

inline bool is_permutation_of_vertices(const FiniteGraph& g, const VertexPermutation& f) {
    if (static_cast<int>(f.size()) != g.vertex_count()) return false;
    std::vector<char> hit(f.size(), 0);
    for (VertexId img : f) {
        if (img < 0 || img >= g.vertex_count() || hit[static_cast<std::size_t>(img)]) return false;
        hit[static_cast<std::size_t>(img)] = 1;
    }
    return true;
}

// Image edge id under a vertex permutation; nullopt if the image pair is not
// an edge (i.e. f is not a graph automorphism).
inline std::optional<EdgeId> map_edge(const FiniteGraph& g, const VertexPermutation& f, EdgeId e) {
    const auto& ep = g.endpoints(e);
    return g.find_edge(f[static_cast<std::size_t>(ep[0])], f[static_cast<std::size_t>(ep[1])]);
}

struct AssumptionReport {
    bool pass = true;
    std::vector<std::string> violations;

    void fail(std::string what) {
        pass = false;
        violations.push_back(std::move(what));
    }
};

// Reflection-symmetry assumption on (G, a, v0, v1, e0, f, phi):
//   (a) v0 != v1 and not adjacent,
//   (b) v0 in e0,
//   (c) f is a weight-preserving graph automorphism swapping v0 and v1,
//   (d) phi = 0 on edges at v0 and phi = 1 on edges at v1, phi in [0,1].
// Never silently passes: every failing clause is named in the report.
inline AssumptionReport check_assumption(const FiniteGraph& g,
                                         const InitialWeights& a,
                                         VertexId v0, VertexId v1, EdgeId e0,
                                         const VertexPermutation& f,
                                         const std::vector<double>& phi) {
    AssumptionReport rep;
    if (v0 < 0 || v0 >= g.vertex_count() || v1 < 0 || v1 >= g.vertex_count()) {
        rep.fail("(a) v0 or v1 out of range");
        return rep;
    }
    if (v0 == v1) rep.fail("(a) v0 == v1");
    else if (g.adjacent(v0, v1)) rep.fail("(a) v0 adjacent to v1");

    if (e0 < 0 || e0 >= g.edge_count()) rep.fail("(b) e0 out of range");
    else if (!g.edge_has_vertex(e0, v0)) rep.fail("(b) e0 not incident to v0");

    if (!is_permutation_of_vertices(g, f)) {
        rep.fail("(c) f is not a vertex permutation");
    } else {
        if (f[static_cast<std::size_t>(v0)] != v1) rep.fail("(c) f(v0) != v1");
        if (f[static_cast<std::size_t>(v1)] != v0) rep.fail("(c) f(v1) != v0");
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            auto img = map_edge(g, f, e);
            if (!img) {
                rep.fail("(c) f does not map edge " + std::to_string(e) + " to an edge");
                break;
            }
            if (a.edge[static_cast<std::size_t>(*img)] != a.edge[static_cast<std::size_t>(e)]) {
                rep.fail("(c) f does not preserve the weight of edge " + std::to_string(e));
                break;
            }
        }
        // image count equals edge count => edge map is injective, hence onto
    }

    if (static_cast<int>(phi.size()) != g.edge_count()) {
        rep.fail("(d) phi size mismatch");
    } else {
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            const double p = phi[static_cast<std::size_t>(e)];
            if (!(p >= 0.0 && p <= 1.0)) {
                rep.fail("(d) phi(" + std::to_string(e) + ") outside [0,1]");
                break;
            }
        }
        for (EdgeId e : g.incident_edges(v0))
            if (phi[static_cast<std::size_t>(e)] != 0.0) {
                rep.fail("(d) phi != 0 on edge " + std::to_string(e) + " at v0");
                break;
            }
        for (EdgeId e : g.incident_edges(v1))
            if (phi[static_cast<std::size_t>(e)] != 1.0) {
                rep.fail("(d) phi != 1 on edge " + std::to_string(e) + " at v1");
                break;
            }
    }
    return rep;
}

// One fully-specified reflection-symmetric instance; the unit every bound and
// sampler below operates on.
struct SymmetricInstance {
    FiniteGraph graph;
    InitialWeights a;
    VertexId v0 = 0;
    VertexId v1 = 0;
    EdgeId e0 = 0;
    VertexPermutation automorphism;
    std::vector<double> phi;

    AssumptionReport check() const {
        return check_assumption(graph, a, v0, v1, e0, automorphism, phi);
    }

    void require_valid() const {
        auto rep = check();
        if (!rep.pass) {
            std::string msg = "symmetry assumption violated:";
            for (const auto& s : rep.violations) msg += " " + s + ";";
            throw std::invalid_argument(msg);
        }
    }
};

// --- CSV export -------------------------------------------------------------

// edge_id,u,v,periodic_closing,r_edge_id   (r_edge_id = -1 when not lattice)
inline void write_edge_csv(std::ostream& out, const FiniteGraph& g,
                           const std::vector<int>* r_edge_ids = nullptr) {
    out << "edge_id,u,v,periodic_closing,r_edge_id\n";
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& ep = g.endpoints(e);
        const int rid = r_edge_ids ? (*r_edge_ids)[static_cast<std::size_t>(e)] : -1;
        out << e << ',' << ep[0] << ',' << ep[1] << ','
            << (g.periodic_closing(e) ? 1 : 0) << ',' << rid << '\n';
    }
}

// vertex_id,x1,x2,level,in_L   (level computed by the caller for lattice graphs)
inline void write_vertex_csv(std::ostream& out, const FiniteGraph& g,
                             const std::vector<long long>* levels = nullptr) {
    out << "vertex_id,x1,x2,level,in_L\n";
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        long long x1 = 0, x2 = 0;
        if (g.has_coords()) {
            x1 = g.coord(v).x1;
            x2 = g.coord(v).x2;
        }
        const long long lvl = levels ? (*levels)[static_cast<std::size_t>(v)] : -1;
        out << v << ',' << x1 << ',' << x2 << ',' << lvl << ','
            << (g.in_lattice_core(v) ? 1 : 0) << '\n';
    }
}

} // namespace errw
