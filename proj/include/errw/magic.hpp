// magic.hpp - the explicit mixing density for the linearly edge-reinforced
// walk: weighted spanning-tree polynomial (matrix-tree route plus a
// brute-force enumeration route for small graphs), the density kernel
// log Phi, normalization changes, and the unnormalized log-densities of the
// environment measure and its two-start interpolation. Everything works on a
// logarithmic scale; normalizing constants are never folded in here.
#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "errw/graph.hpp"

namespace errw {

// Strictly positive per-edge environment, stored as log-weights. A reference
// edge of -1 means "not normalized"; otherwise log_x[reference_edge] must be
// exactly 0.
struct Environment {
    std::vector<double> log_x;
    int reference_edge = -1;

    static Environment from_logs(std::vector<double> logs, int e0 = -1) {
        Environment env;
        env.log_x = std::move(logs);
        env.reference_edge = e0;
        if (e0 >= 0) {
            if (e0 >= static_cast<int>(env.log_x.size()))
                throw std::invalid_argument("reference edge out of range");
            if (env.log_x[static_cast<std::size_t>(e0)] != 0.0)
                throw std::invalid_argument("normalized environment needs log x[e0] == 0");
        }
        return env;
    }

    static Environment from_weights(const std::vector<double>& x, int e0 = -1) {
        std::vector<double> logs(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (!(x[k] > 0.0)) throw std::invalid_argument("environment weights must be positive");
            logs[k] = std::log(x[k]);
        }
        return from_logs(std::move(logs), e0);
    }

    static Environment uniform(const FiniteGraph& g, int e0 = -1) {
        return from_logs(std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0), e0);
    }

    double weight(EdgeId e) const { return std::exp(log_x[static_cast<std::size_t>(e)]); }
};

inline double logsumexp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : v) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : v) s += std::exp(t - m);
    return m + std::log(s);
}

// log of x_v = sum of incident edge weights
inline double log_vertex_weight(const FiniteGraph& g, const Environment& env, VertexId v) {
    const auto& inc = g.incident_edges(v);
    double m = -std::numeric_limits<double>::infinity();
    for (EdgeId e : inc) m = std::max(m, env.log_x[static_cast<std::size_t>(e)]);
    double s = 0.0;
    for (EdgeId e : inc) s += std::exp(env.log_x[static_cast<std::size_t>(e)] - m);
    return m + std::log(s);
}

// Change of normalization: divide every weight by x_{e1}. Involution with the
// inverse map in the other direction; leaves log Phi unchanged.
inline Environment renormalize(const Environment& env, EdgeId e1) {
    Environment out;
    const double shift = env.log_x[static_cast<std::size_t>(e1)];
    out.log_x.resize(env.log_x.size());
    for (std::size_t k = 0; k < env.log_x.size(); ++k) out.log_x[k] = env.log_x[k] - shift;
    out.log_x[static_cast<std::size_t>(e1)] = 0.0;
    out.reference_edge = e1;
    return out;
}

// --- spanning-tree polynomial ------------------------------------------------

// Matrix-tree route: log of the sum over spanning trees of the product of
// edge weights, as the determinant of the reduced weighted Laplacian. The
// factorization runs directly on the graph: eliminating a vertex from a
// weighted Laplacian yields the Laplacian of the star-mesh-reduced graph, so
// every pivot and every fill-in weight is a sum of positive terms. Carried in
// log scale, this involves no subtraction at all and keeps full relative
// accuracy at arbitrary weight magnitudes. Templated on the scalar so the
// derivative oracles can run it in long double.
template <typename Real>
Real spanning_tree_log_polynomial_T(const FiniteGraph& g, const std::vector<Real>& log_w) {
    using std::exp;
    using std::log;
    const int n = g.vertex_count();
    if (static_cast<int>(log_w.size()) != g.edge_count())
        throw std::invalid_argument("environment size mismatch");
    if (!g.connected()) throw std::domain_error("tree polynomial vanishes: graph not connected");
    if (n == 1) return Real(0);  // the empty tree, product 1

    const Real ninf = -std::numeric_limits<Real>::infinity();
    std::vector<Real> W(static_cast<std::size_t>(n) * n, ninf);  // log edge weights
    auto at = [&](int a, int b) -> Real& { return W[static_cast<std::size_t>(a) * n + b]; };
    auto log_add = [&](Real a, Real b) {
        if (a == ninf) return b;
        if (b == ninf) return a;
        const Real hi = std::max(a, b), lo = std::min(a, b);
        return hi + log(Real(1) + exp(lo - hi));
    };
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& ep = g.endpoints(e);
        at(ep[0], ep[1]) = log_w[static_cast<std::size_t>(e)];
        at(ep[1], ep[0]) = log_w[static_cast<std::size_t>(e)];
    }

    // eliminate every vertex except vertex 0; the pivot product is the
    // reduced-Laplacian determinant
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    std::vector<int> nbs;
    Real log_det = Real(0);
    for (int v = n - 1; v >= 1; --v) {
        nbs.clear();
        Real pivot = ninf;
        for (int u = 0; u < n; ++u) {
            if (!alive[static_cast<std::size_t>(u)] || u == v || at(v, u) == ninf) continue;
            nbs.push_back(u);
            pivot = log_add(pivot, at(v, u));
        }
        if (pivot == ninf) throw std::domain_error("tree polynomial vanishes: graph not connected");
        log_det += pivot;
        for (std::size_t i = 0; i < nbs.size(); ++i)
            for (std::size_t j = i + 1; j < nbs.size(); ++j) {
                const int a = nbs[i], b = nbs[j];
                const Real fill = at(v, a) + at(v, b) - pivot;
                at(a, b) = log_add(at(a, b), fill);
                at(b, a) = at(a, b);
            }
        alive[static_cast<std::size_t>(v)] = 0;
    }
    return log_det;
}

inline double spanning_tree_log_polynomial(const FiniteGraph& g, const Environment& env) {
    return spanning_tree_log_polynomial_T<double>(g, env.log_x);
}

// --- brute-force enumeration (test oracle and small-graph statistics) -------

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

inline double binomial_ceiling(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c *= static_cast<double>(n - k + j) / j;
    return c;
}

} // namespace detail

inline constexpr int kTreeEnumerationVertexCap = 10;

// All spanning trees as edge-id sets, by filtering edge subsets of size |V|-1
// with a union-find acyclicity test. Guarded by the enumeration cutoff.
template <typename Visitor>
inline void for_each_spanning_tree(const FiniteGraph& g, Visitor&& visit) {
    const int n = g.vertex_count();
    const int m = g.edge_count();
    const int k = n - 1;
    if (n > kTreeEnumerationVertexCap)
        throw std::invalid_argument("spanning-tree enumeration cutoff exceeded");
    if (detail::binomial_ceiling(m, k) > 2e6)
        throw std::invalid_argument("spanning-tree enumeration cutoff exceeded");
    if (k == 0) {
        std::vector<EdgeId> empty;
        visit(static_cast<const std::vector<EdgeId>&>(empty));
        return;
    }
    std::vector<EdgeId> pick(static_cast<std::size_t>(k));
    std::iota(pick.begin(), pick.end(), 0);
    if (m < k) return;
    while (true) {
        detail::UnionFind uf(n);
        bool acyclic = true;
        for (EdgeId e : pick) {
            const auto& ep = g.endpoints(e);
            if (!uf.unite(ep[0], ep[1])) {
                acyclic = false;
                break;
            }
        }
        if (acyclic) visit(static_cast<const std::vector<EdgeId>&>(pick));  // k acyclic edges span
        // next k-combination in lexicographic order
        int j = k - 1;
        while (j >= 0 && pick[static_cast<std::size_t>(j)] == m - k + j) --j;
        if (j < 0) break;
        ++pick[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < k; ++t)
            pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
    }
}

inline std::vector<std::vector<EdgeId>> enumerate_spanning_trees(const FiniteGraph& g) {
    std::vector<std::vector<EdgeId>> trees;
    for_each_spanning_tree(g, [&](const std::vector<EdgeId>& t) { trees.push_back(t); });
    return trees;
}

inline double spanning_tree_log_polynomial_enumerated(const FiniteGraph& g, const Environment& env) {
    std::vector<double> log_products;
    for_each_spanning_tree(g, [&](const std::vector<EdgeId>& t) {
        double s = 0.0;
        for (EdgeId e : t) s += env.log_x[static_cast<std::size_t>(e)];
        log_products.push_back(s);
    });
    if (log_products.empty()) throw std::domain_error("tree polynomial vanishes: graph not connected");
    return logsumexp(log_products);
}

// --- density kernel ----------------------------------------------------------

// log Phi_{v0,a}(x): the scale-invariant kernel of the mixing density.
inline double log_phi(const FiniteGraph& g, const InitialWeights& a, VertexId v0,
                      const Environment& env) {
    double acc = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        acc += a.edge[static_cast<std::size_t>(e)] * env.log_x[static_cast<std::size_t>(e)];
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const double av = a.vertex[static_cast<std::size_t>(v)];
        const double power = (v == v0) ? av / 2.0 : (av + 1.0) / 2.0;
        acc -= power * log_vertex_weight(g, env, v);
    }
    acc += 0.5 * spanning_tree_log_polynomial(g, env);
    return acc;
}

inline void require_normalized(const Environment& env, EdgeId e0) {
    if (env.reference_edge != e0 || env.log_x[static_cast<std::size_t>(e0)] != 0.0)
        throw std::invalid_argument("environment must be normalized at the reference edge");
}

// Unnormalized log-density of the environment measure started at v0, with
// respect to the log-Lebesgue reference measure on the normalized slice. The
// normalizing constant is intentionally not included.
inline double log_density_Q(const FiniteGraph& g, const InitialWeights& a, VertexId v0,
                            EdgeId e0, const Environment& env) {
    require_normalized(env, e0);
    return log_phi(g, a, v0, env);
}

// Unnormalized log-density of the interpolation between the environments
// started at v0 and at v1: the geometric mean of the two kernels.
inline double log_density_P_interp(const FiniteGraph& g, const InitialWeights& a,
                                   VertexId v0, VertexId v1, EdgeId e0,
                                   const Environment& env) {
    require_normalized(env, e0);
    return 0.5 * (log_phi(g, a, v0, env) + log_phi(g, a, v1, env));
}

} // namespace errw
