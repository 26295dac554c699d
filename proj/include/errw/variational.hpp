// variational.hpp - the deformation apparatus on a reflection-symmetric
// weighted graph: the quarter log-ratio H, the exponential edge deformation,
// the explicit log Radon-Nikodym realization f_gamma with its first two
// gamma-derivatives, spanning-tree statistics of the potential (enumeration
// and log-determinant routes), and the optimal deformation parameter with the
// resulting quarter-moment bound.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "errw/graph.hpp"
#include "errw/magic.hpp"

namespace errw {

// H(x) = (1/4) log(x_{v1} / x_{v0})
inline double quarter_log_vertex_ratio(const FiniteGraph& g, const Environment& env,
                                       VertexId v0, VertexId v1) {
    return 0.25 * (log_vertex_weight(g, env, v1) - log_vertex_weight(g, env, v0));
}

// Edge deformation x_e -> e^{gamma phi(e)} x_e. Leaves the reference edge, and
// with it the normalized slice, fixed because phi vanishes on it.
inline Environment deform(const SymmetricInstance& inst, double gamma, const Environment& env) {
    Environment out = env;
    for (EdgeId e = 0; e < inst.graph.edge_count(); ++e)
        out.log_x[static_cast<std::size_t>(e)] += gamma * inst.phi[static_cast<std::size_t>(e)];
    return out;
}

// log of x_v^{(gamma phi)} = sum_{e at v} e^{gamma phi(e)} x_e
inline double log_deformed_vertex_weight(const SymmetricInstance& inst, double gamma,
                                         const Environment& env, VertexId v) {
    const auto& inc = inst.graph.incident_edges(v);
    double m = -std::numeric_limits<double>::infinity();
    for (EdgeId e : inc)
        m = std::max(m, env.log_x[static_cast<std::size_t>(e)] +
                            gamma * inst.phi[static_cast<std::size_t>(e)]);
    double s = 0.0;
    for (EdgeId e : inc)
        s += std::exp(env.log_x[static_cast<std::size_t>(e)] +
                      gamma * inst.phi[static_cast<std::size_t>(e)] - m);
    return m + std::log(s);
}

// The explicit realization of log(d Pi^{(gamma phi)} / d P) evaluated along
// the deformation orbit of x. Templated on the scalar so finite-difference
// oracles can run it in long double.
template <typename Real>
Real log_f_gamma_T(const SymmetricInstance& inst, Real gamma, const Environment& env) {
    using std::exp;
    using std::log;
    const FiniteGraph& g = inst.graph;
    const auto& a = inst.a;

    Real acc = gamma * (Real(a.vertex[static_cast<std::size_t>(inst.v1)]) / 2 + Real(0.25));
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        acc -= gamma * Real(inst.phi[static_cast<std::size_t>(e)]) *
               Real(a.edge[static_cast<std::size_t>(e)]);

    std::vector<Real> log_w(static_cast<std::size_t>(g.edge_count()));
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        log_w[static_cast<std::size_t>(e)] =
            Real(env.log_x[static_cast<std::size_t>(e)]) +
            gamma * Real(inst.phi[static_cast<std::size_t>(e)]);

    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (v == inst.v0 || v == inst.v1) continue;
        const auto& inc = g.incident_edges(v);
        Real m_def = log_w[static_cast<std::size_t>(inc[0])];
        Real m_pln = Real(env.log_x[static_cast<std::size_t>(inc[0])]);
        for (EdgeId e : inc) {
            m_def = std::max(m_def, log_w[static_cast<std::size_t>(e)]);
            m_pln = std::max(m_pln, Real(env.log_x[static_cast<std::size_t>(e)]));
        }
        Real s_def = Real(0), s_pln = Real(0);
        for (EdgeId e : inc) {
            s_def += exp(log_w[static_cast<std::size_t>(e)] - m_def);
            s_pln += exp(Real(env.log_x[static_cast<std::size_t>(e)]) - m_pln);
        }
        // grouped as differences so identical deformed/plain inputs cancel
        // exactly and f_0 vanishes bit for bit
        acc += (Real(a.vertex[static_cast<std::size_t>(v)]) + 1) / 2 *
               ((m_def - m_pln) + (log(s_def) - log(s_pln)));
    }

    std::vector<Real> log_x_plain(env.log_x.begin(), env.log_x.end());
    acc -= (spanning_tree_log_polynomial_T<Real>(g, log_w) -
            spanning_tree_log_polynomial_T<Real>(g, log_x_plain)) /
           2;
    return acc;
}

inline double log_f_gamma(const SymmetricInstance& inst, double gamma, const Environment& env) {
    return log_f_gamma_T<double>(inst, gamma, env);
}

// --- spanning-tree statistics of the potential --------------------------------

// mean and variance of Delta(T) = sum_{e in T} phi(e) under the tree measure
// with weights e^{gamma phi(e)} x_e
struct TreeStatistics {
    double mean = 0.0;
    double variance = 0.0;
};

inline TreeStatistics tree_statistics_enumerated(const FiniteGraph& g, const Environment& env,
                                                 const std::vector<double>& phi, double gamma) {
    std::vector<double> log_weights;
    std::vector<double> deltas;
    for_each_spanning_tree(g, [&](const std::vector<EdgeId>& t) {
        double lw = 0.0, d = 0.0;
        for (EdgeId e : t) {
            lw += env.log_x[static_cast<std::size_t>(e)] + gamma * phi[static_cast<std::size_t>(e)];
            d += phi[static_cast<std::size_t>(e)];
        }
        log_weights.push_back(lw);
        deltas.push_back(d);
    });
    if (log_weights.empty()) throw std::domain_error("graph not connected");
    double m = log_weights[0];
    for (double lw : log_weights) m = std::max(m, lw);
    double z = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        const double w = std::exp(log_weights[k] - m);
        z += w;
        s1 += w * deltas[k];
        s2 += w * deltas[k] * deltas[k];
    }
    TreeStatistics out;
    out.mean = s1 / z;
    out.variance = std::max(0.0, s2 / z - out.mean * out.mean);
    return out;
}

namespace detail {

// dense reduced Laplacian (vertex 0 deleted) for weights w_e
inline std::vector<double> reduced_laplacian(const FiniteGraph& g, const std::vector<double>& w) {
    const int m = g.vertex_count() - 1;
    std::vector<double> L(static_cast<std::size_t>(m) * m, 0.0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& ep = g.endpoints(e);
        const int u = ep[0] - 1, v = ep[1] - 1;
        const double we = w[static_cast<std::size_t>(e)];
        if (u >= 0) L[static_cast<std::size_t>(u) * m + u] += we;
        if (v >= 0) L[static_cast<std::size_t>(v) * m + v] += we;
        if (u >= 0 && v >= 0) {
            L[static_cast<std::size_t>(u) * m + v] -= we;
            L[static_cast<std::size_t>(v) * m + u] -= we;
        }
    }
    return L;
}

// in-place Gauss-Jordan inverse; fine at the dense sizes used here
inline std::vector<double> invert_dense(std::vector<double> A, int n) {
    std::vector<double> I(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) I[static_cast<std::size_t>(k) * n + k] = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int a = k + 1; a < n; ++a)
            if (std::fabs(A[static_cast<std::size_t>(a) * n + k]) >
                std::fabs(A[static_cast<std::size_t>(piv) * n + k]))
                piv = a;
        if (std::fabs(A[static_cast<std::size_t>(piv) * n + k]) < 1e-300)
            throw std::domain_error("singular matrix");
        if (piv != k)
            for (int b = 0; b < n; ++b) {
                std::swap(A[static_cast<std::size_t>(k) * n + b], A[static_cast<std::size_t>(piv) * n + b]);
                std::swap(I[static_cast<std::size_t>(k) * n + b], I[static_cast<std::size_t>(piv) * n + b]);
            }
        const double p = A[static_cast<std::size_t>(k) * n + k];
        for (int b = 0; b < n; ++b) {
            A[static_cast<std::size_t>(k) * n + b] /= p;
            I[static_cast<std::size_t>(k) * n + b] /= p;
        }
        for (int a = 0; a < n; ++a) {
            if (a == k) continue;
            const double f = A[static_cast<std::size_t>(a) * n + k];
            if (f == 0.0) continue;
            for (int b = 0; b < n; ++b) {
                A[static_cast<std::size_t>(a) * n + b] -= f * A[static_cast<std::size_t>(k) * n + b];
                I[static_cast<std::size_t>(a) * n + b] -= f * I[static_cast<std::size_t>(k) * n + b];
            }
        }
    }
    return I;
}

inline double trace_product(const std::vector<double>& A, const std::vector<double>& B, int n) {
    double t = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            t += A[static_cast<std::size_t>(a) * n + b] * B[static_cast<std::size_t>(b) * n + a];
    return t;
}

inline std::vector<double> multiply(const std::vector<double>& A, const std::vector<double>& B, int n) {
    std::vector<double> C(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k) {
            const double f = A[static_cast<std::size_t>(a) * n + k];
            if (f == 0.0) continue;
            for (int b = 0; b < n; ++b)
                C[static_cast<std::size_t>(a) * n + b] += f * B[static_cast<std::size_t>(k) * n + b];
        }
    return C;
}

} // namespace detail

// Derivative route: first and second gamma-derivatives of the log tree
// polynomial at weights e^{gamma phi} x, via traces on the reduced Laplacian.
inline TreeStatistics tree_statistics_logdet(const FiniteGraph& g, const Environment& env,
                                             const std::vector<double>& phi, double gamma) {
    const int n = g.vertex_count();
    if (n == 1) return {0.0, 0.0};
    const int m = n - 1;
    double shift = -std::numeric_limits<double>::infinity();
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        shift = std::max(shift, env.log_x[static_cast<std::size_t>(e)] +
                                    gamma * phi[static_cast<std::size_t>(e)]);
    std::vector<double> w(static_cast<std::size_t>(g.edge_count()));
    std::vector<double> w1(w.size()), w2(w.size());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const double we = std::exp(env.log_x[static_cast<std::size_t>(e)] +
                                   gamma * phi[static_cast<std::size_t>(e)] - shift);
        const double p = phi[static_cast<std::size_t>(e)];
        w[static_cast<std::size_t>(e)] = we;
        w1[static_cast<std::size_t>(e)] = p * we;
        w2[static_cast<std::size_t>(e)] = p * p * we;
    }
    const auto L = detail::reduced_laplacian(g, w);
    const auto L1 = detail::reduced_laplacian(g, w1);
    const auto L2 = detail::reduced_laplacian(g, w2);
    const auto A = detail::invert_dense(L, m);
    const auto AL1 = detail::multiply(A, L1, m);
    TreeStatistics out;
    out.mean = 0.0;
    for (int k = 0; k < m; ++k) out.mean += AL1[static_cast<std::size_t>(k) * m + k];
    out.variance = std::max(0.0, detail::trace_product(A, L2, m) -
                                     detail::trace_product(AL1, AL1, m));
    return out;
}

// Enumeration below the small-graph cutoff, log-determinant derivatives above.
inline TreeStatistics tree_statistics(const FiniteGraph& g, const Environment& env,
                                      const std::vector<double>& phi, double gamma) {
    if (g.vertex_count() <= kTreeEnumerationVertexCap &&
        detail::binomial_ceiling(g.edge_count(), g.vertex_count() - 1) <= 2e6)
        return tree_statistics_enumerated(g, env, phi, gamma);
    return tree_statistics_logdet(g, env, phi, gamma);
}

// --- derivatives of f_gamma ----------------------------------------------------

struct FGammaDerivatives {
    double first = 0.0;
    double second = 0.0;
};

inline FGammaDerivatives f_gamma_derivatives(const SymmetricInstance& inst, double gamma,
                                             const Environment& env) {
    const FiniteGraph& g = inst.graph;
    const auto& a = inst.a;
    FGammaDerivatives out;
    out.first = a.vertex[static_cast<std::size_t>(inst.v1)] / 2.0 + 0.25;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        out.first -= inst.phi[static_cast<std::size_t>(e)] * a.edge[static_cast<std::size_t>(e)];

    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (v == inst.v0 || v == inst.v1) continue;
        const auto& inc = g.incident_edges(v);
        double m = -std::numeric_limits<double>::infinity();
        for (EdgeId e : inc)
            m = std::max(m, env.log_x[static_cast<std::size_t>(e)] +
                                gamma * inst.phi[static_cast<std::size_t>(e)]);
        double z = 0.0, s1 = 0.0, s2 = 0.0;
        for (EdgeId e : inc) {
            const double w = std::exp(env.log_x[static_cast<std::size_t>(e)] +
                                      gamma * inst.phi[static_cast<std::size_t>(e)] - m);
            const double p = inst.phi[static_cast<std::size_t>(e)];
            z += w;
            s1 += w * p;
            s2 += w * p * p;
        }
        const double mean = s1 / z;
        const double var = std::max(0.0, s2 / z - mean * mean);
        const double coeff = (a.vertex[static_cast<std::size_t>(v)] + 1.0) / 2.0;
        out.first += coeff * mean;
        out.second += coeff * var;
    }

    const TreeStatistics trees = tree_statistics(g, env, inst.phi, gamma);
    out.first -= 0.5 * trees.mean;
    out.second -= 0.5 * trees.variance;
    return out;
}

// --- the optimal deformation parameter -----------------------------------------

inline double optimal_gamma(double s_phi) {
    if (!(s_phi > 0.0)) throw std::invalid_argument("Dirichlet form must be positive");
    return -1.0 / (4.0 * s_phi);
}

// min over gamma of exp(gamma/4 + S gamma^2 / 2) = exp(-1/(32 S))
inline double quarter_moment_bound(double s_phi) {
    if (!(s_phi > 0.0)) throw std::invalid_argument("Dirichlet form must be positive");
    return std::exp(-1.0 / (32.0 * s_phi));
}

} // namespace errw
