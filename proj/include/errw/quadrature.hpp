// quadrature.hpp - tensor-product Gauss-Legendre integration of the mixing
// density over the normalized weight slice, in log coordinates where the
// reference measure is Lebesgue. Only meant for tiny graphs (the dimension is
// |E| - 1); it is the ground-truth oracle the samplers are checked against.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/graph.hpp"
#include "errw/magic.hpp"
#include "errw/walker.hpp"

namespace errw {

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
// Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n) {
        if (n < 2) throw std::invalid_argument("need at least two quadrature nodes");
        nodes.resize(static_cast<std::size_t>(n));
        weights.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < (n + 1) / 2; ++k) {
            // Chebyshev-like initial guess
            double x = std::cos(3.14159265358979323846 * (k + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            if (k == n - 1 - k) x = 0.0;  // middle node of an odd rule
            nodes[static_cast<std::size_t>(k)] = -x;
            nodes[static_cast<std::size_t>(n - 1 - k)] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[static_cast<std::size_t>(k)] = w;
            weights[static_cast<std::size_t>(n - 1 - k)] = w;
        }
    }
};

// Signed accumulator for sums of f * exp(log_magnitude) whose magnitudes span
// far beyond double range; keeps a floating reference exponent.
class ScaledSum {
public:
    void add(double log_magnitude, double factor) {
        if (factor == 0.0 || log_magnitude == -std::numeric_limits<double>::infinity()) return;
        const double lt = log_magnitude + std::log(std::fabs(factor));
        const double sg = factor > 0.0 ? 1.0 : -1.0;
        if (lt > shift_) {
            sum_ *= std::exp(shift_ - lt);
            shift_ = lt;
        }
        sum_ += sg * std::exp(lt - shift_);
    }

    bool empty() const { return shift_ == -std::numeric_limits<double>::infinity(); }
    double log_abs() const { return shift_ + std::log(std::fabs(sum_)); }
    double sign() const { return sum_ >= 0.0 ? 1.0 : -1.0; }
    double value() const { return empty() ? 0.0 : sign() * std::exp(log_abs()); }

    // value relative to a caller-supplied log scale
    double value_scaled(double log_scale) const {
        return empty() ? 0.0 : sign() * std::exp(log_abs() - log_scale);
    }

private:
    double shift_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

struct QuadratureSettings {
    int nodes_per_axis = 96;
    double truncation = 40.0;  // half-width of the log-coordinate cube
    double rel_tol = 1e-8;
    double integrand_log_growth = 0.25;  // per-coordinate slope allowance for f
    int max_dimension = 4;               // cap on |E| - 1
    // Nodes follow the cubic stretch u = M (c t + (1-c) t^3): the density mass
    // sits within a few log-units of the center while the slab is much wider,
    // so a uniform rule would starve the peak of resolution.
    double stretch = 0.2;
};

struct QuadratureValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    double sign = 1.0;
    double truncation_estimate = 0.0;  // relative; derived from the boundary mass
    bool within_tolerance = true;
    std::vector<std::string> notes;

    double value() const { return sign * std::exp(log_abs); }
};

namespace detail {

inline bool is_bridge(const FiniteGraph& g, EdgeId cut) {
    // connectivity with one edge removed
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId e : g.incident_edges(v)) {
            if (e == cut) continue;
            const VertexId w = g.other_end(e, v);
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached != g.vertex_count();
}

// Minimal asymptotic decay rate of Phi over the free log-coordinates, from
// the exponent structure of the density: each coordinate enters linearly at
// both infinities with computable slopes.
inline double min_decay_rate(const FiniteGraph& g, const InitialWeights& a, VertexId v0, EdgeId e0) {
    double rate = std::numeric_limits<double>::infinity();
    auto vertex_power = [&](VertexId v) {
        const double av = a.vertex[static_cast<std::size_t>(v)];
        return v == v0 ? av / 2.0 : (av + 1.0) / 2.0;
    };
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (e == e0) continue;
        const auto& ep = g.endpoints(e);
        // u_e -> +inf: slope = a_e + 1/2 - sum of endpoint powers
        const double up = a.edge[static_cast<std::size_t>(e)] + 0.5 -
                          vertex_power(ep[0]) - vertex_power(ep[1]);
        // u_e -> -inf: tree factor keeps 1/2 only on bridges; a vertex factor
        // follows u_e only when the edge carries the whole vertex weight
        double down = a.edge[static_cast<std::size_t>(e)];
        if (is_bridge(g, e)) down += 0.5;
        if (g.degree(ep[0]) == 1) down -= vertex_power(ep[0]);
        if (g.degree(ep[1]) == 1) down -= vertex_power(ep[1]);
        rate = std::min(rate, std::min(-up, down));
    }
    return rate;
}

} // namespace detail

// Integral of f(x) * Phi_{v0,a}(x) against the log-Lebesgue reference measure
// on the slice normalized at e0. f receives the environment and returns a
// plain value; the density magnitude is handled in log scale throughout.
template <typename F>
QuadratureValue integrate_against_phi(const FiniteGraph& g, const InitialWeights& a,
                                      VertexId v0, EdgeId e0, F&& f,
                                      const QuadratureSettings& st = {}) {
    const int dim = g.edge_count() - 1;
    if (dim > st.max_dimension)
        throw std::invalid_argument("quadrature dimension cap exceeded: |E|-1 = " + std::to_string(dim));
    QuadratureValue out;

    const double decay = detail::min_decay_rate(g, a, v0, e0) - st.integrand_log_growth;
    if (!(decay > 0.0)) {
        out.notes.push_back("integrand slope allowance exhausts the density decay; tails untrusted");
        out.within_tolerance = false;
    }

    const GaussLegendre rule(st.nodes_per_axis);
    const int n = st.nodes_per_axis;

    // stretched abscissas and the matching one-axis log-weights
    std::vector<double> u_axis(static_cast<std::size_t>(n));
    std::vector<double> logw_axis(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double t = rule.nodes[static_cast<std::size_t>(j)];
        const double c = st.stretch;
        u_axis[static_cast<std::size_t>(j)] = st.truncation * (c * t + (1.0 - c) * t * t * t);
        const double jac = st.truncation * (c + 3.0 * (1.0 - c) * t * t);
        logw_axis[static_cast<std::size_t>(j)] = std::log(jac * rule.weights[static_cast<std::size_t>(j)]);
    }

    std::vector<EdgeId> free_edges;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (e != e0) free_edges.push_back(e);

    Environment env = Environment::uniform(g, e0);
    ScaledSum total;
    ScaledSum boundary;  // mass on the outermost node shells

    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    bool done = (dim == 0);
    if (dim == 0) {
        // single point: the slice is zero-dimensional
        const double lp = log_phi(g, a, v0, env);
        total.add(lp, f(env));
    }
    while (!done) {
        double log_jac = 0.0;
        bool on_boundary = false;
        for (int k = 0; k < dim; ++k) {
            const int j = idx[static_cast<std::size_t>(k)];
            env.log_x[static_cast<std::size_t>(free_edges[static_cast<std::size_t>(k)])] =
                u_axis[static_cast<std::size_t>(j)];
            log_jac += logw_axis[static_cast<std::size_t>(j)];
            on_boundary = on_boundary || j == 0 || j == n - 1;
        }
        const double lp = log_phi(g, a, v0, env) + log_jac;
        const double fv = f(env);
        total.add(lp, fv);
        if (on_boundary) boundary.add(lp, std::fabs(fv));

        int k = 0;
        while (k < dim) {
            if (++idx[static_cast<std::size_t>(k)] < n) break;
            idx[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        done = (k == dim);
    }

    out.log_abs = total.log_abs();
    out.sign = total.sign();
    if (!boundary.empty() && decay > 0.0) {
        // boundary shell mass, inflated by the exponential tail beyond the cube
        const double tail_factor = 1.0 + 1.0 / decay;
        out.truncation_estimate = std::exp(boundary.log_abs() - out.log_abs) * tail_factor;
    }
    if (!(out.truncation_estimate <= st.rel_tol)) {
        out.within_tolerance = false;
        out.notes.push_back("truncation estimate above tolerance");
    }
    return out;
}

// log of the normalizing constant z_{v0} = integral of Phi d rho
inline QuadratureValue normalization_constant(const FiniteGraph& g, const InitialWeights& a,
                                              VertexId v0, EdgeId e0,
                                              const QuadratureSettings& st = {}) {
    return integrate_against_phi(g, a, v0, e0, [](const Environment&) { return 1.0; }, st);
}

// E_Q[f] = (integral of f Phi) / (integral of Phi)
template <typename F>
double expect_Q(const FiniteGraph& g, const InitialWeights& a, VertexId v0, EdgeId e0, F&& f,
                const QuadratureSettings& st = {}, QuadratureValue* detail_out = nullptr) {
    const QuadratureValue z = normalization_constant(g, a, v0, e0, st);
    QuadratureValue m = integrate_against_phi(g, a, v0, e0, std::forward<F>(f), st);
    if (detail_out) {
        *detail_out = m;
        detail_out->truncation_estimate += z.truncation_estimate;
        detail_out->within_tolerance = m.within_tolerance && z.within_tolerance;
    }
    return m.sign * z.sign * std::exp(m.log_abs - z.log_abs);
}

// Quarter moment E_Q[(x_{v1}/x_{v0})^{1/4}] by quadrature.
inline double quarter_moment_quadrature(const FiniteGraph& g, const InitialWeights& a,
                                        VertexId v0, VertexId v1, EdgeId e0,
                                        const QuadratureSettings& st = {},
                                        QuadratureValue* detail_out = nullptr) {
    return expect_Q(
        g, a, v0, e0,
        [&](const Environment& env) {
            return std::exp(0.25 * (log_vertex_weight(g, env, v1) - log_vertex_weight(g, env, v0)));
        },
        st, detail_out);
}

// Mixture identity at one path: reinforced-walk path probability against the
// mixture of fixed-environment walks under the normalized environment law.
struct MixtureCheck {
    double reinforced = 0.0;  // closed-form reinforced probability
    double mixture = 0.0;     // quadrature of the environment mixture
    double abs_difference = 0.0;
};

inline MixtureCheck mixture_check(const FiniteGraph& g, const InitialWeights& a, VertexId v0,
                                  EdgeId e0, const std::vector<VertexId>& path,
                                  const QuadratureSettings& st = {}) {
    MixtureCheck out;
    out.reinforced = errw_path_probability(g, a, v0, path);
    out.mixture = expect_Q(
        g, a, v0, e0,
        [&](const Environment& env) { return markov_path_probability(g, env, v0, path); }, st);
    out.abs_difference = std::fabs(out.reinforced - out.mixture);
    return out;
}

} // namespace errw
