// walker.hpp - exact simulation of the linearly edge-reinforced random walk
// and of fixed-environment Markov walks, closed-form path probabilities, and
// a censored hitting-time Monte Carlo. Crossing counts are kept as integers
// and the running weight is formed as a_e + count on demand, so there is no
// floating-point drift over long runs.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/graph.hpp"
#include "errw/lattice.hpp"
#include "errw/magic.hpp"
#include "errw/rng.hpp"

namespace errw {

struct WalkState {
    VertexId position = 0;
    long long time = 0;
    std::vector<long long> crossings;  // per edge

    static WalkState start(const FiniteGraph& g, VertexId v0) {
        WalkState s;
        s.position = v0;
        s.time = 0;
        s.crossings.assign(static_cast<std::size_t>(g.edge_count()), 0);
        return s;
    }

    void reset(VertexId v0) {
        position = v0;
        time = 0;
        std::fill(crossings.begin(), crossings.end(), 0);
    }
};

inline double reinforced_weight(const InitialWeights& a, const WalkState& s, EdgeId e) {
    return a.edge[static_cast<std::size_t>(e)] +
           static_cast<double>(s.crossings[static_cast<std::size_t>(e)]);
}

// One reinforced step: jump along an incident edge with probability
// proportional to its current weight, then bump that edge's count.
// Returns the traversed edge.
inline EdgeId errw_step(const FiniteGraph& g, const InitialWeights& a, WalkState& s,
                        SplitMix64& rng) {
    const auto& inc = g.incident_edges(s.position);
    double total = 0.0;
    for (EdgeId e : inc) total += reinforced_weight(a, s, e);
    double u = rng.next_double() * total;
    EdgeId chosen = inc.back();
    for (EdgeId e : inc) {
        const double w = reinforced_weight(a, s, e);
        if (u < w) {
            chosen = e;
            break;
        }
        u -= w;
    }
    s.position = g.other_end(chosen, s.position);
    ++s.crossings[static_cast<std::size_t>(chosen)];
    ++s.time;
    return chosen;
}

// One time-homogeneous step in a fixed environment; no weight update.
inline EdgeId markov_step(const FiniteGraph& g, const Environment& env, WalkState& s,
                          SplitMix64& rng) {
    const auto& inc = g.incident_edges(s.position);
    double total = 0.0;
    for (EdgeId e : inc) total += env.weight(e);
    double u = rng.next_double() * total;
    EdgeId chosen = inc.back();
    for (EdgeId e : inc) {
        const double w = env.weight(e);
        if (u < w) {
            chosen = e;
            break;
        }
        u -= w;
    }
    s.position = g.other_end(chosen, s.position);
    ++s.crossings[static_cast<std::size_t>(chosen)];
    ++s.time;
    return chosen;
}

// Transition row of the fixed-environment walk at v: probability per incident
// edge, in incident-edge order.
inline std::vector<double> markov_transition_row(const FiniteGraph& g, const Environment& env,
                                                 VertexId v) {
    const auto& inc = g.incident_edges(v);
    std::vector<double> p(inc.size());
    double total = 0.0;
    for (std::size_t k = 0; k < inc.size(); ++k) {
        p[k] = env.weight(inc[k]);
        total += p[k];
    }
    for (double& t : p) t /= total;
    return p;
}

// Exact probability that the reinforced walk follows the given vertex
// sequence, with the weights updated along the way. 0 for inadmissible paths.
inline double errw_path_probability(const FiniteGraph& g, const InitialWeights& a,
                                    VertexId v0, const std::vector<VertexId>& path) {
    if (path.empty() || path.front() != v0) return 0.0;
    WalkState s = WalkState::start(g, v0);
    double prob = 1.0;
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
        const auto e = g.find_edge(path[t], path[t + 1]);
        if (!e) return 0.0;
        double total = 0.0;
        for (EdgeId inc : g.incident_edges(path[t])) total += reinforced_weight(a, s, inc);
        prob *= reinforced_weight(a, s, *e) / total;
        ++s.crossings[static_cast<std::size_t>(*e)];
    }
    return prob;
}

// Exact probability that the fixed-environment walk follows the path.
inline double markov_path_probability(const FiniteGraph& g, const Environment& env,
                                      VertexId v0, const std::vector<VertexId>& path) {
    if (path.empty() || path.front() != v0) return 0.0;
    double log_prob = 0.0;
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
        const auto e = g.find_edge(path[t], path[t + 1]);
        if (!e) return 0.0;
        log_prob += env.log_x[static_cast<std::size_t>(*e)] - log_vertex_weight(g, env, path[t]);
    }
    return std::exp(log_prob);
}

// --- hitting Monte Carlo ------------------------------------------------------

struct HittingOptions {
    long long max_steps = 1'000'000;
    long long n_walks = 10'000;
    std::uint64_t seed = 1;
    double censoring_threshold = 0.01;
};

struct HitCounts {
    long long hits = 0;
    long long returns = 0;
    long long censored = 0;

    HitCounts& operator+=(const HitCounts& o) {
        hits += o.hits;
        returns += o.returns;
        censored += o.censored;
        return *this;
    }
};

struct HittingEstimate {
    long long n_requested = 0;
    long long n_walks = 0;  // uncensored replicas backing the estimate
    long long n_hits = 0;
    double estimate = 0.0;  // n_hits / n_walks
    double ci_halfwidth = 0.0;
    double censored_fraction = 0.0;
    std::uint64_t seed = 0;
    std::optional<std::string> error;
};

inline HittingEstimate summarize_hits(const HitCounts& c, const HittingOptions& opts) {
    HittingEstimate est;
    est.n_requested = opts.n_walks;
    est.n_walks = c.hits + c.returns;
    est.n_hits = c.hits;
    est.censored_fraction = static_cast<double>(c.censored) / static_cast<double>(opts.n_walks);
    est.seed = opts.seed;
    if (est.n_walks > 0) {
        const double p = static_cast<double>(c.hits) / static_cast<double>(est.n_walks);
        est.estimate = p;
        est.ci_halfwidth = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(est.n_walks));
    } else {
        est.estimate = std::nan("");
        est.error = "all replicas censored";
    }
    if (est.censored_fraction > opts.censoring_threshold)
        est.error = "censoring fraction " + std::to_string(est.censored_fraction) +
                    " exceeds threshold " + std::to_string(opts.censoring_threshold);
    return est;
}

namespace detail {

template <typename StepFn>
HitCounts run_hitting_replicas(const FiniteGraph& g, VertexId v0,
                               const std::vector<char>& target_mask,
                               const HittingOptions& opts, long long k_begin, long long k_end,
                               StepFn&& step) {
    HitCounts counts;
    WalkState s = WalkState::start(g, v0);
    for (long long k = k_begin; k < k_end; ++k) {
        SplitMix64 rng = SplitMix64::stream(opts.seed, static_cast<std::uint64_t>(k));
        s.reset(v0);
        bool settled = false;
        for (long long t = 0; t < opts.max_steps; ++t) {
            step(s, rng);
            if (target_mask[static_cast<std::size_t>(s.position)]) {
                ++counts.hits;
                settled = true;
                break;
            }
            if (s.position == v0) {
                ++counts.returns;
                settled = true;
                break;
            }
        }
        if (!settled) ++counts.censored;
    }
    return counts;
}

inline std::vector<char> target_mask_of(const FiniteGraph& g, VertexId v0,
                                        const std::vector<VertexId>& targets) {
    if (targets.empty()) throw std::invalid_argument("target set must be nonempty");
    std::vector<char> mask(static_cast<std::size_t>(g.vertex_count()), 0);
    for (VertexId v : targets) {
        if (v < 0 || v >= g.vertex_count()) throw std::invalid_argument("target out of range");
        if (v == v0) throw std::invalid_argument("start vertex cannot be a target");
        mask[static_cast<std::size_t>(v)] = 1;
    }
    return mask;
}

} // namespace detail

// Chunk of reinforced-walk replicas [k_begin, k_end); replica k draws from
// stream (seed, k), so any partition of the replica range gives identical
// totals.
inline HitCounts hitting_replicas_errw(const FiniteGraph& g, const InitialWeights& a,
                                       VertexId v0, const std::vector<VertexId>& targets,
                                       const HittingOptions& opts, long long k_begin,
                                       long long k_end) {
    const auto mask = detail::target_mask_of(g, v0, targets);
    return detail::run_hitting_replicas(g, v0, mask, opts, k_begin, k_end,
                                        [&](WalkState& s, SplitMix64& rng) { errw_step(g, a, s, rng); });
}

inline HitCounts hitting_replicas_markov(const FiniteGraph& g, const Environment& env,
                                         VertexId v0, const std::vector<VertexId>& targets,
                                         const HittingOptions& opts, long long k_begin,
                                         long long k_end) {
    const auto mask = detail::target_mask_of(g, v0, targets);
    return detail::run_hitting_replicas(g, v0, mask, opts, k_begin, k_end,
                                        [&](WalkState& s, SplitMix64& rng) { markov_step(g, env, s, rng); });
}

// Probability that the reinforced walk hits the target set before returning
// to v0, with per-replica censoring at max_steps reported separately.
inline HittingEstimate hit_before_return(const FiniteGraph& g, const InitialWeights& a,
                                         VertexId v0, const std::vector<VertexId>& targets,
                                         const HittingOptions& opts) {
    return summarize_hits(hitting_replicas_errw(g, a, v0, targets, opts, 0, opts.n_walks), opts);
}

inline HittingEstimate hit_before_return_markov(const FiniteGraph& g, const Environment& env,
                                                VertexId v0, const std::vector<VertexId>& targets,
                                                const HittingOptions& opts) {
    return summarize_hits(hitting_replicas_markov(g, env, v0, targets, opts, 0, opts.n_walks), opts);
}

// --- hitting Monte Carlo on the infinite diluted lattice ----------------------

// Target on the lattice: either one crossing point or the whole square shell
// |v|_inf = r * shell_level.
struct LatticeTarget {
    std::optional<LatticeVertex> point;
    std::optional<long long> shell_level;

    bool contains(const LatticeVertex& v, int r) const {
        if (point && v == *point) return true;
        if (shell_level && linf_norm(v) == *shell_level * r) return true;
        return false;
    }

    long long reach(int r) const {
        long long m = 0;
        if (point) m = std::max(m, linf_norm(*point));
        if (shell_level) m = std::max(m, *shell_level * r);
        return m;
    }
};

// Reinforced walk started at the origin of the infinite lattice, realized on a
// window that doubles whenever the walker reaches its rim.
inline HitCounts hitting_replicas_lattice(GrowableWindow& window, double a0,
                                          const LatticeTarget& target,
                                          const HittingOptions& opts, long long k_begin,
                                          long long k_end) {
    if (target.contains({0, 0}, window.lattice().r))
        throw std::invalid_argument("start vertex cannot be a target");
    HitCounts counts;
    std::vector<long long> crossings(static_cast<std::size_t>(window.lattice().graph.edge_count()), 0);
    for (long long k = k_begin; k < k_end; ++k) {
        SplitMix64 rng = SplitMix64::stream(opts.seed, static_cast<std::uint64_t>(k));
        std::fill(crossings.begin(), crossings.end(), 0);
        WalkState s;
        s.position = window.origin();
        s.time = 0;
        bool settled = false;
        for (long long t = 0; t < opts.max_steps; ++t) {
            s.position = window.ensure_interior(s.position, crossings);
            const FiniteGraph& g = window.lattice().graph;
            const auto& inc = g.incident_edges(s.position);
            double total = 0.0;
            for (EdgeId e : inc) total += a0 + static_cast<double>(crossings[static_cast<std::size_t>(e)]);
            double u = rng.next_double() * total;
            EdgeId chosen = inc.back();
            for (EdgeId e : inc) {
                const double w = a0 + static_cast<double>(crossings[static_cast<std::size_t>(e)]);
                if (u < w) {
                    chosen = e;
                    break;
                }
                u -= w;
            }
            s.position = g.other_end(chosen, s.position);
            ++crossings[static_cast<std::size_t>(chosen)];
            const LatticeVertex& p = g.coord(s.position);
            if (target.contains(p, window.lattice().r)) {
                ++counts.hits;
                settled = true;
                break;
            }
            if (p.x1 == 0 && p.x2 == 0) {
                ++counts.returns;
                settled = true;
                break;
            }
        }
        if (!settled) ++counts.censored;
    }
    return counts;
}

inline HittingEstimate hit_before_return_lattice(int r, double a0, const LatticeTarget& target,
                                                 const HittingOptions& opts) {
    GrowableWindow window(r, std::max<long long>(2 * r, target.reach(r)));
    return summarize_hits(hitting_replicas_lattice(window, a0, target, opts, 0, opts.n_walks), opts);
}

// --- trajectory export ---------------------------------------------------------

// t,vertex,edge_crossed rows for one seeded reinforced trajectory
inline void write_trajectory_csv(std::ostream& out, const FiniteGraph& g, const InitialWeights& a,
                                 VertexId v0, long long n_steps, std::uint64_t seed) {
    SplitMix64 rng(seed);
    WalkState s = WalkState::start(g, v0);
    out << "t,vertex,edge_crossed\n";
    out << 0 << ',' << v0 << ",-1\n";
    for (long long t = 1; t <= n_steps; ++t) {
        const EdgeId e = errw_step(g, a, s, rng);
        out << t << ',' << s.position << ',' << e << '\n';
    }
}

} // namespace errw
