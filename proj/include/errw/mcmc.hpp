// mcmc.hpp - component-wise Gaussian random-walk Metropolis in the log
// coordinates of the normalized weight slice, targeting either the
// environment law at one start or the interpolation between two starts.
// Per-coordinate proposal scales adapt toward 0.35 acceptance during burn-in
// and are frozen afterwards, so the recorded chain satisfies detailed
// balance. Autocorrelation-aware summaries and the symmetry diagnostic live
// here too.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/graph.hpp"
#include "errw/magic.hpp"
#include "errw/rng.hpp"

namespace errw {

enum class ChainTarget { environment, interpolated };

struct ChainConfig {
    long long n_samples = 20'000;  // retained samples
    long long burn_in = 4'000;     // adaptation sweeps, discarded
    long long thinning = 2;        // sweeps per retained sample
    double proposal_scale = 1.0;   // initial per-coordinate scale
    std::uint64_t seed = 1;
    std::uint64_t chain_index = 0;  // stream selector for multi-chain runs
    ChainTarget target = ChainTarget::environment;

    void validate() const {
        if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
        if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
        if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
        if (!(proposal_scale > 0.0)) throw std::invalid_argument("proposal scale must be positive");
    }
};

struct ChainDiagnostics {
    std::vector<double> acceptance;  // per free coordinate, after freezing
    double min_acceptance = 0.0;
    double max_acceptance = 0.0;
    bool ok = true;
    std::vector<std::string> warnings;
};

struct SampleSet {
    std::vector<std::vector<double>> log_x;  // per retained sample, per edge; e0 entry is 0
    ChainDiagnostics diagnostics;
};

// One chain on the slice normalized at e0. Deterministic given (seed,
// chain_index, config, graph): the sample stream is bit-identical across runs.
inline SampleSet mcmc_sample(const FiniteGraph& g, const InitialWeights& a, VertexId v0,
                             std::optional<VertexId> v1, EdgeId e0, const ChainConfig& cfg) {
    cfg.validate();
    if (!g.connected()) throw std::invalid_argument("graph must be connected");
    if (cfg.target == ChainTarget::interpolated && !v1)
        throw std::invalid_argument("interpolated target needs v1");

    std::vector<EdgeId> free_edges;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (e != e0) free_edges.push_back(e);
    const int dim = static_cast<int>(free_edges.size());

    Environment env = Environment::uniform(g, e0);
    auto log_density = [&]() {
        const double l0 = log_phi(g, a, v0, env);
        if (cfg.target == ChainTarget::environment) return l0;
        return 0.5 * (l0 + log_phi(g, a, *v1, env));
    };

    SplitMix64 rng = SplitMix64::stream(cfg.seed, cfg.chain_index);
    std::vector<double> scale(static_cast<std::size_t>(dim), cfg.proposal_scale);
    std::vector<long long> acc_batch(static_cast<std::size_t>(dim), 0);
    std::vector<long long> acc_frozen(static_cast<std::size_t>(dim), 0);
    long long frozen_sweeps = 0;

    double cur = log_density();
    constexpr long long kBatch = 64;
    constexpr double kTargetAcceptance = 0.35;

    SampleSet out;
    out.log_x.reserve(static_cast<std::size_t>(cfg.n_samples));

    const long long total_sweeps = cfg.burn_in + cfg.n_samples * cfg.thinning;
    for (long long sweep = 0; sweep < total_sweeps; ++sweep) {
        const bool adapting = sweep < cfg.burn_in;
        for (int k = 0; k < dim; ++k) {
            const EdgeId e = free_edges[static_cast<std::size_t>(k)];
            const double old_u = env.log_x[static_cast<std::size_t>(e)];
            env.log_x[static_cast<std::size_t>(e)] =
                old_u + scale[static_cast<std::size_t>(k)] * rng.next_normal();
            const double prop = log_density();
            if (std::log(rng.next_double_pos()) < prop - cur) {
                cur = prop;
                ++acc_batch[static_cast<std::size_t>(k)];
                if (!adapting) ++acc_frozen[static_cast<std::size_t>(k)];
            } else {
                env.log_x[static_cast<std::size_t>(e)] = old_u;
            }
        }
        if (adapting && (sweep + 1) % kBatch == 0) {
            for (int k = 0; k < dim; ++k) {
                const double rate =
                    static_cast<double>(acc_batch[static_cast<std::size_t>(k)]) / kBatch;
                double ls = std::log(scale[static_cast<std::size_t>(k)]);
                ls += 0.6 * (rate - kTargetAcceptance);
                ls = std::clamp(ls, -8.0, 6.0);
                scale[static_cast<std::size_t>(k)] = std::exp(ls);
                acc_batch[static_cast<std::size_t>(k)] = 0;
            }
        }
        if (!adapting) {
            ++frozen_sweeps;
            if ((sweep - cfg.burn_in + 1) % cfg.thinning == 0)
                out.log_x.push_back(env.log_x);
        }
    }

    auto& diag = out.diagnostics;
    diag.acceptance.resize(static_cast<std::size_t>(dim));
    diag.min_acceptance = 1.0;
    diag.max_acceptance = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double rate = frozen_sweeps > 0
                                ? static_cast<double>(acc_frozen[static_cast<std::size_t>(k)]) /
                                      static_cast<double>(frozen_sweeps)
                                : 0.0;
        diag.acceptance[static_cast<std::size_t>(k)] = rate;
        diag.min_acceptance = std::min(diag.min_acceptance, rate);
        diag.max_acceptance = std::max(diag.max_acceptance, rate);
        if (rate < 0.15 || rate > 0.7) {
            diag.ok = false;
            diag.warnings.push_back("coordinate " + std::to_string(k) +
                                    " acceptance rate " + std::to_string(rate) +
                                    " outside [0.15, 0.7]");
        }
    }
    return out;
}

// --- autocorrelation-aware summaries ------------------------------------------

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double ess = 0.0;
    bool low_ess_warning = false;  // under the minimum-ESS guard of 100
};

// Mean of a scalar chain with the variance of the mean corrected by the
// initial-positive-sequence autocorrelation sum.
inline MomentEstimate autocorr_mean(const std::vector<double>& h) {
    MomentEstimate out;
    const std::size_t n = h.size();
    if (n == 0) throw std::invalid_argument("empty chain");
    double mean = 0.0;
    for (double t : h) mean += t;
    mean /= static_cast<double>(n);
    out.value = mean;

    double gamma0 = 0.0;
    for (double t : h) gamma0 += (t - mean) * (t - mean);
    gamma0 /= static_cast<double>(n);
    if (gamma0 == 0.0) {
        out.std_error = 0.0;
        out.ess = static_cast<double>(n);
        out.low_ess_warning = out.ess < 100.0;
        return out;
    }

    auto gamma_at = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) s += (h[t] - mean) * (h[t + k] - mean);
        return s / static_cast<double>(n);
    };

    double tail = 0.0;
    for (std::size_t m = 0;; ++m) {
        const std::size_t k1 = 2 * m + 1, k2 = 2 * m + 2;
        if (k2 >= n / 2) break;
        const double pair = gamma_at(k1) + gamma_at(k2);
        if (pair <= 0.0) break;
        tail += pair;
    }
    const double var_mean = (gamma0 + 2.0 * tail) / static_cast<double>(n);
    out.std_error = std::sqrt(std::max(0.0, var_mean));
    out.ess = gamma0 * static_cast<double>(n) / (gamma0 + 2.0 * tail);
    out.low_ess_warning = out.ess < 100.0;
    return out;
}

// E[(x_{v1}/x_{v0})^{1/4}] over a sample set from the environment chain.
inline MomentEstimate quarter_moment(const SampleSet& samples, const FiniteGraph& g,
                                     VertexId v0, VertexId v1) {
    std::vector<double> h;
    h.reserve(samples.log_x.size());
    Environment env;
    for (const auto& lx : samples.log_x) {
        env.log_x = lx;
        h.push_back(std::exp(0.25 * (log_vertex_weight(g, env, v1) - log_vertex_weight(g, env, v0))));
    }
    return autocorr_mean(h);
}

// --- symmetry diagnostic --------------------------------------------------------

// Under the interpolated law the log-ratio log(x_{v1}/x_{v0}) and its negation
// share one distribution; matched here through mean and skew z-scores.
struct SymmetryCheck {
    bool precondition_ok = true;              // reflection clause of the assumption
    std::vector<std::string> violations;      // when the precondition fails
    double mean = 0.0, mean_z = 0.0;
    double skew = 0.0, skew_z = 0.0;
    double statistic = 0.0;  // max |z|
    bool pass = false;
};

inline SymmetryCheck symmetry_check(const SymmetricInstance& inst, const SampleSet& samples) {
    SymmetryCheck out;
    // the diagnostic rests on the reflection clause alone
    const auto rep = inst.check();
    for (const auto& v : rep.violations)
        if (v.rfind("(c)", 0) == 0) out.violations.push_back(v);
    if (!out.violations.empty()) {
        out.precondition_ok = false;
        return out;
    }
    std::vector<double> w;
    w.reserve(samples.log_x.size());
    Environment env;
    for (const auto& lx : samples.log_x) {
        env.log_x = lx;
        w.push_back(log_vertex_weight(inst.graph, env, inst.v1) -
                    log_vertex_weight(inst.graph, env, inst.v0));
    }
    if (inst.v0 == inst.v1) {
        out.pass = true;
        return out;  // statistic exactly 0
    }
    const MomentEstimate m = autocorr_mean(w);
    out.mean = m.value;
    out.mean_z = m.std_error > 0.0 ? m.value / m.std_error : 0.0;

    // third central moment by batch means
    const std::size_t n = w.size();
    const std::size_t n_batches = std::min<std::size_t>(32, std::max<std::size_t>(2, n / 64));
    const std::size_t len = n / n_batches;
    std::vector<double> batch_m3;
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s3 = 0.0;
        for (std::size_t t = b * len; t < (b + 1) * len; ++t) {
            const double d = w[t] - m.value;
            s3 += d * d * d;
        }
        batch_m3.push_back(s3 / static_cast<double>(len));
    }
    double m3 = 0.0;
    for (double t : batch_m3) m3 += t;
    m3 /= static_cast<double>(n_batches);
    double var_m3 = 0.0;
    for (double t : batch_m3) var_m3 += (t - m3) * (t - m3);
    var_m3 /= static_cast<double>(n_batches) * (static_cast<double>(n_batches) - 1.0);
    out.skew = m3;
    out.skew_z = var_m3 > 0.0 ? m3 / std::sqrt(var_m3) : 0.0;

    out.statistic = std::max(std::fabs(out.mean_z), std::fabs(out.skew_z));
    out.pass = out.statistic <= 3.0;
    return out;
}

} // namespace errw
