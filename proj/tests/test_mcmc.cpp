// sampler: determinism, adaptation, autocorrelation summaries, and the
// symmetry diagnostic with its precondition guard.
#include <doctest.h>

#include "errw/acceptance.hpp"
#include "errw/mcmc.hpp"
#include "errw/quadrature.hpp"
#include "errw/variational.hpp"

using namespace errw;

namespace {
ChainConfig quick_config(std::uint64_t seed, ChainTarget target = ChainTarget::environment) {
    ChainConfig cfg;
    cfg.n_samples = 6000;
    cfg.burn_in = 2000;
    cfg.thinning = 2;
    cfg.seed = seed;
    cfg.target = target;
    return cfg;
}
} // namespace

TEST_CASE("identical configuration reproduces the stream bit for bit") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const auto cfg = quick_config(42);
    const SampleSet a = mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, cfg);
    const SampleSet b = mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, cfg);
    REQUIRE(a.log_x.size() == b.log_x.size());
    for (std::size_t k = 0; k < a.log_x.size(); ++k)
        for (std::size_t e = 0; e < a.log_x[k].size(); ++e)
            CHECK(a.log_x[k][e] == b.log_x[k][e]);

    ChainConfig other = cfg;
    other.chain_index = 1;
    const SampleSet c = mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, other);
    CHECK(c.log_x.back() != a.log_x.back());
}

TEST_CASE("adaptation lands in the target acceptance window") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const SampleSet chain =
        mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, quick_config(7));
    CHECK(chain.diagnostics.ok);
    CHECK(chain.diagnostics.min_acceptance >= 0.25);
    CHECK(chain.diagnostics.max_acceptance <= 0.5);
}

TEST_CASE("two seeds agree within their combined uncertainty") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const SampleSet a =
        mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, quick_config(100));
    const SampleSet b =
        mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, quick_config(200));
    const MomentEstimate ma = quarter_moment(a, inst.graph, inst.v0, inst.v1);
    const MomentEstimate mb = quarter_moment(b, inst.graph, inst.v0, inst.v1);
    const double combined = std::sqrt(ma.std_error * ma.std_error + mb.std_error * mb.std_error);
    CHECK(std::fabs(ma.value - mb.value) <= 3.0 * combined);
    CHECK(ma.ess > 100.0);
    CHECK(!ma.low_ess_warning);
}

TEST_CASE("degenerate quarter moment is exactly one") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const SampleSet chain =
        mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, quick_config(5));
    const MomentEstimate m = quarter_moment(chain, inst.graph, inst.v0, inst.v0);
    CHECK(m.value == 1.0);
    CHECK(m.std_error == 0.0);
}

TEST_CASE("autocorrelation-aware mean") {
    // iid stream: ESS close to n
    std::vector<double> iid;
    SplitMix64 rng(1);
    for (int k = 0; k < 20000; ++k) iid.push_back(rng.next_normal());
    const MomentEstimate m = autocorr_mean(iid);
    CHECK(std::fabs(m.value) < 4.0 / std::sqrt(20000.0));
    CHECK(m.ess > 15000.0);

    // strongly correlated AR(1): ESS must shrink accordingly
    std::vector<double> ar{0.0};
    for (int k = 1; k < 20000; ++k) ar.push_back(0.95 * ar.back() + rng.next_normal());
    const MomentEstimate c = autocorr_mean(ar);
    CHECK(c.ess < 2500.0);

    // constants have zero error and full ESS
    const MomentEstimate flat = autocorr_mean(std::vector<double>(500, 3.25));
    CHECK(flat.value == 3.25);
    CHECK(flat.std_error == 0.0);

    // the low-ESS guard kicks in under 100
    const MomentEstimate tiny = autocorr_mean(std::vector<double>(50, 0.0));
    CHECK(tiny.ess <= 50.0);
    CHECK(tiny.low_ess_warning);
}

TEST_CASE("symmetry diagnostic") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const SampleSet chain = mcmc_sample(inst.graph, inst.a, inst.v0, inst.v1, inst.e0,
                                        quick_config(31, ChainTarget::interpolated));

    SUBCASE("passes on the symmetric instance") {
        const SymmetryCheck sym = symmetry_check(inst, chain);
        CHECK(sym.precondition_ok);
        CHECK(sym.pass);
        CHECK(sym.statistic <= 3.0);
    }

    SUBCASE("degenerate pair gives a zero statistic") {
        SymmetricInstance degen = inst;
        degen.v1 = degen.v0;
        std::iota(degen.automorphism.begin(), degen.automorphism.end(), 0);
        const SymmetryCheck sym = symmetry_check(degen, chain);
        CHECK(sym.precondition_ok);
        CHECK(sym.statistic == 0.0);
        CHECK(sym.pass);
    }

    SUBCASE("broken weight symmetry is reported as a precondition violation") {
        SymmetricInstance broken = inst;
        auto ae = broken.a.edge;
        ae[0] *= 1.5;  // the reflection no longer preserves weights
        broken.a = InitialWeights::from_edges(broken.graph, ae);
        const SymmetryCheck sym = symmetry_check(broken, chain);
        CHECK(!sym.precondition_ok);
        CHECK(!sym.violations.empty());
        CHECK(sym.violations.front().rfind("(c)", 0) == 0);
    }
}

TEST_CASE("interpolated chain moments match reweighted environment moments") {
    // reweighting environment samples by the quarter ratio reproduces the
    // interpolated log-ratio mean
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    ChainConfig cfg = quick_config(55);
    cfg.n_samples = 20000;
    const SampleSet q_chain = mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, cfg);
    const SampleSet p_chain = mcmc_sample(inst.graph, inst.a, inst.v0, inst.v1, inst.e0,
                                          quick_config(56, ChainTarget::interpolated));

    Environment env;
    std::vector<double> weights, values, direct;
    for (const auto& lx : q_chain.log_x) {
        env.log_x = lx;
        const double w = std::exp(0.25 * (log_vertex_weight(inst.graph, env, inst.v1) -
                                          log_vertex_weight(inst.graph, env, inst.v0)));
        weights.push_back(w);
        values.push_back(log_vertex_weight(inst.graph, env, inst.v1) -
                         log_vertex_weight(inst.graph, env, inst.v0));
    }
    for (const auto& lx : p_chain.log_x) {
        env.log_x = lx;
        direct.push_back(log_vertex_weight(inst.graph, env, inst.v1) -
                         log_vertex_weight(inst.graph, env, inst.v0));
    }
    double wsum = 0.0, wval = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        wsum += weights[k];
        wval += weights[k] * values[k];
    }
    const double reweighted = wval / wsum;
    const MomentEstimate direct_mean = autocorr_mean(direct);
    // generous tolerance: the reweighted estimator has its own variance
    CHECK(std::fabs(reweighted - direct_mean.value) <= 6.0 * direct_mean.std_error + 0.02);
}

TEST_CASE("triangle edge log-ratio matches the quadrature oracle") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::constant(tri, 1.0);
    ChainConfig cfg = quick_config(83);
    cfg.n_samples = 12000;
    const SampleSet chain = mcmc_sample(tri, a, 0, std::nullopt, 0, cfg);
    std::vector<double> h;
    h.reserve(chain.log_x.size());
    for (const auto& lx : chain.log_x) h.push_back(lx[1] - lx[2]);
    const MomentEstimate est = autocorr_mean(h);
    const double oracle = expect_Q(tri, a, 0, 0, [](const Environment& env) {
        return env.log_x[1] - env.log_x[2];
    });
    CHECK(std::fabs(est.value - oracle) <= 3.0 * est.std_error);
    CHECK(est.ess > 100.0);
}

TEST_CASE("sampler entropy estimate agrees with the quadrature curve") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const FiniteGraph& g = inst.graph;
    ChainConfig cfg = quick_config(61, ChainTarget::interpolated);
    cfg.n_samples = 20000;
    const SampleSet chain = mcmc_sample(g, inst.a, inst.v0, inst.v1, inst.e0, cfg);

    auto tilt = [&](const Environment& env) {
        return std::exp(0.25 * (log_vertex_weight(g, env, inst.v1) -
                                log_vertex_weight(g, env, inst.v0)));
    };
    const QuadratureValue z_tilt = integrate_against_phi(g, inst.a, inst.v0, inst.e0, tilt);
    Environment env;
    for (double gamma : {-1.0, 0.8}) {
        std::vector<double> f;
        f.reserve(chain.log_x.size());
        for (const auto& lx : chain.log_x) {
            env.log_x = lx;
            f.push_back(log_f_gamma(inst, gamma, env));
        }
        const MomentEstimate est = autocorr_mean(f);
        const QuadratureValue num = integrate_against_phi(
            g, inst.a, inst.v0, inst.e0,
            [&](const Environment& e) { return log_f_gamma(inst, gamma, e) * tilt(e); });
        const double oracle = num.sign * z_tilt.sign * std::exp(num.log_abs - z_tilt.log_abs);
        CHECK(std::fabs(est.value - oracle) <= 3.0 * est.std_error);
    }
}

TEST_CASE("configuration validation") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    ChainConfig bad = quick_config(1);
    bad.n_samples = 0;
    CHECK_THROWS_AS(mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, bad),
                    std::invalid_argument);
    ChainConfig p_no_v1 = quick_config(1, ChainTarget::interpolated);
    CHECK_THROWS_AS(mcmc_sample(inst.graph, inst.a, inst.v0, std::nullopt, inst.e0, p_no_v1),
                    std::invalid_argument);
}
