// walker: exact weight bookkeeping, closed-form path laws, hitting Monte
// Carlo with censoring, and the reversibility identity.
#include <doctest.h>

#include <set>
#include <sstream>

#include "errw/acceptance.hpp"
#include "errw/walker.hpp"

using namespace errw;

namespace {
const FiniteGraph& triangle() {
    static const FiniteGraph g = acceptance::triangle_graph();
    return g;
}
} // namespace

TEST_CASE("reinforced path probabilities") {
    const auto a1 = InitialWeights::constant(triangle(), 1.0);
    CHECK(errw_path_probability(triangle(), a1, 0, {0, 1, 2}) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // one step from a four-way crossing with constant weights
    const LatticeGraph win = build_window_graph(2, 2);
    const auto origin = *win.vertex_at({0, 0});
    const auto aw = InitialWeights::constant(win.graph, 0.8);
    const auto nb = win.graph.other_end(win.graph.incident_edges(origin)[0], origin);
    CHECK(errw_path_probability(win.graph, aw, origin, {origin, nb}) == doctest::Approx(0.25).epsilon(1e-14));

    // out and back over a degree-2 vertex: (1/4) * (a+1)/(2a+1)
    const double a = 0.8;
    CHECK(errw_path_probability(win.graph, aw, origin, {origin, nb, origin}) ==
          doctest::Approx(0.25 * (a + 1.0) / (2.0 * a + 1.0)).epsilon(1e-14));

    // inadmissible moves have probability zero
    CHECK(errw_path_probability(triangle(), a1, 0, {0, 0}) == 0.0);
    CHECK(errw_path_probability(triangle(), a1, 1, {0, 1}) == 0.0);
}

TEST_CASE("reinforced step distribution at a degree-2 vertex after one crossing") {
    // after traversing edge e once its weight is a + 1
    const FiniteGraph path = acceptance::path_graph(3);
    const auto a = InitialWeights::constant(path, 0.5);
    WalkState s = WalkState::start(path, 1);
    s.crossings[0] = 1;  // edge {0,1} crossed once
    long long to0 = 0, total = 200000;
    SplitMix64 rng(99);
    for (long long k = 0; k < total; ++k) {
        WalkState t = s;
        t.position = 1;
        errw_step(path, a, t, rng);
        to0 += t.position == 0;
    }
    const double p = (0.5 + 1.0) / (2.0 * 0.5 + 1.0);  // (a+1)/(2a+1)
    CHECK(std::fabs(static_cast<double>(to0) / total - p) < 4.0 * std::sqrt(p * (1 - p) / total));
}

TEST_CASE("weight bookkeeping stays exact over long runs") {
    const auto a = InitialWeights::constant(triangle(), 0.3);
    WalkState s = WalkState::start(triangle(), 0);
    SplitMix64 rng(5);
    for (int t = 1; t <= 100000; ++t) {
        errw_step(triangle(), a, s, rng);
        if (t % 10000 == 0) {
            long long total = 0;
            for (long long c : s.crossings) total += c;
            CHECK(total == t);
            CHECK(s.time == t);
            for (EdgeId e = 0; e < 3; ++e)
                CHECK(reinforced_weight(a, s, e) ==
                      0.3 + static_cast<double>(s.crossings[static_cast<std::size_t>(e)]));
        }
    }
}

TEST_CASE("markov transition row and homogeneity") {
    const auto env = Environment::from_weights({2.0, 1.0, 1.0});
    // vertex 0 carries edges {0,1} (weight 2) and {0,2} (weight 1)
    const auto row = markov_transition_row(triangle(), env, 0);
    CHECK(row[0] == doctest::Approx(2.0 / 3.0));
    CHECK(row[1] == doctest::Approx(1.0 / 3.0));

    // the law has no time dependence: frequencies from an early and a late
    // window of one long run match the same row
    WalkState s = WalkState::start(triangle(), 0);
    SplitMix64 rng(17);
    long long early = 0, late = 0, early_n = 0, late_n = 0;
    for (long long t = 0; t < 400000; ++t) {
        const VertexId from = s.position;
        const EdgeId e = markov_step(triangle(), env, s, rng);
        if (from == 0) {
            const bool first = (t < 200000);
            (first ? early_n : late_n) += 1;
            if (e == 0) (first ? early : late) += 1;
        }
    }
    const double p_early = static_cast<double>(early) / early_n;
    const double p_late = static_cast<double>(late) / late_n;
    CHECK(std::fabs(p_early - 2.0 / 3.0) < 4.0 * std::sqrt((2.0 / 9.0) / early_n));
    CHECK(std::fabs(p_late - 2.0 / 3.0) < 4.0 * std::sqrt((2.0 / 9.0) / late_n));
}

TEST_CASE("markov path probabilities and reversibility") {
    const auto uniform = Environment::uniform(triangle());
    CHECK(markov_path_probability(triangle(), uniform, 1, {1}) == doctest::Approx(1.0));

    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto ucyc = Environment::uniform(cyc);
    CHECK(markov_path_probability(cyc, ucyc, 0, {0, 1, 2}) == doctest::Approx(0.25).epsilon(1e-14));

    SplitMix64 rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> logs(4);
        for (auto& t : logs) t = -2.0 + 4.0 * rng.next_double();
        const auto env = Environment::from_logs(logs);
        std::vector<VertexId> path{0};
        for (int t = 0; t < 9; ++t) {
            const auto& inc = cyc.incident_edges(path.back());
            path.push_back(cyc.other_end(inc[rng.next_below(inc.size())], path.back()));
        }
        const VertexId ell = path.back();
        const std::vector<VertexId> rev(path.rbegin(), path.rend());
        const double fwd = markov_path_probability(cyc, env, 0, path);
        const double bwd = markov_path_probability(cyc, env, ell, rev);
        const double ratio = std::exp(log_vertex_weight(cyc, env, ell) - log_vertex_weight(cyc, env, 0));
        CHECK(std::fabs(fwd - ratio * bwd) <= 1e-12 * fwd);
    }
}

TEST_CASE("hitting estimator") {
    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto a = InitialWeights::constant(cyc, 1.0);
    HittingOptions opts;
    opts.n_walks = 4000;
    opts.seed = 3;

    SUBCASE("first step always lands in a full neighbor set") {
        const auto est = hit_before_return(cyc, a, 0, {1, 3}, opts);
        CHECK(est.estimate == 1.0);
        CHECK(est.n_walks == opts.n_walks);
        CHECK(!est.error);
    }

    SUBCASE("start vertex rejected as target") {
        CHECK_THROWS_AS(hit_before_return(cyc, a, 0, {0, 2}, opts), std::invalid_argument);
        CHECK_THROWS_AS(hit_before_return(cyc, a, 0, {}, opts), std::invalid_argument);
    }

    SUBCASE("fixed environment on the 4-cycle hits the opposite corner half the time") {
        HittingOptions big = opts;
        big.n_walks = 40000;
        const auto est = hit_before_return_markov(cyc, Environment::uniform(cyc), 0, {2}, big);
        CHECK(std::fabs(est.estimate - 0.5) <= 3.0 * est.ci_halfwidth / 1.96);
        CHECK(!est.error);
    }

    SUBCASE("censoring is reported, never silently dropped") {
        HittingOptions tiny = opts;
        tiny.max_steps = 1;  // a two-step target is unreachable
        const auto est = hit_before_return(cyc, a, 0, {2}, tiny);
        CHECK(est.censored_fraction > tiny.censoring_threshold);
        CHECK(est.error.has_value());
    }
}

TEST_CASE("walk on the lattice window with growth on demand") {
    LatticeTarget target;
    target.point = LatticeVertex{8, 0};
    HittingOptions opts;
    opts.n_walks = 300;
    opts.max_steps = 200000;
    opts.seed = 12;
    const auto est = hit_before_return_lattice(2, 1.0, target, opts);
    CHECK(est.n_walks > 0);
    CHECK(est.estimate > 0.0);
    CHECK(est.estimate < 1.0);

    LatticeTarget shell;
    shell.shell_level = 1;
    const auto est2 = hit_before_return_lattice(2, 1.0, shell, opts);
    CHECK(est2.estimate > 0.0);
    CHECK(est2.estimate < 1.0);
    CHECK(!est2.error);
}

TEST_CASE("no finite subgraph traps the reinforced walk") {
    const FiniteGraph cyc = acceptance::cycle_graph(6);
    const auto a = InitialWeights::constant(cyc, 1.0);
    WalkState s = WalkState::start(cyc, 0);
    SplitMix64 rng(8);
    for (int window = 0; window < 3; ++window) {
        std::set<VertexId> seen;
        for (int t = 0; t < 100000; ++t) {
            errw_step(cyc, a, s, rng);
            seen.insert(s.position);
        }
        CHECK(seen.size() == 6);
    }
}

TEST_CASE("replica partition does not change the totals") {
    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto a = InitialWeights::constant(cyc, 1.0);
    HittingOptions opts;
    opts.n_walks = 2000;
    opts.seed = 77;
    const HitCounts whole = hitting_replicas_errw(cyc, a, 0, {2}, opts, 0, 2000);
    HitCounts split = hitting_replicas_errw(cyc, a, 0, {2}, opts, 0, 700);
    split += hitting_replicas_errw(cyc, a, 0, {2}, opts, 700, 2000);
    CHECK(whole.hits == split.hits);
    CHECK(whole.returns == split.returns);
    CHECK(whole.censored == split.censored);
}

TEST_CASE("long-path frequencies match the closed-form law") {
    // simulator vs. bookkeeping formula on length-12 paths: pick the two
    // reinforcement extremes and one mixed path, then compare seeded
    // frequencies against the exact probabilities
    const auto a = InitialWeights::constant(triangle(), 1.0);
    const std::vector<std::vector<VertexId>> chosen{
        {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0},  // oscillation on one edge
        {0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0},  // steady rotation
        {0, 2, 1, 0, 2, 0, 2, 1, 2, 1, 0, 1, 2},
    };
    constexpr long long kReplicas = 400'000;
    std::vector<long long> counts(chosen.size(), 0);
    WalkState s = WalkState::start(triangle(), 0);
    std::vector<VertexId> traj(13);
    for (long long k = 0; k < kReplicas; ++k) {
        SplitMix64 rng = SplitMix64::stream(902, static_cast<std::uint64_t>(k));
        s.reset(0);
        traj[0] = 0;
        for (int t = 1; t <= 12; ++t) {
            errw_step(triangle(), a, s, rng);
            traj[static_cast<std::size_t>(t)] = s.position;
        }
        for (std::size_t p = 0; p < chosen.size(); ++p)
            if (traj == chosen[p]) ++counts[p];
    }
    for (std::size_t p = 0; p < chosen.size(); ++p) {
        const double prob = errw_path_probability(triangle(), a, 0, chosen[p]);
        REQUIRE(prob > 0.0);
        const double freq = static_cast<double>(counts[p]) / kReplicas;
        const double sigma = std::sqrt(prob * (1.0 - prob) / kReplicas);
        CHECK(std::fabs(freq - prob) <= 4.0 * sigma);
    }
}

TEST_CASE("trajectory export") {
    const auto a = InitialWeights::constant(triangle(), 1.0);
    std::ostringstream out1, out2;
    write_trajectory_csv(out1, triangle(), a, 0, 50, 21);
    write_trajectory_csv(out2, triangle(), a, 0, 50, 21);
    CHECK(out1.str() == out2.str());
    CHECK(out1.str().rfind("t,vertex,edge_crossed\n", 0) == 0);
    int lines = 0;
    for (char c : out1.str()) lines += c == '\n';
    CHECK(lines == 52);
}
