// mixing-density kernel: tree polynomial (both routes), scale invariance,
// normalization changes, and the unnormalized log-densities.
#include <doctest.h>

#include "errw/acceptance.hpp"
#include "errw/magic.hpp"
#include "errw/rng.hpp"

using namespace errw;

TEST_CASE("tree polynomial on small graphs") {
    const FiniteGraph tri = acceptance::triangle_graph();
    CHECK(spanning_tree_log_polynomial(tri, Environment::uniform(tri)) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));

    const FiniteGraph cyc = acceptance::cycle_graph(4);
    CHECK(spanning_tree_log_polynomial(cyc, Environment::uniform(cyc)) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));

    // weighted triangle: pairwise products 2 + 3 + 6 = 11
    const auto env = Environment::from_weights({1.0, 2.0, 3.0});
    CHECK(spanning_tree_log_polynomial(tri, env) == doctest::Approx(std::log(11.0)).epsilon(1e-12));
    CHECK(spanning_tree_log_polynomial_enumerated(tri, env) ==
          doctest::Approx(std::log(11.0)).epsilon(1e-12));
}

TEST_CASE("tree polynomial flags disconnected graphs") {
    FiniteGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    CHECK_THROWS_AS(spanning_tree_log_polynomial(g, Environment::uniform(g)), std::domain_error);
    CHECK_THROWS_AS(spanning_tree_log_polynomial_enumerated(g, Environment::uniform(g)),
                    std::domain_error);
}

TEST_CASE("tree enumeration respects its cutoff") {
    const FiniteGraph big = acceptance::cycle_graph(12);
    CHECK_THROWS_AS(enumerate_spanning_trees(big), std::invalid_argument);
    const FiniteGraph small = acceptance::cycle_graph(8);
    CHECK(enumerate_spanning_trees(small).size() == 8);
}

TEST_CASE("tree polynomial stays finite at log-scale extremes") {
    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto env = Environment::from_logs({300.0, -300.0, 250.0, -250.0});
    const double lp = spanning_tree_log_polynomial(cyc, env);
    CHECK(std::isfinite(lp));
    CHECK(lp == doctest::Approx(spanning_tree_log_polynomial_enumerated(cyc, env)).epsilon(1e-10));
}

TEST_CASE("kernel scale invariance") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::from_edges(tri, {0.4, 1.3, 2.2});
    SplitMix64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> logs(3);
        for (auto& t : logs) t = -3.0 + 6.0 * rng.next_double();
        const double base = log_phi(tri, a, 0, Environment::from_logs(logs));
        std::vector<double> scaled = logs;
        for (auto& t : scaled) t += std::log(7.3);
        CHECK(std::fabs(log_phi(tri, a, 0, Environment::from_logs(scaled)) - base) < 1e-9);
    }
}

TEST_CASE("kernel hand value on the uniform 4-cycle") {
    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto a = InitialWeights::constant(cyc, 1.0);
    // sum a_e log x_e = 0; vertex factors: -(2/2) log 2 at v0, -3 * (3/2) log 2
    // elsewhere; half the log of 4 spanning trees
    const double by_hand = -std::log(2.0) - 4.5 * std::log(2.0) + 0.5 * std::log(4.0);
    CHECK(log_phi(cyc, a, 0, Environment::uniform(cyc)) == doctest::Approx(by_hand).epsilon(1e-14));
    CHECK(by_hand == doctest::Approx(-4.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("kernel respects weight-preserving relabelings") {
    // Phi_{v0}((x_{f(e)})_e) = Phi_{f^{-1}(v0)}(x) for the 4-cycle reflection
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    SplitMix64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> logs(4);
        for (auto& t : logs) t = -2.0 + 4.0 * rng.next_double();
        const auto env = Environment::from_logs(logs);
        std::vector<double> permuted(4);
        for (EdgeId e = 0; e < 4; ++e) {
            const auto img = map_edge(inst.graph, inst.automorphism, e);
            permuted[static_cast<std::size_t>(e)] = logs[static_cast<std::size_t>(*img)];
        }
        const double lhs = log_phi(inst.graph, inst.a, inst.v0, Environment::from_logs(permuted));
        const double rhs = log_phi(inst.graph, inst.a, inst.v1, env);  // f^{-1}(v0) = v1
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("renormalization") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::constant(tri, 1.0);
    const auto env = Environment::from_weights({1.0, 2.0, 3.0}, 0);

    const auto same = renormalize(env, 0);
    for (EdgeId e = 0; e < 3; ++e)
        CHECK(same.log_x[static_cast<std::size_t>(e)] == env.log_x[static_cast<std::size_t>(e)]);

    const auto other = renormalize(env, 1);
    CHECK(other.log_x[1] == 0.0);
    const auto back = renormalize(other, 0);
    for (EdgeId e = 0; e < 3; ++e)
        CHECK(std::fabs(back.log_x[static_cast<std::size_t>(e)] -
                        env.log_x[static_cast<std::size_t>(e)]) < 1e-14);

    CHECK(log_phi(tri, a, 0, other) == doctest::Approx(log_phi(tri, a, 0, env)).epsilon(1e-12));
}

TEST_CASE("unnormalized densities") {
    const FiniteGraph cyc = acceptance::cycle_graph(4);
    const auto a = InitialWeights::constant(cyc, 1.0);
    const auto env = Environment::from_logs({0.0, 0.4, -0.3, 1.1}, 0);

    CHECK(log_density_Q(cyc, a, 0, 0, env) == doctest::Approx(log_phi(cyc, a, 0, env)));
    CHECK_THROWS_AS(log_density_Q(cyc, a, 0, 1, env), std::invalid_argument);

    // interpolation: symmetric in the two starts, and the tilt against the
    // one-start density is exactly the quarter log-ratio
    const double p01 = log_density_P_interp(cyc, a, 0, 2, 0, env);
    const double p10 = log_density_P_interp(cyc, a, 2, 0, 0, env);
    CHECK(p01 == doctest::Approx(p10).epsilon(1e-14));

    SplitMix64 rng(14);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> logs{0.0, 0.0, 0.0, 0.0};
        for (int k = 1; k < 4; ++k) logs[static_cast<std::size_t>(k)] = -2.0 + 4.0 * rng.next_double();
        const auto x = Environment::from_logs(logs, 0);
        const double tilt = log_density_P_interp(cyc, a, 0, 2, 0, x) - log_density_Q(cyc, a, 0, 0, x);
        const double quarter = 0.25 * (log_vertex_weight(cyc, x, 2) - log_vertex_weight(cyc, x, 0));
        CHECK(std::fabs(tilt - quarter) < 1e-12);
    }

    // with equal vertex weights the interpolation collapses onto the kernel
    const auto flat = Environment::uniform(cyc, 0);
    CHECK(log_density_P_interp(cyc, a, 0, 2, 0, flat) ==
          doctest::Approx(log_phi(cyc, a, 0, flat)).epsilon(1e-14));
}
