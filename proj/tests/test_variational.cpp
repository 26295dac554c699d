// deformation apparatus: H, the exponential edge deformation, the explicit
// log Radon-Nikodym realization with its derivatives, tree statistics, and
// the optimal deformation parameter.
#include <doctest.h>

#include "errw/acceptance.hpp"
#include "errw/rng.hpp"
#include "errw/variational.hpp"

using namespace errw;

TEST_CASE("quarter log-ratio") {
    const FiniteGraph path = acceptance::path_graph(3);
    // endpoint vertex weights are single edges, so the ratio is direct
    auto env = Environment::from_logs({0.0, 4.0});
    CHECK(quarter_log_vertex_ratio(path, env, 0, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quarter_log_vertex_ratio(path, env, 2, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    env = Environment::from_logs({0.7, 0.7});
    CHECK(quarter_log_vertex_ratio(path, env, 0, 2) == 0.0);
}

TEST_CASE("deformation map") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    SplitMix64 rng(3);
    std::vector<double> logs(4);
    for (auto& t : logs) t = -1.5 + 3.0 * rng.next_double();
    logs[0] = 0.0;
    const auto env = Environment::from_logs(logs, 0);

    SUBCASE("gamma = 0 is the identity") {
        const auto same = deform(inst, 0.0, env);
        for (EdgeId e = 0; e < 4; ++e)
            CHECK(same.log_x[static_cast<std::size_t>(e)] == env.log_x[static_cast<std::size_t>(e)]);
    }

    SUBCASE("vertex weights move as prescribed") {
        const double gamma = -0.7;
        const auto moved = deform(inst, gamma, env);
        CHECK(moved.log_x[0] == 0.0);  // reference edge pinned
        CHECK(log_vertex_weight(inst.graph, moved, inst.v0) ==
              doctest::Approx(log_vertex_weight(inst.graph, env, inst.v0)).epsilon(1e-14));
        CHECK(log_vertex_weight(inst.graph, moved, inst.v1) ==
              doctest::Approx(log_vertex_weight(inst.graph, env, inst.v1) + gamma).epsilon(1e-13));
    }

    SUBCASE("opposite parameters invert each other") {
        const auto there = deform(inst, 1.3, env);
        const auto back = deform(inst, -1.3, there);
        for (EdgeId e = 0; e < 4; ++e)
            CHECK(std::fabs(back.log_x[static_cast<std::size_t>(e)] -
                            env.log_x[static_cast<std::size_t>(e)]) < 1e-14);
    }

    SUBCASE("deformed vertex weights") {
        CHECK(log_deformed_vertex_weight(inst, 0.0, env, 1) ==
              doctest::Approx(log_vertex_weight(inst.graph, env, 1)).epsilon(1e-14));
        CHECK(log_deformed_vertex_weight(inst, 2.1, env, inst.v0) ==
              doctest::Approx(log_vertex_weight(inst.graph, env, inst.v0)).epsilon(1e-14));
        CHECK(log_deformed_vertex_weight(inst, 2.1, env, inst.v1) ==
              doctest::Approx(log_vertex_weight(inst.graph, env, inst.v1) + 2.1).epsilon(1e-13));
    }
}

TEST_CASE("log f_gamma") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const auto flat = Environment::uniform(inst.graph, 0);

    SUBCASE("vanishes identically at gamma = 0") {
        SplitMix64 rng(6);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> logs(4, 0.0);
            for (int k = 1; k < 4; ++k) logs[static_cast<std::size_t>(k)] = -2.0 + 4.0 * rng.next_double();
            CHECK(log_f_gamma(inst, 0.0, Environment::from_logs(logs, 0)) == 0.0);
        }
    }

    SUBCASE("hand value at gamma = 1 on the flat environment") {
        // 1.25 - 2 + 3 log((1+e)/2) - (1/2)(1 + log((1+e)/2))
        const double by_hand = -1.25 + 2.5 * std::log((1.0 + std::exp(1.0)) / 2.0);
        CHECK(log_f_gamma(inst, 1.0, flat) == doctest::Approx(by_hand).epsilon(1e-13));
    }

    SUBCASE("uniformly bounded in the environment") {
        SplitMix64 rng(7);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> logs(4, 0.0);
            for (int k = 1; k < 4; ++k) logs[static_cast<std::size_t>(k)] = -30.0 + 60.0 * rng.next_double();
            const double f = log_f_gamma(inst, 1.5, Environment::from_logs(logs, 0));
            CHECK(std::isfinite(f));
            // |f| <= |gamma| (a_{v1}/2 + 1/4 + sum phi a + sum (a_v+1)/2 + (|V|-1)/2)
            CHECK(std::fabs(f) < 1.5 * (2.25 + 2.0 + 4.5 + 1.5));
        }
    }
}

TEST_CASE("derivatives of f_gamma") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);

    SUBCASE("flat potential kills all variance terms") {
        SymmetricInstance degenerate = inst;
        degenerate.phi.assign(4, 0.0);  // violates the boundary clause; calculus only
        const auto env = Environment::from_logs({0.0, 0.5, -0.5, 0.2}, 0);
        const auto der = f_gamma_derivatives(degenerate, 0.9, env);
        CHECK(der.first == doctest::Approx(inst.a.vertex[2] / 2.0 + 0.25).epsilon(1e-14));
        CHECK(der.second == doctest::Approx(0.0));
    }

    SUBCASE("finite differences confirm both derivatives") {
        SplitMix64 rng(12);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> logs(4, 0.0);
            for (int k = 1; k < 4; ++k) logs[static_cast<std::size_t>(k)] = -2.0 + 4.0 * rng.next_double();
            const auto env = Environment::from_logs(logs, 0);
            const double gamma = -1.5 + 3.0 * rng.next_double();
            const auto der = f_gamma_derivatives(inst, gamma, env);
            const long double g = gamma, h1 = 1e-5L, h2 = 1e-4L;
            const long double fd1 = (log_f_gamma_T<long double>(inst, g + h1, env) -
                                     log_f_gamma_T<long double>(inst, g - h1, env)) /
                                    (2 * h1);
            const long double fd2 = (log_f_gamma_T<long double>(inst, g + h2, env) -
                                     2 * log_f_gamma_T<long double>(inst, g, env) +
                                     log_f_gamma_T<long double>(inst, g - h2, env)) /
                                    (h2 * h2);
            CHECK(der.first == doctest::Approx(static_cast<double>(fd1)).epsilon(1e-6));
            CHECK(der.second == doctest::Approx(static_cast<double>(fd2)).epsilon(1e-6));
            // curvature never exceeds the Dirichlet form
            CHECK(der.second <= dirichlet_form(inst.graph, inst.a, inst.phi) + 1e-12);
        }
    }
}

TEST_CASE("tree statistics") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto flat = Environment::uniform(tri);

    SUBCASE("constant potential per edge") {
        const auto ts = tree_statistics(tri, flat, {1.0, 1.0, 1.0}, 0.7);
        CHECK(ts.mean == doctest::Approx(2.0).epsilon(1e-12));  // |V| - 1
        CHECK(ts.variance == doctest::Approx(0.0));
    }

    SUBCASE("hand-enumerated triangle") {
        const auto ts = tree_statistics_enumerated(tri, flat, {0.0, 1.0, 1.0}, 0.0);
        CHECK(ts.mean == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(ts.variance == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    }

    SUBCASE("both routes agree on random small graphs") {
        SplitMix64 rng(18);
        int done = 0;
        while (done < 50) {
            const int n = 3 + static_cast<int>(rng.next_below(4));
            FiniteGraph g(n);
            int idx = 0;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b, ++idx)
                    if (rng.next_double() < 0.6) g.add_edge(a, b);
            if (!g.connected() || g.edge_count() < n) continue;
            std::vector<double> logs(static_cast<std::size_t>(g.edge_count()));
            std::vector<double> phi(static_cast<std::size_t>(g.edge_count()));
            for (auto& t : logs) t = -2.0 + 4.0 * rng.next_double();
            for (auto& p : phi) p = rng.next_double();
            const auto env = Environment::from_logs(logs);
            const double gamma = -1.0 + 2.0 * rng.next_double();
            const auto enu = tree_statistics_enumerated(g, env, phi, gamma);
            const auto der = tree_statistics_logdet(g, env, phi, gamma);
            CHECK(enu.mean == doctest::Approx(der.mean).epsilon(1e-9));
            CHECK(enu.variance == doctest::Approx(der.variance).epsilon(1e-8));
            ++done;
        }
    }

    SUBCASE("enumeration refuses beyond the cutoff, dispatch falls back") {
        const FiniteGraph big = acceptance::cycle_graph(12);
        const auto env = Environment::uniform(big);
        std::vector<double> phi(12, 0.5);
        CHECK_THROWS_AS(tree_statistics_enumerated(big, env, phi, 0.0), std::invalid_argument);
        const auto ts = tree_statistics(big, env, phi, 0.0);  // log-det route
        CHECK(ts.mean == doctest::Approx(11 * 0.5).epsilon(1e-10));
        CHECK(ts.variance == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("optimal deformation parameter and moment bound") {
    CHECK(optimal_gamma(1.0) == doctest::Approx(-0.25));
    // hand series values of e^{-1/32} and e^{-1/96}
    CHECK(quarter_moment_bound(1.0) == doctest::Approx(0.969233234475).epsilon(1e-10));
    CHECK(quarter_moment_bound(3.0) == doctest::Approx(0.989637398914).epsilon(1e-10));
    CHECK(quarter_moment_bound(1e12) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(quarter_moment_bound(1e-4) < 1e-100);
    CHECK_THROWS_AS(optimal_gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(quarter_moment_bound(-1.0), std::invalid_argument);
}
