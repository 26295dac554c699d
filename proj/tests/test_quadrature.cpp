// quadrature oracle: rule sanity, normalization consistency across reference
// edges and starts, the ratio-law invariance, and the mixture identity.
#include <doctest.h>

#include "errw/acceptance.hpp"
#include "errw/quadrature.hpp"
#include "errw/variational.hpp"

using namespace errw;

TEST_CASE("Gauss-Legendre rule") {
    const GaussLegendre rule(32);
    double wsum = 0.0, x2 = 0.0;
    for (int k = 0; k < 32; ++k) {
        wsum += rule.weights[static_cast<std::size_t>(k)];
        x2 += rule.weights[static_cast<std::size_t>(k)] * rule.nodes[static_cast<std::size_t>(k)] *
              rule.nodes[static_cast<std::size_t>(k)];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("scaled accumulator spans extreme magnitudes") {
    ScaledSum s;
    s.add(800.0, 1.0);
    s.add(800.0, 1.0);
    s.add(-800.0, 1.0);  // negligible against e^800
    CHECK(s.log_abs() == doctest::Approx(800.0 + std::log(2.0)).epsilon(1e-12));
    CHECK(s.sign() == 1.0);
    ScaledSum neg;
    neg.add(5.0, -2.0);
    CHECK(neg.sign() == -1.0);
    CHECK(neg.log_abs() == doctest::Approx(5.0 + std::log(2.0)));
}

TEST_CASE("normalized environment law integrates to one") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::constant(tri, 1.0);
    QuadratureValue det;
    const double one = expect_Q(tri, a, 0, 0, [](const Environment&) { return 1.0; }, {}, &det);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(det.within_tolerance);
}

TEST_CASE("normalization constant ignores the reference edge and the swap start") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::from_edges(tri, {1.0, 0.7, 1.3});
    const auto z0 = normalization_constant(tri, a, 0, 0);
    const auto z1 = normalization_constant(tri, a, 0, 1);
    CHECK(std::fabs(z0.log_abs - z1.log_abs) < 1e-6);

    // the 4-cycle reflection swaps the two starts, so their constants agree
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const auto zv0 = normalization_constant(inst.graph, inst.a, inst.v0, inst.e0);
    const auto zv1 = normalization_constant(inst.graph, inst.a, inst.v1, inst.e0);
    CHECK(std::fabs(zv0.log_abs - zv1.log_abs) < 1e-6);
}

TEST_CASE("ratio laws agree across normalizations") {
    // first two moments of log(x_e / x_v) match between the slices normalized
    // at different reference edges
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::constant(tri, 1.0);
    auto ratio = [&](const Environment& env) {
        return env.log_x[2] - log_vertex_weight(tri, env, 2);
    };
    for (int moment = 1; moment <= 2; ++moment) {
        auto f = [&](const Environment& env) {
            const double v = ratio(env);
            return moment == 1 ? v : v * v;
        };
        const double m_e0 = expect_Q(tri, a, 0, 0, f);
        const double m_e1 = expect_Q(tri, a, 0, 1, f);
        CHECK(m_e0 == doctest::Approx(m_e1).epsilon(1e-6));
    }
}

TEST_CASE("mixture identity on short paths") {
    const FiniteGraph tri = acceptance::triangle_graph();
    const auto a = InitialWeights::constant(tri, 1.0);

    const auto mc = mixture_check(tri, a, 0, 0, {0, 1, 2});
    CHECK(mc.reinforced == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(mc.abs_difference <= 1e-6);

    const auto trivial = mixture_check(tri, a, 0, 0, {0});
    CHECK(trivial.reinforced == 1.0);
    CHECK(trivial.mixture == doctest::Approx(1.0).epsilon(1e-10));

    // total probability over all length-2 continuations
    double lhs_sum = 0.0, rhs_sum = 0.0;
    for (VertexId m : {1, 2})
        for (VertexId e : {0, 1, 2}) {
            if (!tri.adjacent(0, m) || !tri.adjacent(m, e)) continue;
            const auto c = mixture_check(tri, a, 0, 0, {0, m, e});
            lhs_sum += c.reinforced;
            rhs_sum += c.mixture;
        }
    CHECK(lhs_sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rhs_sum == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dimension cap is enforced") {
    const FiniteGraph big = acceptance::cycle_graph(6);  // five free coordinates
    const auto a = InitialWeights::constant(big, 1.0);
    CHECK_THROWS_AS(normalization_constant(big, a, 0, 0), std::invalid_argument);
}

TEST_CASE("interpolated-measure identities, deterministically") {
    // the interpolated density is the environment kernel tilted by the
    // quarter ratio, so its expectations reduce to ratios of kernel integrals
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const FiniteGraph& g = inst.graph;
    auto tilt = [&](const Environment& env) {
        return std::exp(0.25 * (log_vertex_weight(g, env, inst.v1) -
                                log_vertex_weight(g, env, inst.v0)));
    };
    const QuadratureValue z_tilt = integrate_against_phi(g, inst.a, inst.v0, inst.e0, tilt);
    auto expect_P = [&](auto&& f) {
        const QuadratureValue num = integrate_against_phi(
            g, inst.a, inst.v0, inst.e0,
            [&](const Environment& env) { return f(env) * tilt(env); });
        return num.sign * z_tilt.sign * std::exp(num.log_abs - z_tilt.log_abs);
    };

    SUBCASE("the log-ratio has exactly zero mean") {
        const double mean_h = expect_P([&](const Environment& env) {
            return quarter_log_vertex_ratio(g, env, inst.v0, inst.v1);
        });
        CHECK(std::fabs(mean_h) < 1e-9);
    }

    SUBCASE("the entropy curve sits inside its sandwich") {
        const double s_phi = dirichlet_form(g, inst.a, inst.phi);
        for (double gamma : {-2.0, -0.25, 1.0}) {
            const double g_val = expect_P(
                [&](const Environment& env) { return log_f_gamma(inst, gamma, env); });
            CHECK(g_val >= -1e-9);
            CHECK(g_val <= s_phi * gamma * gamma / 2.0 + 1e-9);
        }
    }
}

TEST_CASE("quadratic majorization of the log moment") {
    // log E[(x_{v1}/x_{v0})^{1/4}] <= gamma/4 + S_phi gamma^2 / 2 for every
    // gamma; the oracle value must sit below the whole parabola family
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    const double s_phi = dirichlet_form(inst.graph, inst.a, inst.phi);
    const double log_moment =
        std::log(quarter_moment_quadrature(inst.graph, inst.a, inst.v0, inst.v1, inst.e0));
    for (int k = 0; k <= 20; ++k) {
        const double gamma = -2.0 + 0.2 * k;
        CHECK(log_moment <= gamma / 4.0 + s_phi * gamma * gamma / 2.0 + 1e-9);
    }
    // the optimum of the parabola family reproduces the closed-form bound
    const double gs = optimal_gamma(s_phi);
    CHECK(gs / 4.0 + s_phi * gs * gs / 2.0 ==
          doctest::Approx(std::log(quarter_moment_bound(s_phi))).epsilon(1e-13));
}

TEST_CASE("quarter moment on the symmetric 4-cycle meets its bound") {
    const SymmetricInstance inst = acceptance::cycle_instance(4, 1.0);
    QuadratureValue det;
    const double qm =
        quarter_moment_quadrature(inst.graph, inst.a, inst.v0, inst.v1, inst.e0, {}, &det);
    CHECK(det.within_tolerance);
    CHECK(qm < quarter_moment_bound(3.0));
    CHECK(qm > 0.5);
    // halving the rule barely moves the value
    QuadratureSettings coarse;
    coarse.nodes_per_axis = 48;
    const double qm2 =
        quarter_moment_quadrature(inst.graph, inst.a, inst.v0, inst.v1, inst.e0, coarse);
    CHECK(std::fabs(qm - qm2) < 1e-6);
}
