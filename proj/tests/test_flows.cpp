#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugelab/flows.hpp"
#include "gaugelab/random_fields.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {

Su2Form shear_mode(const Grid& g) {
    Su2Form a(g, 1);
    for (std::size_t s = 0; s < g.sites(); ++s) a.at(s, 1) = std::sin(2 * pi * g.position(s)[0] / g.L) * Su2::basis(0);
    return a;
}

Su2Form constant_form(const Grid& g, std::vector<Su2> comps) {
    Su2Form a(g, 1);
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int i = 0; i < g.dim; ++i) a.at(s, i) = comps[i];
    return a;
}

}  // namespace

TEST_SUITE("flows") {
    TEST_CASE("heat flow decays a Fourier mode at the discrete rate") {
        const Grid g(3, 16, 2 * pi);
        const Su2Form a0 = shear_mode(g);
        const double dt = g.h() * g.h() / 8;
        const double lam = std::pow(2 * std::sin(pi / g.n) / g.h(), 2);
        FlowState S = heat_start(Su2Form(g, 1), a0, dt);
        const int steps = 40;
        for (int i = 0; i < steps; ++i) heat_step(S);
        const double expect = std::pow(1 - dt * lam, steps);
        CHECK(norm(S.pair.alpha) / norm(a0) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(S.t == doctest::Approx(steps * dt));
    }

    TEST_CASE("heat energy is nonincreasing and zero stays zero") {
        const Grid g(3, 12, 2 * pi);
        const Connection A = random_smooth_form(g, 1, 2, {1, 0.3, false, false});
        const FlowState S = run_heat(A, random_smooth_form(g, 1, 3), 0.2);
        REQUIRE(S.history.size() > 2);
        for (std::size_t i = 1; i < S.history.size(); ++i) CHECK(S.history[i].energy <= S.history[i - 1].energy * (1 + 1e-12));
        CHECK(S.t == doctest::Approx(0.2));
        const FlowState Z = run_heat(A, Su2Form(g, 1), 0.05);
        for (const Su2& v : Z.pair.alpha.data) CHECK(v == Su2{});
    }

    TEST_CASE("heat step rejects an unstable dt") {
        const Grid g(3, 8, 1.0);
        CHECK_THROWS_AS(heat_start(Su2Form(g, 1), shear_mode(g), 2 * heat_dt_limit(g)), FlowError);
    }

    TEST_CASE("stopping time meets its bound") {
        const Grid g(3, 12, 2 * pi);
        const Connection A = random_smooth_form(g, 1, 4, {1, 0.3, false, false});
        const StoppingResult r = stopping_time(A, random_smooth_form(g, 1, 5), 0.05);
        CHECK(r.s > 0);
        CHECK(r.s <= 0.05 + 1e-12);
        CHECK(r.q_norm_sq <= r.bound);
        CHECK(r.displacement_ok);
        CHECK_THROWS_AS(stopping_time(A, random_smooth_form(g, 1, 5), 0.0), FlowError);
    }

    TEST_CASE("Dirichlet flow leaves collar and exterior untouched") {
        const Grid g(3, 16, 2 * pi);
        const BallDomain D = BallDomain::make(g, {pi, pi, pi}, 2.0);
        const Connection A = random_smooth_form(g, 1, 6, {1, 0.3, false, false});
        const Su2Form a0 = random_smooth_form(g, 1, 7);
        FlowState S = dirichlet_heat_start(A, a0, D);
        double prev = ball_energy(A, a0, D);
        for (int i = 0; i < 20; ++i) {
            dirichlet_heat_step(S, D);
            const double e = ball_energy(A, S.pair.alpha, D);
            CHECK(e <= prev * (1 + 1e-10));
            prev = e;
        }
        std::size_t frozen = 0, moved = 0;
        for (std::size_t s = 0; s < g.sites(); ++s)
            for (int c = 0; c < 3; ++c) {
                if (D.interior[s]) {
                    moved += !(S.pair.alpha.at(s, c) == a0.at(s, c));
                } else {
                    ++frozen;
                    CHECK(S.pair.alpha.at(s, c) == a0.at(s, c));
                }
            }
        CHECK(frozen > 0);
        CHECK(moved > 0);
    }

    TEST_CASE("Chern-Simons of zero and of a constant connection") {
        const Grid g(3, 8, 2.0);
        const CsValue z = cs(zero_pair(g));
        CHECK(z.re == 0.0);
        CHECK(z.im == 0.0);
        for (const Su2C& v : cs_gradient(zero_pair(g)).data) CHECK(v == Su2C{});
        // A = a tau_1 dx + b tau_2 dy + c tau_3 dz: dA = 0 and
        // (1/3) tr(A^A^A) = (abc/3) sum eps_ijk tr(tau_i tau_j tau_k) vol = -(abc/2) vol.
        const double a = 0.3, b = -0.7, c = 1.1;
        GaugePair P = zero_pair(g);
        P.a = constant_form(g, {a * Su2::basis(0), b * Su2::basis(1), c * Su2::basis(2)});
        const CsValue v = cs(P);
        CHECK(v.re == doctest::Approx(-a * b * c / 2 * std::pow(g.L, 3)).epsilon(1e-12));
        CHECK(v.im == doctest::Approx(0.0).scale(1e-12));
    }

    TEST_CASE("Chern-Simons is invariant under a constant gauge rotation") {
        const Grid g(3, 8, 2 * pi);
        const GaugePair P = random_smooth_pair(g, 9);
        const GaugePair Q = gauge_apply(GaugeMap::constant(g, exp_su2(Su2{0.4, -1.0, 0.3})), P);
        const CsValue a = cs(P), b = cs(Q);
        CHECK(b.re == doctest::Approx(a.re).epsilon(1e-10));
        CHECK(b.im == doctest::Approx(a.im).epsilon(1e-10));
    }

    TEST_CASE("gradient flow lowers Re CS and the Hamiltonian flow keeps it") {
        const Grid g(3, 8, 2 * pi);
        const GaugePair P = random_smooth_pair(g, 11, {1, 0.1, false, true});
        const FlowState G = run_cs(P, CsFlowKind::gradient, 0.2);
        for (std::size_t i = 1; i < G.history.size(); ++i) CHECK(G.history[i].re_cs < G.history[i - 1].re_cs);
        const FlowState H = run_cs(P, CsFlowKind::hamiltonian, 0.2);
        const double drift_h = std::abs(H.history.back().re_cs - H.history.front().re_cs);
        const double drift_g = std::abs(G.history.back().re_cs - G.history.front().re_cs);
        CHECK(drift_h < 0.1 * drift_g);
    }

    TEST_CASE("coclosure projection annihilates the constraint") {
        const Grid g(3, 8, 2 * pi);
        const GaugePair P = random_smooth_pair(g, 12);
        const GaugePair V = cs_velocity(P, CsFlowKind::gradient, false);
        const GaugePair W = project_coclosure(P, V);
        const double before = norm(coclosure_constraint(P, V));
        CHECK(before > 0);
        CHECK(norm(coclosure_constraint(P, W)) <= 1e-8 * before);
    }
}
