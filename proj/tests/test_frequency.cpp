#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugelab/frequency.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {

Point offset_centre(const Grid& g) {
    const double c = g.L / 2 + g.h() / 2;
    return {c, c, g.dim == 3 ? c : 0.0};
}

Su2Form constant_form(const Grid& g, std::vector<Su2> comps) {
    Su2Form a(g, 1);
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int i = 0; i < g.dim; ++i) a.at(s, i) = comps[i];
    return a;
}

}  // namespace

TEST_SUITE("frequency") {
    TEST_CASE("radii_between") {
        const auto r = radii_between(1.0, 2.0, 5);
        REQUIRE(r.size() == 5);
        CHECK(r.front() == 1.0);
        CHECK(r.back() == doctest::Approx(2.0));
        CHECK(r[2] == doctest::Approx(1.5));
    }

    TEST_CASE("constant form has N = 0 and h = 2 pi r |nu|^2") {
        const Grid g(2, 64, 2.0);
        CutBundleField v{ScalarField(g, 1), {}};
        for (std::size_t s = 0; s < g.sites(); ++s) {
            v.form.at(s, 0) = 0.6;
            v.form.at(s, 1) = 0.8;
        }
        const FrequencyProfile P = profile(v, offset_centre(g), radii_between(0.15, 0.5, 5));
        for (std::size_t i = 0; i < P.r.size(); ++i) {
            CHECK(P.h[i] == doctest::Approx(2 * pi * P.r[i]).epsilon(1e-3));
            CHECK(std::abs(P.H[i]) < 1e-10);
            CHECK(std::abs(P.N[i]) < 1e-10);
        }
    }

    TEST_CASE("homogeneous models have N = k/2") {
        const Grid g(2, 128, 2.0);
        const Point p = offset_centre(g);
        for (int k = 1; k <= 3; ++k) {
            const CutBundleField v = sample_model(g, {k, 1.0, p, 2});
            const FrequencyProfile P = profile(v, p, radii_between(0.2, 0.4, 9));
            for (std::size_t i = 0; i < P.r.size(); ++i) {
                CHECK(P.defined[i]);
                CHECK(std::abs(P.N[i] - k / 2.0) < 0.01);
                // closed form: h(r) = c^2 r^{k} * 2 pi r
                CHECK(P.h[i] == doctest::Approx(2 * pi * std::pow(P.r[i], k + 1)).epsilon(0.01));
            }
            CHECK(dh_check(P) < 0.05);
            CHECK(monotonicity_check(P, 0.0) <= 2.5e-3);
            CHECK(scaling_identity_check(P) < 0.02);
            const NZero z = n_at_zero(profile(v, p, radii_between(8 * g.h(), g.L / 4, 12)));
            CHECK(z.snappable);
            CHECK(z.snapped == k / 2.0);
            CHECK(z.residual < 0.05);
        }
    }

    TEST_CASE("radius validation") {
        const Grid g(2, 64, 2.0);
        const Point p = offset_centre(g);
        const CutBundleField v = sample_model(g, {1, 1.0, p, 2});
        CHECK_THROWS_AS(profile(v, p, {2 * g.h()}), FrequencyError);
        CHECK_THROWS_AS(profile(v, p, {0.6}), FrequencyError);
        CHECK_THROWS_AS(profile(v, p, {0.3, 0.2}), FrequencyError);
        CHECK_THROWS_AS(profile(v, p, {5 * g.h()}), FrequencyError);
    }

    TEST_CASE("gauge mode with constant alpha") {
        // alpha = tau_1 dx + tau_2 dy: grad alpha = 0, |alpha|^2 = 1 and |[alpha_x, alpha_y]|^2 = |tau_3|^2 = 1/2,
        // so h = 4 pi R^2 and H = 2 r^2 (1/2)(4/3) pi R^3, giving N = r^2 R^2 / 3.
        const Grid g(3, 48, 4.0);
        GaugePair P = zero_pair(g, 0.7);
        P.alpha = constant_form(g, {Su2::basis(0), Su2::basis(1), Su2{}});
        const FrequencyProfile F = profile(P, offset_centre(g), radii_between(0.5, 1.0, 3));
        for (std::size_t i = 0; i < F.r.size(); ++i) {
            const double R = F.r[i];
            CHECK(F.h[i] == doctest::Approx(4 * pi * R * R).epsilon(1e-3));
            CHECK(F.N[i] == doctest::Approx(0.49 * R * R / 3).epsilon(0.03));
        }
        GaugePair Z = zero_pair(g);
        Z.alpha = constant_form(g, {Su2::basis(0), 0.5 * Su2::basis(0), Su2{}});
        const FrequencyProfile FZ = profile(Z, offset_centre(g), {0.5});
        CHECK(std::abs(FZ.H[0]) < 1e-10);
    }

    TEST_CASE("psi scaling is exact for models") {
        for (double R : {0.5, 2.0, 3.0}) {
            CHECK(psi_scaling_check({1, 1.0, {0.3, 0.2, 0}, 3}, R) <= 1e-12);
            CHECK(psi_scaling_check({4, 0.5, {0.0, 0.0, 0}, 2}, R) <= 1e-12);
        }
    }

    TEST_CASE("rescaled model is the normalized model") {
        const Grid g(2, 128, 2.0);
        const Point p = offset_centre(g);
        const ModelZForm M{1, 1.0, p, 2};
        const ModelZForm U{1, 1.0 / std::sqrt(model_h(M, 1.0)), p, 2};
        for (double lambda : {0.5, 0.25}) {
            const CutBundleField v = rescale(sample_model(g, M), p, lambda);
            for (Point d : {Point{0.3, 0.2, 0}, Point{-0.4, 0.1, 0}, Point{0.1, -0.5, 0}}) {
                const Point x{p[0] + d[0], p[1] + d[1], 0};
                const auto got = v.value_at(x);
                const ModelValue want = model_eval(U, x);
                CHECK(std::hypot(got[0] - want.v[0], got[1] - want.v[1]) <= 0.01 * want.norm);
            }
        }
        CHECK_THROWS(rescale(sample_model(g, M), p, 1.5));
    }

    TEST_CASE("limit values of a normalized 3-D model") {
        const Grid g(3, 64, 4.0);
        const ModelZForm M = normalized_model(2, offset_centre(g));
        const LimitReport rep = limit_values_check(M, g, {0.5, 1.0});
        CHECK(rep.values.size() == 12);
        CHECK(rep.worst() <= 0.03);
        for (double m : rep.lemma73_margin) CHECK(m >= 0);
    }
}
