#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gaugelab/zharm.hpp"

using namespace gaugelab;
using std::numbers::pi;

namespace {

Point cell_centre(const Grid& g) {
    const double c = (g.n / 2 + 0.5) * g.h();
    return {c, c, g.dim == 3 ? c : 0.0};
}

/// Complex-arithmetic oracle for Re(c z^{k/2} dz) with the principal branch.
std::array<double, 2> model_oracle(int k, double c, double x, double y) {
    const std::complex<double> z{x, y};
    const std::complex<double> f = c * std::pow(std::abs(z), k / 2.0) * std::exp(std::complex<double>(0, k / 2.0 * std::arg(z)));
    return {f.real(), -f.imag()};
}

}  // namespace

TEST_SUITE("zharm") {
    TEST_CASE("model values against complex arithmetic") {
        const ModelValue v = model_eval({2, 1.0, {0, 0, 0}, 2}, {1, 0, 0});
        CHECK(v.v[0] == doctest::Approx(1.0));
        CHECK(v.v[1] == doctest::Approx(0.0).scale(1));
        CHECK(v.norm == doctest::Approx(1.0));
        for (int k = 1; k <= 5; ++k)
            for (double th : {0.3, 1.7, 2.9, -2.2, -0.4}) {
                const double rho = 0.7, x = rho * std::cos(th), y = rho * std::sin(th);
                const ModelZForm M{k, 1.3, {0.2, -0.1, 0}, 2};
                const ModelValue m = model_eval(M, {x + 0.2, y - 0.1, 0});
                const auto o = model_oracle(k, 1.3, x, y);
                CHECK(m.v[0] == doctest::Approx(o[0]));
                CHECK(m.v[1] == doctest::Approx(o[1]));
                CHECK(m.norm == doctest::Approx(1.3 * std::pow(rho, k / 2.0)));
                CHECK(model_norm(M, {x + 0.2, y - 0.1, 0}) == doctest::Approx(m.norm));
            }
        CHECK(model_norm({3, 1.0, {0.5, 0.5, 0}, 2}, {0.5, 0.5, 0}) == 0.0);
        CHECK_THROWS_AS(model_eval({3, 1.0, {0.5, 0.5, 0}, 2}, {0.5, 0.5, 0}), ZharmError);
    }

    TEST_CASE("model_h closed form against sphere quadrature") {
        const ModelZForm M{3, 0.8, {0, 0, 0}, 3};
        const SphereRule S = sphere_rule(3, 64);
        double acc = 0;
        for (std::size_t i = 0; i < S.nodes.size(); ++i) acc += S.weights[i] * std::pow(model_norm(M, S.nodes[i]), 2);
        CHECK(model_h(M, 1.0) == doctest::Approx(acc).epsilon(1e-3));
        CHECK(model_h(normalized_model(2, {0, 0, 0}), 1.0) == doctest::Approx(1.0));
    }

    TEST_CASE("holonomy is (-1)^k around the axis and +1 away from it") {
        const Grid g(2, 32, 2.0);
        for (int k = 1; k <= 5; ++k) {
            const CutBundleField v = sample_model(g, {k, 1.0, cell_centre(g), 2});
            CHECK(holonomy(v, square_loop(g, {16, 16, 0}, 4)) == (k % 2 ? -1 : 1));
            CHECK(holonomy(v, square_loop(g, {25, 8, 0}, 3)) == 1);
        }
    }

    TEST_CASE("constant form is harmonic to roundoff") {
        const Grid g(2, 16, 1.0);
        CutBundleField v{ScalarField(g, 1), {}};
        for (std::size_t s = 0; s < g.sites(); ++s) {
            v.form.at(s, 0) = 0.4;
            v.form.at(s, 1) = -1.2;
        }
        const HarmonicityResidual r = harmonicity_residual(v, 4 * g.h());
        CHECK(r.d_norm < 1e-13);
        CHECK(r.dstar_norm < 1e-13);
    }

    TEST_CASE("model harmonicity residual is first order") {
        for (int k : {1, 3}) {
            double prev = 0;
            for (int n : {64, 128}) {
                const Grid g(2, n, 2.0);
                const CutBundleField v = sample_model(g, {k, 1.0, cell_centre(g), 2});
                const HarmonicityResidual r = harmonicity_residual(v, 0.25);
                const double total = r.d_norm + r.dstar_norm;
                if (prev > 0) {
                    CHECK(prev / total >= 1.6);
                    CHECK(prev / total <= 2.4);
                }
                prev = total;
            }
        }
    }

    TEST_CASE("torus quadratic differential has no zeros and a constant square root") {
        const Grid g(2, 32, 1.0);
        const QdOutput out = qd_pipeline(g, {Surface::torus, {4.0, 0.0}, 1, {0, 0, 0}});
        CHECK(out.zeros.empty());
        CHECK(out.square_defect < 1e-12);
        for (const auto& e : out.e) CHECK(std::abs(e) == doctest::Approx(2.0));
        const double s = 0.5;
        const double m = transverse_measure(out.nu, {{0.2, 0.3, 0}, {0.2 + s, 0.3, 0}});
        CHECK(m == doctest::Approx(2 * 2.0 * s).epsilon(0.01));
        CHECK(transverse_measure(out.nu, {{0.2, 0.1, 0}, {0.2, 0.1 + s, 0}}) <= 0.01 * m);
    }

    TEST_CASE("disk quadratic differential z^k dz^2 has one zero of multiplicity k") {
        for (int k = 1; k <= 4; ++k) {
            const Grid g(2, 64, 2.0);
            const Point p = cell_centre(g);
            const QdOutput out = qd_pipeline(g, {Surface::disk, {1.0, 0.0}, k, p});
            int total = 0;
            for (const auto& z : out.zeros) total += z.second;
            CHECK(total == k);
            REQUIRE(out.zeros.size() == 1);
            CHECK(std::hypot(out.zeros[0].first[0] - p[0], out.zeros[0].first[1] - p[1]) < g.h());
            CHECK(out.square_defect < 1e-10);
        }
    }

    TEST_CASE("k = 1 separatrices form a tripod") {
        const Grid g(2, 128, 2.0);
        const Point p = cell_centre(g);
        const QdOutput out = qd_pipeline(g, {Surface::disk, {1.0, 0.0}, 1, p});
        std::vector<Point> seeds;
        for (int j = 0; j < 3; ++j) {
            const double th = (pi + 2 * pi * j) / 3;
            seeds.push_back({p[0] + 0.3 * std::cos(th), p[1] + 0.3 * std::sin(th), 0});
        }
        const FoliationOutput f = foliation_trace(out.nu, seeds, 0.0, 0.9);
        std::vector<double> angles;
        for (const auto& leaf : f.leaves) {
            double best = 1e9, dmin = 1e9;
            Point at{};
            for (const Point& q : leaf) {
                const double d = std::hypot(q[0] - p[0], q[1] - p[1]);
                dmin = std::min(dmin, d);
                if (std::abs(d - 0.1) < best) {
                    best = std::abs(d - 0.1);
                    at = q;
                }
            }
            if (dmin < 3 * g.h()) angles.push_back(std::atan2(at[1] - p[1], at[0] - p[0]));
        }
        std::sort(angles.begin(), angles.end());
        angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b) { return std::abs(a - b) < 0.05; }),
                     angles.end());
        REQUIRE(angles.size() == 3);
        const double tol = 5 * pi / 180;
        CHECK(std::abs(angles[1] - angles[0] - 2 * pi / 3) < tol);
        CHECK(std::abs(angles[2] - angles[1] - 2 * pi / 3) < tol);
    }

    TEST_CASE("sphere equation residual decreases with the mesh") {
        for (int k : {1, 2}) {
            const ModelZForm M = normalized_model(k, {0, 0, 0});
            const double r1 = sphere_equation_residual(M, 32).residual, r2 = sphere_equation_residual(M, 64).residual;
            CHECK(r2 < 0.7 * r1);
        }
        CHECK(sphere_equation_residual({2, 0.0, {0, 0, 0}, 3}, 16).residual == 0.0);
    }
}
