#include <doctest.h>

#include <complex>
#include <random>

#include "gaugelab/algebra.hpp"

using namespace gaugelab;
using cd = std::complex<double>;
using Mat = std::array<std::array<cd, 2>, 2>;

namespace {

/// tau_i = -(i/2) sigma_i as explicit 2x2 matrices.
Mat tau_matrix(int i) {
    const cd I(0, 1);
    Mat s{};
    if (i == 0) s = {{{0, 1}, {1, 0}}};
    if (i == 1) s = {{{0, -I}, {I, 0}}};
    if (i == 2) s = {{{1, 0}, {0, -1}}};
    for (auto& row : s)
        for (auto& v : row) v *= -0.5 * I;
    return s;
}

Mat matrix_of(const Su2& u) {
    Mat m{};
    for (int i = 0; i < 3; ++i) {
        const Mat t = tau_matrix(i);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) m[a][b] += u[i] * t[a][b];
    }
    return m;
}

Mat mul(const Mat& x, const Mat& y) {
    Mat m{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) m[a][b] += x[a][c] * y[c][b];
    return m;
}

cd trace(const Mat& m) { return m[0][0] + m[1][1]; }

Su2 random_su2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_SUITE("algebra") {
    TEST_CASE("bracket structure constants and antisymmetry") {
        CHECK(bracket(Su2::basis(0), Su2::basis(1)) == Su2::basis(2));
        CHECK(bracket(Su2::basis(1), Su2::basis(2)) == Su2::basis(0));
        const Su2 u{0.3, -1.2, 0.7};
        CHECK(bracket(u, u) == Su2{});
    }

    TEST_CASE("bracket agrees with the matrix commutator") {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 20; ++t) {
            const Su2 u = random_su2(rng), v = random_su2(rng);
            const Mat uv = mul(matrix_of(u), matrix_of(v)), vu = mul(matrix_of(v), matrix_of(u));
            const Mat w = matrix_of(bracket(u, v));
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) CHECK(std::abs(uv[a][b] - vu[a][b] - w[a][b]) < 1e-14);
        }
    }

    TEST_CASE("inner product is minus the trace") {
        CHECK(inner(Su2::basis(0), Su2::basis(0)) == doctest::Approx(0.5));
        CHECK(inner(Su2::basis(0), Su2::basis(1)) == 0.0);
        CHECK(inner(Su2{}, Su2{1, 2, 3}) == 0.0);
        std::mt19937_64 rng(5);
        for (int t = 0; t < 20; ++t) {
            const Su2 u = random_su2(rng), v = random_su2(rng);
            CHECK(inner(u, v) == doctest::Approx(-trace(mul(matrix_of(u), matrix_of(v))).real()).epsilon(1e-13));
        }
    }

    TEST_CASE("ad-invariance of the inner product") {
        std::mt19937_64 rng(7);
        for (int t = 0; t < 100; ++t) {
            const Su2 w = random_su2(rng), u = random_su2(rng), v = random_su2(rng);
            CHECK(std::abs(inner(bracket(w, u), v) + inner(u, bracket(w, v))) < 1e-14);
        }
    }

    TEST_CASE("complex trace pairing") {
        const Su2C t1(Su2::basis(0));
        CHECK(std::abs(complex_trace_pair(t1, t1) - cd(-0.5, 0)) < 1e-15);
        const Su2C it1(Su2{}, Su2::basis(0));
        CHECK(std::abs(complex_trace_pair(it1, t1) - cd(0, -0.5)) < 1e-15);
        CHECK(std::abs(complex_trace_pair(Su2C{}, t1)) == 0.0);
    }

    TEST_CASE("exp and log invert each other and realize the adjoint") {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 50; ++t) {
            Su2 xi = random_su2(rng);
            const Su2 back = log_su2(exp_su2(xi));
            for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(xi[i]).epsilon(1e-12));
            const Quat q = exp_su2(xi);
            const Su2 u = random_su2(rng);
            // q u q^{-1} as matrices, with q = cos(th/2) + sin(th/2) n.tau * 2 in the tau basis
            Mat Q{};
            const double th = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            const Mat X = matrix_of((1.0 / th) * xi);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) Q[a][b] = (a == b ? std::cos(th / 2) : 0.0) + 2.0 * std::sin(th / 2) * X[a][b];
            Mat Qi{};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) Qi[a][b] = std::conj(Q[b][a]);
            const Mat lhs = mul(mul(Q, matrix_of(u)), Qi);
            const Mat rhs = matrix_of(adjoint(q, u));
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) CHECK(std::abs(lhs[a][b] - rhs[a][b]) < 1e-13);
        }
    }
}
