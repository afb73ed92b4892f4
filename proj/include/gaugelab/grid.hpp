/// Periodic lattices in two and three dimensions with cubical discrete exterior calculus.
///
/// Forms are cochains stored per site: a p-form has binomial(dim, p) components at each
/// site, one per increasing index tuple in lexicographic order. extder uses forward
/// differences and coder is its exact transpose under the pairing h^dim * sum(inner).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugelab/algebra.hpp"

namespace gaugelab {

using Point = std::array<double, 3>;

class GridError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    int dim = 3;
    int n = 16;
    double L = 2.0 * std::numbers::pi;

    Grid() = default;
    Grid(int dim_, int n_, double L_) : dim(dim_), n(n_), L(L_) {
        if (dim != 2 && dim != 3) throw GridError("grid dimension must be 2 or 3");
        if (n < 4) throw GridError("grid needs n >= 4");
        if (!(L > 0)) throw GridError("grid period must be positive");
    }

    double h() const { return L / n; }
    std::size_t sites() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(n);
        return s;
    }
    int coord(std::size_t site, int axis) const {
        return static_cast<int>((site / stride(axis)) % static_cast<std::size_t>(n));
    }
    std::array<int, 3> coords(std::size_t site) const {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < dim; ++a) c[a] = coord(site, a);
        return c;
    }
    std::size_t index(std::array<int, 3> c) const {
        std::size_t s = 0;
        for (int a = 0; a < dim; ++a) {
            int v = c[a] % n;
            if (v < 0) v += n;
            s = s * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
        }
        return s;
    }
    /// Neighbour one step along +axis (dir = +1) or -axis (dir = -1), wrapping.
    std::size_t shift(std::size_t site, int axis, int dir) const {
        const std::size_t st = stride(axis);
        const int c = coord(site, axis);
        if (dir > 0) return c == n - 1 ? site - static_cast<std::size_t>(n - 1) * st : site + st;
        return c == 0 ? site + static_cast<std::size_t>(n - 1) * st : site - st;
    }
    /// Physical position of a site, x_a = i_a h.
    Point position(std::size_t site) const {
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) p[a] = coord(site, a) * h();
        return p;
    }
    /// Minimum-image displacement x - c.
    Point displacement(const Point& x, const Point& c) const {
        Point d{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
            double v = x[a] - c[a];
            v -= L * std::floor(v / L + 0.5);
            d[a] = v;
        }
        return d;
    }
    double distance(const Point& x, const Point& c) const {
        const Point d = displacement(x, c);
        return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    }
    friend bool operator==(const Grid&, const Grid&) = default;
};

int binomial(int n, int k);

/// Increasing index tuples of length p in {0..dim-1}, as bitmasks in lexicographic order.
const std::vector<unsigned>& form_basis(int dim, int p);

/// Component slot of the index set `mask` among p-forms, or -1.
int component_of(int dim, unsigned mask);

/// Indices of a bitmask in increasing order.
std::vector<int> mask_indices(unsigned mask);

/// Sign (-1)^(number of elements of mask smaller than j).
inline double insertion_sign(unsigned mask, int j) {
    const unsigned below = mask & ((1u << j) - 1u);
    return (__builtin_popcount(below) % 2) ? -1.0 : 1.0;
}

template <class V>
struct Form {
    Grid grid;
    int degree = 0;
    int ncomp = 1;
    std::vector<V> data;

    Form() = default;
    Form(const Grid& g, int p) : grid(g), degree(p) {
        if (p < 0 || p > g.dim) throw GridError("form degree out of range");
        ncomp = binomial(g.dim, p);
        data.assign(g.sites() * static_cast<std::size_t>(ncomp), V{});
    }

    V& at(std::size_t site, int comp) { return data[site * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(comp)]; }
    const V& at(std::size_t site, int comp) const {
        return data[site * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(comp)];
    }
    std::size_t sites() const { return grid.sites(); }

    Form& operator+=(const Form& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    Form& operator-=(const Form& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    Form& operator*=(double s) {
        for (auto& v : data) v *= s;
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(double s, Form a) { return a *= s; }
    /// this += s * o
    void axpy(double s, const Form& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += s * o.data[i];
    }
};

using ScalarField = Form<double>;
using Su2Form = Form<Su2>;
using Su2CForm = Form<Su2C>;

/// L2 pairing h^dim * sum_sites sum_comp inner(a, b).
template <class V>
double pairing(const Form<V>& a, const Form<V>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += inner(a.data[i], b.data[i]);
    return s * std::pow(a.grid.h(), a.grid.dim);
}

template <class V>
double norm_sq(const Form<V>& a) { return pairing(a, a); }

template <class V>
double norm(const Form<V>& a) { return std::sqrt(pairing(a, a)); }

/// Forward-difference exterior derivative.
template <class V>
Form<V> extder(const Form<V>& w) {
    const Grid& g = w.grid;
    if (w.degree >= g.dim) throw GridError("extder: degree overflow");
    Form<V> out(g, w.degree + 1);
    const auto& outb = form_basis(g.dim, w.degree + 1);
    const double ih = 1.0 / g.h();
    struct Term { int src; int axis; double sign; };
    std::vector<std::vector<Term>> terms(outb.size());
    for (std::size_t J = 0; J < outb.size(); ++J) {
        for (int j : mask_indices(outb[J])) {
            const unsigned rest = outb[J] & ~(1u << j);
            terms[J].push_back({component_of(g.dim, rest), j, insertion_sign(rest, j)});
        }
    }
    for (std::size_t s = 0; s < g.sites(); ++s) {
        for (std::size_t J = 0; J < outb.size(); ++J) {
            V acc{};
            for (const Term& t : terms[J]) {
                const std::size_t sp = g.shift(s, t.axis, +1);
                acc += (t.sign * ih) * (w.at(sp, t.src) - w.at(s, t.src));
            }
            out.at(s, static_cast<int>(J)) = acc;
        }
    }
    return out;
}

/// Backward-difference codifferential, the exact transpose of extder.
template <class V>
Form<V> coder(const Form<V>& w) {
    const Grid& g = w.grid;
    if (w.degree < 1) throw GridError("coder: degree underflow");
    Form<V> out(g, w.degree - 1);
    const auto& outb = form_basis(g.dim, w.degree - 1);
    const double ih = 1.0 / g.h();
    struct Term { int src; int axis; double sign; };
    std::vector<std::vector<Term>> terms(outb.size());
    for (std::size_t I = 0; I < outb.size(); ++I) {
        for (int j = 0; j < g.dim; ++j) {
            if (outb[I] & (1u << j)) continue;
            terms[I].push_back({component_of(g.dim, outb[I] | (1u << j)), j, insertion_sign(outb[I], j)});
        }
    }
    for (std::size_t s = 0; s < g.sites(); ++s) {
        for (std::size_t I = 0; I < outb.size(); ++I) {
            V acc{};
            for (const Term& t : terms[I]) {
                const std::size_t sm = g.shift(s, t.axis, -1);
                acc -= (t.sign * ih) * (w.at(s, t.src) - w.at(sm, t.src));
            }
            out.at(s, static_cast<int>(I)) = acc;
        }
    }
    return out;
}

/// Sign of the permutation (I, complement of I).
double hodge_sign(int dim, unsigned mask);

/// Flat Hodge star, pointwise: *dx^I = sign(I, I^c) dx^{I^c}.
template <class V>
Form<V> hodge(const Form<V>& w) {
    const Grid& g = w.grid;
    Form<V> out(g, g.dim - w.degree);
    const auto& inb = form_basis(g.dim, w.degree);
    const unsigned full = (1u << g.dim) - 1u;
    std::vector<int> dst(inb.size());
    std::vector<double> sg(inb.size());
    for (std::size_t I = 0; I < inb.size(); ++I) {
        dst[I] = component_of(g.dim, full & ~inb[I]);
        sg[I] = hodge_sign(g.dim, inb[I]);
    }
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (std::size_t I = 0; I < inb.size(); ++I) out.at(s, dst[I]) = sg[I] * w.at(s, static_cast<int>(I));
    return out;
}

/// h^dim * sum over sites of a 0-form or top-form.
template <class V>
V integrate(const Form<V>& w) {
    if (w.degree != 0 && w.degree != w.grid.dim) throw GridError("integrate: needs degree 0 or dim");
    V acc{};
    for (const V& v : w.data) acc += v;
    return std::pow(w.grid.h(), w.grid.dim) * acc;
}

/// Pointwise squared norm sum_comp inner(w, w).
template <class V>
ScalarField pointwise_norm_sq(const Form<V>& w) {
    ScalarField out(w.grid, 0);
    for (std::size_t s = 0; s < w.sites(); ++s) {
        double acc = 0.0;
        for (int c = 0; c < w.ncomp; ++c) acc += inner(w.at(s, c), w.at(s, c));
        out.at(s, 0) = acc;
    }
    return out;
}

/// Fill a 0-form from a function of position.
ScalarField sample_scalar(const Grid& g, const std::function<double(const Point&)>& f);

struct BallRegion {
    Point center{0.0, 0.0, 0.0};
    double r = 0.0;
};

/// Sum of f over sites with |x - c| <= r, weighted by h^dim.
double ball_integral(const ScalarField& f, const BallRegion& b);

/// Sum over sites with r - t/2 < |x - c| <= r + t/2, weighted by h^dim / t. t <= 0 means 2h.
double shell_integral(const ScalarField& f, const Point& center, double r, double thickness = 0.0);

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Hodge Laplacian coder(extder) + extder(coder) applied to any degree.
template <class V>
Form<V> hodge_laplacian(const Form<V>& u) {
    const int p = u.degree, dim = u.grid.dim;
    Form<V> out(u.grid, p);
    if (p < dim) out += coder(extder(u));
    if (p > 0) out += extder(coder(u));
    return out;
}

/// Conjugate gradient for a symmetric positive (semi)definite operator.
/// With project_mean, the iterate and residual are kept orthogonal to constants.
template <class V, class Op>
Form<V> conjugate_gradient(const Op& apply, const Form<V>& f, double tol, std::size_t max_iter,
                           SolveStats* stats = nullptr, bool project_mean = false) {
    auto remove_mean = [&](Form<V>& w) {
        if (!project_mean) return;
        for (int c = 0; c < w.ncomp; ++c) {
            V mean{};
            for (std::size_t s = 0; s < w.sites(); ++s) mean += w.at(s, c);
            mean *= 1.0 / static_cast<double>(w.sites());
            for (std::size_t s = 0; s < w.sites(); ++s) w.at(s, c) -= mean;
        }
    };
    Form<V> x(f.grid, f.degree);
    Form<V> r = f;
    remove_mean(r);
    const double fnorm = std::sqrt(pairing(r, r));
    if (stats) *stats = {};
    if (fnorm == 0.0) return x;
    Form<V> p = r;
    double rr = pairing(r, r);
    for (std::size_t it = 0; it < max_iter; ++it) {
        Form<V> Ap = apply(p);
        remove_mean(Ap);
        const double alpha = rr / pairing(p, Ap);
        x.axpy(alpha, p);
        r.axpy(-alpha, Ap);
        const double rr_new = pairing(r, r);
        if (std::sqrt(rr_new) <= tol * fnorm) {
            if (stats) *stats = {static_cast<int>(it + 1), std::sqrt(rr_new) / fnorm};
            return x;
        }
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = r.data[i] + beta * p.data[i];
        rr = rr_new;
    }
    throw SolverError("conjugate gradient did not converge");
}

inline std::size_t default_max_iter(const Grid& g) { return 10 * g.sites(); }

/// Solve (coder extder + extder coder + m^2) u = f to relative residual 1e-10.
template <class V>
Form<V> solve_helmholtz(const Form<V>& f, double m, SolveStats* stats = nullptr, double tol = 1e-10) {
    if (!(m > 0.0)) throw SolverError("solve_helmholtz needs m > 0 on a torus");
    const double m2 = m * m;
    auto op = [m2](const Form<V>& u) {
        Form<V> out = hodge_laplacian(u);
        out.axpy(m2, u);
        return out;
    };
    return conjugate_gradient(op, f, tol, default_max_iter(f.grid), stats);
}

/// Mean-free solution of coder(extder u) = f - mean(f) for 0-forms.
template <class V>
Form<V> solve_poisson_mean_free(const Form<V>& f, SolveStats* stats = nullptr, double tol = 1e-10) {
    if (f.degree != 0) throw SolverError("solve_poisson_mean_free expects a 0-form");
    auto op = [](const Form<V>& u) { return coder(extder(u)); };
    return conjugate_gradient(op, f, tol, default_max_iter(f.grid), stats, true);
}

/// Regularized delta: 1/vol on the discrete radius-eps ball around p, zero elsewhere.
ScalarField regularized_delta(const Grid& g, const Point& p, double eps);

/// Solution of (coder extder + 1) f = delta_{p,eps} on a 3-D grid.
ScalarField greens_regularized(const Grid& g, const Point& p, double eps, SolveStats* stats = nullptr);

/// Profile 1/(4 pi r) used as the near-pole model of the regularized Green's function.
double greens_profile(double r);

/// Least-squares fit of a constant C so that f ~ greens_profile(r) + C for eps <= r <= 4 eps;
/// returns the fitted constant and the largest relative mismatch on that annulus.
struct GreensFit {
    double constant = 0.0;
    double max_relative_error = 0.0;
    double relative_error_at_2eps = 0.0;
};
GreensFit fit_greens_profile(const ScalarField& f, const Point& p, double eps);

/// Periodic multilinear interpolation of a scalar 0-form at a physical point.
double interpolate(const ScalarField& f, const Point& x);

/// Quadrature nodes and weights for the unit sphere (dim 3) or circle (dim 2).
/// Weights sum to the total measure (4 pi or 2 pi).
struct SphereRule {
    std::vector<Point> nodes;
    std::vector<double> weights;
};
SphereRule sphere_rule(int dim, int resolution);

}  // namespace gaugelab
