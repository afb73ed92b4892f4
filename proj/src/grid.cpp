#include "gaugelab/grid.hpp"

#include <algorithm>

namespace gaugelab {

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace {

std::vector<unsigned> build_basis(int dim, int p) {
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == p) {
            tuples.push_back(cur);
            return;
        }
        for (int i = start; i < dim; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    std::vector<unsigned> masks;
    for (const auto& t : tuples) {
        unsigned m = 0;
        for (int i : t) m |= 1u << i;
        masks.push_back(m);
    }
    return masks;
}

struct BasisTable {
    std::array<std::array<std::vector<unsigned>, 4>, 4> basis;
    std::array<std::array<int, 8>, 4> slot{};
    BasisTable() {
        for (int dim = 2; dim <= 3; ++dim) {
            slot[dim].fill(-1);
            for (int p = 0; p <= dim; ++p) {
                basis[dim][p] = build_basis(dim, p);
                for (std::size_t i = 0; i < basis[dim][p].size(); ++i) slot[dim][basis[dim][p][i]] = static_cast<int>(i);
            }
        }
    }
};

const BasisTable& table() {
    static const BasisTable t;
    return t;
}

}  // namespace

const std::vector<unsigned>& form_basis(int dim, int p) { return table().basis[dim][p]; }

int component_of(int dim, unsigned mask) { return table().slot[dim][mask]; }

std::vector<int> mask_indices(unsigned mask) {
    std::vector<int> out;
    for (int i = 0; i < 3; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

double hodge_sign(int dim, unsigned mask) {
    std::vector<int> perm = mask_indices(mask);
    for (int i = 0; i < dim; ++i)
        if (!(mask & (1u << i))) perm.push_back(i);
    int inversions = 0;
    for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
            if (perm[a] > perm[b]) ++inversions;
    return inversions % 2 ? -1.0 : 1.0;
}

ScalarField sample_scalar(const Grid& g, const std::function<double(const Point&)>& f) {
    ScalarField out(g, 0);
    for (std::size_t s = 0; s < g.sites(); ++s) out.at(s, 0) = f(g.position(s));
    return out;
}

double ball_integral(const ScalarField& f, const BallRegion& b) {
    const Grid& g = f.grid;
    if (b.r > g.L / 4 + 1e-12) throw GridError("ball radius exceeds L/4");
    double acc = 0.0;
    for (std::size_t s = 0; s < g.sites(); ++s)
        if (g.distance(g.position(s), b.center) <= b.r) acc += f.at(s, 0);
    return acc * std::pow(g.h(), g.dim);
}

double shell_integral(const ScalarField& f, const Point& center, double r, double thickness) {
    const Grid& g = f.grid;
    const double t = thickness > 0 ? thickness : 2.0 * g.h();
    if (r + t / 2 > g.L / 4 + t) throw GridError("shell radius exceeds L/4");
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double d = g.distance(g.position(s), center);
        if (d > r - t / 2 && d <= r + t / 2) {
            acc += f.at(s, 0);
            ++count;
        }
    }
    if (count == 0) throw GridError("empty shell");
    return acc * std::pow(g.h(), g.dim) / t;
}

ScalarField regularized_delta(const Grid& g, const Point& p, double eps) {
    ScalarField d(g, 0);
    std::size_t count = 0;
    for (std::size_t s = 0; s < g.sites(); ++s)
        if (g.distance(g.position(s), p) <= eps) ++count;
    if (count == 0) throw GridError("regularized delta: empty ball");
    const double v = static_cast<double>(count) * std::pow(g.h(), g.dim);
    for (std::size_t s = 0; s < g.sites(); ++s)
        if (g.distance(g.position(s), p) <= eps) d.at(s, 0) = 1.0 / v;
    return d;
}

ScalarField greens_regularized(const Grid& g, const Point& p, double eps, SolveStats* stats) {
    if (g.dim != 3) throw GridError("greens_regularized needs dim 3");
    if (!(eps > g.h() && eps < g.L / 8)) throw GridError("greens_regularized: eps must lie in (h, L/8)");
    return solve_helmholtz(regularized_delta(g, p, eps), 1.0, stats);
}

double greens_profile(double r) { return 1.0 / (4.0 * std::numbers::pi * r); }

GreensFit fit_greens_profile(const ScalarField& f, const Point& p, double eps) {
    const Grid& g = f.grid;
    std::vector<std::pair<double, double>> samples;  // (r, f - profile)
    std::vector<double> values;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double r = g.distance(g.position(s), p);
        if (r >= eps && r <= 4 * eps) {
            samples.emplace_back(r, f.at(s, 0) - greens_profile(r));
            values.push_back(f.at(s, 0));
        }
    }
    GreensFit fit;
    if (samples.empty()) return fit;
    double mean = 0.0;
    for (const auto& [r, d] : samples) mean += d;
    mean /= static_cast<double>(samples.size());
    fit.constant = mean;
    double best_gap = 1e300;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [r, d] = samples[i];
        const double rel = std::abs(d - mean) / std::abs(values[i]);
        fit.max_relative_error = std::max(fit.max_relative_error, rel);
        const double gap = std::abs(r - 2 * eps);
        if (gap < best_gap - 1e-12) {
            best_gap = gap;
            fit.relative_error_at_2eps = rel;
        } else if (std::abs(gap - best_gap) <= 1e-12) {
            fit.relative_error_at_2eps = std::max(fit.relative_error_at_2eps, rel);
        }
    }
    return fit;
}

double interpolate(const ScalarField& f, const Point& x) {
    const Grid& g = f.grid;
    const double h = g.h();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        const double u = x[a] / h;
        const double fl = std::floor(u);
        base[a] = static_cast<int>(fl);
        frac[a] = u - fl;
    }
    double acc = 0.0;
    const int corners = 1 << g.dim;
    for (int q = 0; q < corners; ++q) {
        std::array<int, 3> c = base;
        double w = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            const int bit = (q >> a) & 1;
            c[a] += bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        acc += w * f.at(g.index(c), 0);
    }
    return acc;
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

}  // namespace

SphereRule sphere_rule(int dim, int resolution) {
    SphereRule rule;
    const double two_pi = 2.0 * std::numbers::pi;
    if (dim == 2) {
        const int m = std::max(8, 2 * resolution);
        for (int j = 0; j < m; ++j) {
            const double t = two_pi * (j + 0.5) / m;
            rule.nodes.push_back({std::cos(t), std::sin(t), 0.0});
            rule.weights.push_back(two_pi / m);
        }
        return rule;
    }
    const int nt = std::max(4, resolution);
    const int np = 2 * nt;
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    for (int i = 0; i < nt; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
        for (int j = 0; j < np; ++j) {
            const double ph = two_pi * (j + 0.5) / np;
            rule.nodes.push_back({st * std::cos(ph), st * std::sin(ph), x[i]});
            rule.weights.push_back(w[i] * two_pi / np);
        }
    }
    return rule;
}

}  // namespace gaugelab
