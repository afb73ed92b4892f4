#include "gaugelab/lm_op.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaugelab {

namespace {

double unit_defect(const std::array<double, 3>& v) { return std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0); }

Su2 remove_tau(const Su2& x, const Su2& tau) { return x - (inner(tau, x) / inner(tau, tau)) * tau; }

void project_form(Su2Form& f, const Su2& tau) {
    for (Su2& v : f.data) v = remove_tau(v, tau);
}

VBlock add(VBlock x, const VBlock& y, double s) {
    x.a.axpy(s, y.a);
    x.a0.axpy(s, y.a0);
    return x;
}

double block_pairing(const VBlock& x, const VBlock& y) { return pairing(x.a, y.a) + pairing(x.a0, y.a0); }

template <class F>
double worst_over_trials(const Grid& g, const LmParams& p, int trials, std::uint64_t seed, F f) {
    validate(g, p);
    if (trials < 1) throw LmError("need at least one trial");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) worst = std::max(worst, f(seed + 1000003ULL * static_cast<std::uint64_t>(t)));
    return worst;
}

}  // namespace

void validate(const Grid& g, const LmParams& p) {
    if (g.dim != 3) throw LmError("L_m is defined on 3-dimensional grids");
    if (!(p.m > 0)) throw LmError("L_m needs m > 0");
    if (unit_defect(p.e) > 1e-9) throw LmError("e must be a unit vector");
    if (unit_defect(p.tau.c) > 1e-9) throw LmError("tau must have unit coefficient vector");
}

VPair zero_vpair(const Grid& g) {
    return {{Su2Form(g, 1), Su2Form(g, 0)}, {Su2Form(g, 1), Su2Form(g, 0)}};
}

void project(VPair& k, const Su2& tau) {
    for (VBlock* b : {&k.first, &k.second}) {
        project_form(b->a, tau);
        project_form(b->a0, tau);
    }
}

double max_tau_component(const VPair& k, const Su2& tau) {
    double worst = 0.0;
    const double tn = norm(tau);
    for (const VBlock* b : {&k.first, &k.second})
        for (const Su2Form* f : {&b->a, &b->a0})
            for (const Su2& v : f->data) worst = std::max(worst, std::abs(inner(tau, v)) / tn);
    return worst;
}

double pairing(const VPair& j, const VPair& k) { return block_pairing(j.first, k.first) + block_pairing(j.second, k.second); }

double norm_sq(const VPair& k) { return pairing(k, k); }

double grad_norm_sq(const VPair& k) {
    double acc = 0.0;
    for (const VBlock* b : {&k.first, &k.second})
        for (const Su2Form* f : {&b->a, &b->a0}) {
            const Grid& g = f->grid;
            const double ih = 1.0 / g.h();
            for (std::size_t s = 0; s < g.sites(); ++s)
                for (int j = 0; j < g.dim; ++j) {
                    const std::size_t sp = g.shift(s, j, +1);
                    for (int c = 0; c < f->ncomp; ++c) acc += norm_sq(ih * (f->at(sp, c) - f->at(s, c)));
                }
        }
    return acc * std::pow(k.first.a.grid.h(), k.first.a.grid.dim);
}

VBlock apply_d(const VBlock& b) {
    Su2Form curl = hodge(extder(b.a));
    curl += coder(hodge(b.a));
    curl *= 0.5;
    curl -= extder(b.a0);
    Su2Form div = coder(b.a);
    div *= -1.0;
    return {std::move(curl), std::move(div)};
}

VBlock apply_b(const VBlock& b, const std::array<double, 3>& e, const Su2& tau, bool printed_variant) {
    const Grid& g = b.a.grid;
    const double s1 = printed_variant ? -1.0 : 1.0;
    VBlock out{Su2Form(g, 1), Su2Form(g, 0)};
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const Su2 a[3] = {b.a.at(s, 0), b.a.at(s, 1), b.a.at(s, 2)};
        const Su2 a0 = b.a0.at(s, 0);
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            const Su2 v = s1 * (e[j] * a[k] - e[k] * a[j]) + e[i] * a0;
            out.a.at(s, i) = bracket(tau, v);
        }
        const Su2 ea = e[0] * a[0] + e[1] * a[1] + e[2] * a[2];
        out.a0.at(s, 0) = -bracket(tau, ea);
    }
    return out;
}

VPair apply_lm(const VPair& k, const LmParams& p) {
    validate(k.first.a.grid, p);
    VPair out;
    out.first = add(apply_d(k.first), apply_b(k.second, p.e, p.tau, p.printed_variant), p.m);
    VBlock b1 = apply_b(k.first, p.e, p.tau, p.printed_variant);
    b1.a *= p.m;
    b1.a0 *= p.m;
    out.second = add(std::move(b1), apply_d(k.second), p.printed_variant ? 1.0 : -1.0);
    project(out, p.tau);
    return out;
}

VPair random_vpair(const Grid& g, std::uint64_t seed, const Su2& tau, const SmoothFieldSpec& spec) {
    VPair k{{random_smooth_form(g, 1, seed, spec), random_smooth_form(g, 0, seed + 1, spec)},
            {random_smooth_form(g, 1, seed + 2, spec), random_smooth_form(g, 0, seed + 3, spec)}};
    project(k, tau);
    return k;
}

double square_identity_defect(const Grid& g, const LmParams& p, int trials, std::uint64_t seed, const SmoothFieldSpec& spec) {
    return worst_over_trials(g, p, trials, seed, [&](std::uint64_t s) {
        const VPair k = random_vpair(g, s, p.tau, spec);
        const double lk = norm_sq(apply_lm(k, p));
        if (lk == 0.0) return 0.0;
        return std::abs(lk - grad_norm_sq(k) - p.m * p.m * norm_sq(k)) / lk;
    });
}

double symmetry_defect(const Grid& g, const LmParams& p, int trials, std::uint64_t seed, const SmoothFieldSpec& spec) {
    return worst_over_trials(g, p, trials, seed, [&](std::uint64_t s) {
        const VPair j = random_vpair(g, s, p.tau, spec);
        const VPair k = random_vpair(g, s + 500009ULL, p.tau, spec);
        const VPair lj = apply_lm(j, p), lk = apply_lm(k, p);
        const double scale = std::sqrt(norm_sq(lj) * norm_sq(k)) + std::sqrt(norm_sq(j) * norm_sq(lk));
        if (scale == 0.0) return 0.0;
        return std::abs(pairing(lj, k) - pairing(j, lk)) / scale;
    });
}

double greens_massive(const Point& y, double m, const Point& x) {
    const double r = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) + (x[2] - y[2]) * (x[2] - y[2]));
    if (r == 0.0) throw LmError("greens_massive: evaluation at the pole");
    return std::exp(-m * r) / (4.0 * std::numbers::pi * r);
}

double greens_massive_gradient(double m, double r) {
    if (!(r > 0)) throw LmError("greens_massive_gradient: needs r > 0");
    return greens_massive({0, 0, 0}, m, {r, 0, 0}) * (1.0 / r + m);
}

DecayReport decay_check(double m, double delta_min, double delta_max, int samples) {
    if (!(m > 0) || !(delta_min > 0) || !(delta_max > delta_min) || samples < 2)
        throw LmError("decay_check: needs m > 0 and 0 < delta_min < delta_max");
    auto f = [&](double d) { return greens_massive({0, 0, 0}, m, {d, 0, 0}) + greens_massive_gradient(m, d); };
    DecayReport rep;
    rep.constant = f(delta_min) * std::exp(0.5 * m * delta_min);
    for (int i = 0; i < samples; ++i) {
        const double d = delta_min + (delta_max - delta_min) * i / (samples - 1);
        rep.worst_ratio = std::max(rep.worst_ratio, f(d) / (rep.constant * std::exp(-0.5 * m * d)));
    }
    rep.ok = rep.worst_ratio <= 1.0 + 1e-12;
    return rep;
}

GreensResidual greens_discrete_residual(double m, int n, double L) {
    if (!(m > 0) || n < 16 || !(L > 0)) throw LmError("greens_discrete_residual: invalid parameters");
    const double h = L / n;
    const double rmin = 8 * h, rmax = L / 8;
    const int reach = static_cast<int>(std::ceil(rmax / h));
    const Point y{0, 0, 0};
    auto G = [&](int i, int j, int k) { return greens_massive(y, m, {i * h, j * h, k * h}); };
    double num = 0.0, den = 0.0;
    GreensResidual out;
    for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j)
            for (int k = -reach; k <= reach; ++k) {
                const double r = h * std::sqrt(double(i * i + j * j + k * k));
                if (r < rmin || r > rmax) continue;
                const double g0 = G(i, j, k);
                const double lap = (G(i + 1, j, k) + G(i - 1, j, k) + G(i, j + 1, k) + G(i, j - 1, k) + G(i, j, k + 1) +
                                    G(i, j, k - 1) - 6 * g0) / (h * h);
                const double res = -lap + m * m * g0;
                num += res * res;
                den += std::pow(m * m * g0, 2);
                ++out.points;
            }
    out.relative = std::sqrt(num / den);
    return out;
}

}  // namespace gaugelab
