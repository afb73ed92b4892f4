#include "gaugelab/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace gaugelab {

GaugePair zero_pair(const Grid& g, double r) { return {Su2Form(g, 1), Su2Form(g, 1), r}; }

GaugeMap GaugeMap::identity(const Grid& g) { return {g, std::vector<Quat>(g.sites())}; }

GaugeMap GaugeMap::constant(const Grid& g, const Quat& q0) { return {g, std::vector<Quat>(g.sites(), q0.normalized())}; }

void GaugeMap::renormalize() {
    for (auto& v : q) v = v.normalized();
}

Su2Tensor::Su2Tensor(const Grid& g, int p) : grid(g), degree(p), ncomp(binomial(g.dim, p)) {
    data.assign(g.sites() * static_cast<std::size_t>(g.dim * ncomp), Su2{});
}

double norm_sq(const Su2Tensor& t) {
    double s = 0.0;
    for (const Su2& v : t.data) s += inner(v, v);
    return s * std::pow(t.grid.h(), t.grid.dim);
}

Su2Form bracket_wedge(const Su2Form& a, const Su2Form& w) {
    const Grid& g = w.grid;
    Su2Form out(g, w.degree + 1);
    const auto& outb = form_basis(g.dim, w.degree + 1);
    for (std::size_t J = 0; J < outb.size(); ++J) {
        for (int j : mask_indices(outb[J])) {
            const unsigned rest = outb[J] & ~(1u << j);
            const int src = component_of(g.dim, rest);
            const double sg = insertion_sign(rest, j);
            for (std::size_t s = 0; s < g.sites(); ++s)
                out.at(s, static_cast<int>(J)) += sg * bracket(a.at(s, j), w.at(s, src));
        }
    }
    return out;
}

Su2Form bracket_wedge_transpose(const Su2Form& a, const Su2Form& eta) {
    const Grid& g = eta.grid;
    Su2Form out(g, eta.degree - 1);
    const auto& outb = form_basis(g.dim, eta.degree - 1);
    for (std::size_t I = 0; I < outb.size(); ++I) {
        for (int j = 0; j < g.dim; ++j) {
            if (outb[I] & (1u << j)) continue;
            const int src = component_of(g.dim, outb[I] | (1u << j));
            const double sg = insertion_sign(outb[I], j);
            for (std::size_t s = 0; s < g.sites(); ++s)
                out.at(s, static_cast<int>(I)) -= sg * bracket(a.at(s, j), eta.at(s, src));
        }
    }
    return out;
}

Su2Form wedge_self(const Su2Form& alpha) {
    Su2Form w = bracket_wedge(alpha, alpha);
    w *= 0.5;
    return w;
}

Su2Form curvature(const Connection& a) {
    Su2Form F = extder(a);
    F.axpy(0.5, bracket_wedge(a, a));
    return F;
}

Su2Form cov_d(const Connection& a, const Su2Form& w) { return extder(w) + bracket_wedge(a, w); }

Su2Form cov_dstar(const Connection& a, const Su2Form& w) { return coder(w) + bracket_wedge_transpose(a, w); }

Su2Tensor cov_grad(const Connection& a, const Su2Form& w) {
    const Grid& g = w.grid;
    Su2Tensor t(g, w.degree);
    const double ih = 1.0 / g.h();
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int j = 0; j < g.dim; ++j) {
            const std::size_t sp = g.shift(s, j, +1);
            for (int c = 0; c < w.ncomp; ++c)
                t.at(s, j, c) = ih * (w.at(sp, c) - w.at(s, c)) + bracket(a.at(s, j), w.at(s, c));
        }
    return t;
}

Su2Form cov_grad_adjoint(const Connection& a, const Su2Tensor& t) {
    const Grid& g = t.grid;
    Su2Form out(g, t.degree);
    const double ih = 1.0 / g.h();
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int j = 0; j < g.dim; ++j) {
            const std::size_t sm = g.shift(s, j, -1);
            for (int c = 0; c < t.ncomp; ++c)
                out.at(s, c) -= ih * (t.at(s, j, c) - t.at(sm, j, c)) + bracket(a.at(s, j), t.at(s, j, c));
        }
    return out;
}

double big_f(const GaugePair& P) {
    const Su2Form flat = curvature(P.a) - wedge_self(P.alpha);
    return norm_sq(flat) + norm_sq(cov_d(P.a, P.alpha)) + norm_sq(cov_dstar(P.a, P.alpha));
}

double big_f_scaled(const GaugePair& P) {
    Su2Form flat = curvature(P.a);
    flat *= 1.0 / P.r;
    flat.axpy(-P.r, wedge_self(P.alpha));
    return norm_sq(flat) + norm_sq(cov_d(P.a, P.alpha)) + norm_sq(cov_dstar(P.a, P.alpha));
}

ScalarField big_f_density(const GaugePair& P) {
    const ScalarField a = pointwise_norm_sq(curvature(P.a) - wedge_self(P.alpha));
    const ScalarField b = pointwise_norm_sq(cov_d(P.a, P.alpha));
    const ScalarField c = pointwise_norm_sq(cov_dstar(P.a, P.alpha));
    ScalarField out = a;
    out += b;
    out += c;
    return out;
}

namespace {

/// F_jk with antisymmetric extension.
Su2 two_form_entry(const Su2Form& F, std::size_t s, int j, int k) {
    if (j == k) return {};
    const int dim = F.grid.dim;
    if (j < k) return F.at(s, component_of(dim, (1u << j) | (1u << k)));
    return -F.at(s, component_of(dim, (1u << j) | (1u << k)));
}

}  // namespace

Su2Form apply_ricci(const RicciField& ric, const Su2Form& a) {
    Su2Form out(a.grid, 1);
    if (ric.is_zero()) return out;
    const int dim = a.grid.dim;
    for (std::size_t s = 0; s < a.sites(); ++s)
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j) out.at(s, k) += ric.values[s][k * dim + j] * a.at(s, j);
    return out;
}

Su2Form q_a(const Connection& A, const Su2Form& a, const RicciField& ric) {
    Su2Form out = cov_grad_adjoint(A, cov_grad(A, a));
    const Su2Form F = curvature(A);
    const int dim = a.grid.dim;
    for (std::size_t s = 0; s < a.sites(); ++s)
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j)
                if (j != k) out.at(s, k) += bracket(two_form_entry(F, s, j, k), a.at(s, j));
    if (!ric.is_zero()) out += apply_ricci(ric, a);
    return out;
}

Su2Form covariant_hodge_laplacian(const Connection& A, const Su2Form& a) {
    Su2Form out(a.grid, a.degree);
    if (a.degree < a.grid.dim) out += cov_dstar(A, cov_d(A, a));
    if (a.degree > 0) out += cov_d(A, cov_dstar(A, a));
    return out;
}

std::vector<std::array<double, 9>> outer_tensor(const Su2Form& a) {
    const int dim = a.grid.dim;
    std::vector<std::array<double, 9>> out(a.sites());
    for (std::size_t s = 0; s < a.sites(); ++s) {
        out[s].fill(0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out[s][i * dim + j] = inner(a.at(s, i), a.at(s, j));
    }
    return out;
}

BochnerTerms bochner_terms(const GaugePair& P, const ScalarField& f, const RicciField& ric) {
    const Grid& g = P.alpha.grid;
    const int dim = g.dim;
    const double r = P.r;
    const Su2Form& a = P.alpha;
    const Su2Form F = curvature(P.a);
    const Su2Form aa = wedge_self(a);
    const Su2Form da = cov_d(P.a, a);
    const Su2Form dsa = cov_dstar(P.a, a);
    const Su2Tensor grad = cov_grad(P.a, a);
    const ScalarField df = extder(f);
    const ScalarField lap_f = coder(df);
    const double vol = std::pow(g.h(), dim);

    BochnerTerms t;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double fs = f.at(s, 0);
        double l = 0.0, rhs = 0.0;
        double da2 = 0.0, flat2 = 0.0, aa2 = 0.0, F2 = 0.0, a2 = 0.0, grad2 = 0.0;
        for (int c = 0; c < da.ncomp; ++c) {
            da2 += norm_sq(da.at(s, c));
            const Su2 fl = (1.0 / r) * F.at(s, c) - r * aa.at(s, c);
            flat2 += norm_sq(fl);
            aa2 += norm_sq(aa.at(s, c));
            F2 += norm_sq(F.at(s, c));
        }
        const double ds2 = norm_sq(dsa.at(s, 0));
        for (int j = 0; j < dim; ++j) {
            a2 += norm_sq(a.at(s, j));
            for (int c = 0; c < dim; ++c) grad2 += norm_sq(grad.at(s, j, c));
        }
        l = fs * (da2 + ds2 + flat2);
        rhs = 0.5 * lap_f.at(s, 0) * a2 + fs * (grad2 + r * r * aa2 + F2 / (r * r));
        if (!ric.is_zero())
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) rhs += fs * ric.values[s][i * dim + j] * inner(a.at(s, i), a.at(s, j));
        for (int i = 0; i < dim; ++i) {
            const double dif = df.at(s, i);
            for (int j = 0; j < dim; ++j)
                if (i != j) rhs -= dif * inner(a.at(s, j), two_form_entry(da, s, i, j));
            rhs += dif * inner(a.at(s, i), dsa.at(s, 0));
        }
        t.lhs += l;
        t.rhs += rhs;
    }
    t.lhs *= vol;
    t.rhs *= vol;
    return t;
}

double bochner_residual(const GaugePair& P, const ScalarField& f, const RicciField& ric) {
    return bochner_terms(P, f, ric).residual();
}

Su2Form adjoint_apply(const GaugeMap& g, const Su2Form& w) {
    Su2Form out(w.grid, w.degree);
    for (std::size_t s = 0; s < w.sites(); ++s)
        for (int c = 0; c < w.ncomp; ++c) out.at(s, c) = adjoint(g.q[s], w.at(s, c));
    return out;
}

GaugePair gauge_apply(const GaugeMap& g, const GaugePair& P) {
    const Grid& gr = P.a.grid;
    GaugePair out{Su2Form(gr, 1), adjoint_apply(g, P.alpha), P.r};
    const double h = gr.h();
    for (std::size_t s = 0; s < gr.sites(); ++s)
        for (int j = 0; j < gr.dim; ++j) {
            const std::size_t sp = gr.shift(s, j, +1);
            const Quat link = exp_su2(h * P.a.at(s, j));
            out.a.at(s, j) = (1.0 / h) * log_su2(g.q[s] * link * g.q[sp].conj());
        }
    return out;
}

GaugeDrift gauge_drift(const GaugeMap& g, const GaugePair& P) {
    const ScalarField f0 = big_f_density(P);
    const ScalarField f1 = big_f_density(gauge_apply(g, P));
    GaugeDrift out;
    out.reference = integrate(f0);
    double l1 = 0.0;
    for (std::size_t s = 0; s < f0.sites(); ++s) l1 += std::abs(f1.at(s, 0) - f0.at(s, 0));
    l1 *= std::pow(g.grid.h(), g.grid.dim);
    if (out.reference > 0) {
        out.integrated = std::abs(integrate(f1) - out.reference) / out.reference;
        out.density = l1 / out.reference;
    }
    return out;
}

Connection pure_gauge(const GaugeMap& g) { return gauge_apply(g, zero_pair(g.grid)).a; }

CoulombResult coulomb_fix(const GaugePair& P, double tol, int max_iter) {
    const Grid& gr = P.a.grid;
    CoulombResult res{GaugeMap::identity(gr), P, 0.0, 0.0, 0, false};
    const double a0 = norm(P.a);
    auto ratio_of = [](const GaugePair& Q) {
        const double na = norm(Q.a);
        return na > 0 ? norm(coder(Q.a)) / na : 0.0;
    };
    double current = norm_sq(res.pair.a);
    for (int it = 0; it <= max_iter; ++it) {
        const double na = std::sqrt(current);
        res.coclosure_ratio = ratio_of(res.pair);
        res.iterations = it;
        if (na <= 1e-14 * a0 || a0 == 0.0) {
            // Gauge-equivalent to zero: the quotient by ||a|| is roundoff over roundoff.
            res.coclosure_ratio = a0 > 0 ? norm(coder(res.pair.a)) / a0 : 0.0;
            res.converged = true;
            break;
        }
        if (res.coclosure_ratio <= tol) {
            res.converged = true;
            break;
        }
        if (it == max_iter) break;
        const Su2Form xi = solve_poisson_mean_free(coder(res.pair.a));
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            GaugeMap trial = res.g;
            for (std::size_t s = 0; s < gr.sites(); ++s) trial.q[s] = exp_su2(step * xi.at(s, 0)) * trial.q[s];
            trial.renormalize();
            GaugePair cand = gauge_apply(trial, P);
            const double val = norm_sq(cand.a);
            // Near the minimum the objective moves at roundoff level; then the coclosure norm decides.
            const bool flat_step = val <= current * (1.0 + 1e-12) &&
                                   norm(coder(cand.a)) < res.coclosure_ratio * std::sqrt(current);
            if (val < current || flat_step) {
                res.g = std::move(trial);
                res.pair = std::move(cand);
                current = val;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.coclosure_ratio = ratio_of(res.pair);
            res.converged = res.coclosure_ratio <= tol;
            break;
        }
    }
    if (!res.converged)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "coulomb_fix stalled after %d iterations at coclosure ratio %.3e", res.iterations,
                      res.coclosure_ratio);
        throw CoulombError(buf);
    }
    const double Fn = norm(curvature(res.pair.a));
    const Su2Tensor grad = cov_grad(Su2Form(gr, 1), res.pair.a);
    const double l21 = std::sqrt(norm_sq(res.pair.a) + norm_sq(grad));
    res.kappa_ratio = Fn > 0 ? l21 / Fn : 0.0;
    return res;
}

double r_diamond(const Connection& A, const Point& p, double kappa_u) {
    if (!(kappa_u > 0)) throw GridError("r_diamond needs kappa_u > 0");
    const Grid& g = A.grid;
    const ScalarField F2 = pointwise_norm_sq(curvature(A));
    auto excess = [&](double r) { return ball_integral(F2, {p, r}) - 0.01 / (kappa_u * kappa_u * r); };
    double lo = 4 * g.h(), hi = g.L / 4;
    if (excess(hi) <= 0) return hi;
    if (excess(lo) > 0) return lo;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) <= 0) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace gaugelab
