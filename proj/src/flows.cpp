#include "gaugelab/flows.hpp"

#include <cmath>

namespace gaugelab {

double heat_energy(const Connection& A, const Su2Form& a) {
    return 0.5 * (norm_sq(cov_d(A, a)) + norm_sq(cov_dstar(A, a)));
}

double heat_dt_limit(const Grid& g) { return g.h() * g.h() / (2.0 * g.dim); }

namespace {

HistoryRow heat_row(const FlowState& S) {
    const Connection& A = S.pair.a;
    const Su2Form& a = S.pair.alpha;
    const Su2Form da = cov_d(A, a);
    const Su2Form dsa = cov_dstar(A, a);
    const Su2Form q = cov_dstar(A, da) + cov_d(A, dsa);
    HistoryRow row;
    row.t = S.t;
    row.norm_a_sq = norm_sq(a);
    row.energy = 0.5 * (norm_sq(da) + norm_sq(dsa));
    row.q_norm_sq = norm_sq(q);
    row.coclosure_energy = norm_sq(dsa);
    return row;
}

}  // namespace

FlowState heat_start(const Connection& A, const Su2Form& a0, double dt) {
    const Grid& g = a0.grid;
    FlowState S{{A, a0, 1.0}, 0.0, dt > 0 ? dt : g.h() * g.h() / 8.0, {}, 0.0};
    if (S.dt > heat_dt_limit(g) * (1 + 1e-12)) throw FlowError("heat flow dt exceeds h^2/(2 dim)");
    S.history.push_back(heat_row(S));
    return S;
}

void heat_step(FlowState& S) {
    const Connection& A = S.pair.a;
    Su2Form& a = S.pair.alpha;
    const Su2Form q = covariant_hodge_laplacian(A, a);
    const double before = norm_sq(a);
    Su2Form next = a;
    next.axpy(-S.dt, q);
    if (norm_sq(next) > before * (1 + 1e-12) + 1e-300) throw FlowError("heat step rejected: ||a|| increased");
    S.q_integral += S.dt * S.history.back().q_norm_sq;
    a = std::move(next);
    S.t += S.dt;
    S.history.push_back(heat_row(S));
}

FlowState run_heat(const Connection& A, const Su2Form& a0, double T, double dt) {
    FlowState S = heat_start(A, a0, dt);
    const double base = S.dt;
    while (S.t < T - 1e-12 * T) {
        S.dt = std::min(base, T - S.t);
        heat_step(S);
    }
    S.dt = base;
    return S;
}

StoppingResult stopping_time(const Connection& A, const Su2Form& a0, double t_target, double dt) {
    if (!(t_target > 0)) throw FlowError("stopping_time needs t_target > 0");
    FlowState S = heat_start(A, a0, dt);
    StoppingResult res;
    res.bound = S.history.front().energy / t_target;
    const double base = S.dt;
    while (S.t < t_target - 1e-12 * t_target) {
        S.dt = std::min(base, t_target - S.t);
        heat_step(S);
        const HistoryRow& row = S.history.back();
        if (row.q_norm_sq <= res.bound) {
            res.s = S.t;
            res.a_s = S.pair.alpha;
            res.q_norm_sq = row.q_norm_sq;
            res.n_s = S.n_of_t();
            res.displacement_sq = norm_sq(S.pair.alpha - a0);
            res.displacement_ok = res.displacement_sq <= res.s * res.s * res.n_s * (1 + 1e-12) + 1e-300;
            return res;
        }
    }
    throw FlowError("stopping_time: no sample met the bound");
}

BallDomain BallDomain::make(const Grid& g, const Point& center, double radius) {
    BallDomain D;
    D.interior.assign(g.sites(), 0);
    D.collar.assign(g.sites(), 0);
    for (std::size_t s = 0; s < g.sites(); ++s)
        if (g.distance(g.position(s), center) < radius) D.interior[s] = 1;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        if (!D.interior[s]) continue;
        for (int j = 0; j < g.dim; ++j)
            for (int dir : {-1, 1}) {
                const std::size_t nb = g.shift(s, j, dir);
                if (!D.interior[nb]) D.collar[nb] = 1;
            }
    }
    return D;
}

double ball_energy(const Connection& A, const Su2Form& a, const BallDomain& D) {
    const ScalarField e1 = pointwise_norm_sq(cov_d(A, a));
    const ScalarField e2 = pointwise_norm_sq(cov_dstar(A, a));
    double acc = 0.0;
    for (std::size_t s = 0; s < a.sites(); ++s)
        if (D.interior[s] || D.collar[s]) acc += e1.at(s, 0) + e2.at(s, 0);
    return acc * std::pow(a.grid.h(), a.grid.dim);
}

namespace {

HistoryRow ball_row(const FlowState& S, const BallDomain& D) {
    const Connection& A = S.pair.a;
    const Su2Form& a = S.pair.alpha;
    const Su2Form q = covariant_hodge_laplacian(A, a);
    const double vol = std::pow(a.grid.h(), a.grid.dim);
    HistoryRow row;
    row.t = S.t;
    row.energy = ball_energy(A, a, D);
    const Su2Form dsa = cov_dstar(A, a);
    for (std::size_t s = 0; s < a.sites(); ++s) {
        if (!D.interior[s]) continue;
        for (int c = 0; c < a.ncomp; ++c) {
            row.norm_a_sq += norm_sq(a.at(s, c)) * vol;
            row.q_norm_sq += norm_sq(q.at(s, c)) * vol;
        }
        row.coclosure_energy += norm_sq(dsa.at(s, 0)) * vol;
    }
    return row;
}

}  // namespace

FlowState dirichlet_heat_start(const Connection& A, const Su2Form& a0, const BallDomain& D, double dt) {
    const Grid& g = a0.grid;
    FlowState S{{A, a0, 1.0}, 0.0, dt > 0 ? dt : g.h() * g.h() / 8.0, {}, 0.0};
    if (S.dt > heat_dt_limit(g) * (1 + 1e-12)) throw FlowError("heat flow dt exceeds h^2/(2 dim)");
    S.history.push_back(ball_row(S, D));
    return S;
}

void dirichlet_heat_step(FlowState& S, const BallDomain& D) {
    const Connection& A = S.pair.a;
    Su2Form& a = S.pair.alpha;
    const Su2Form q = covariant_hodge_laplacian(A, a);
    const double before = S.history.back().energy;
    Su2Form next = a;
    for (std::size_t s = 0; s < a.sites(); ++s)
        if (D.interior[s])
            for (int c = 0; c < a.ncomp; ++c) next.at(s, c) -= S.dt * q.at(s, c);
    const double after = ball_energy(A, next, D);
    if (after > before + 1e-10 * std::abs(before)) throw FlowError("Dirichlet heat step rejected: energy increased");
    S.q_integral += S.dt * S.history.back().q_norm_sq;
    a = std::move(next);
    S.t += S.dt;
    S.history.push_back(ball_row(S, D));
}

// ---- Chern-Simons ----------------------------------------------------------------

Su2CForm complexify(const GaugePair& P) {
    Su2CForm out(P.a.grid, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = Su2C(P.a.data[i], P.alpha.data[i]);
    return out;
}

namespace {

void require_3d(const Grid& g) {
    if (g.dim != 3) throw FlowError("Chern-Simons flows need dim 3");
}

/// (S w)_i(y) = w_i(y - e_i).
Su2CForm back_shift(const Su2CForm& w) {
    const Grid& g = w.grid;
    Su2CForm out(g, 1);
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int i = 0; i < 3; ++i) out.at(s, i) = w.at(g.shift(s, i, -1), i);
    return out;
}

}  // namespace

CsValue cs(const GaugePair& P) {
    const Grid& g = P.a.grid;
    require_3d(g);
    const Su2CForm A = complexify(P);
    const Su2CForm curlA = hodge(extder(A));
    std::complex<double> quad = 0.0, cubic = 0.0;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        for (int i = 0; i < 3; ++i) quad += complex_trace_pair(A.at(s, i), curlA.at(g.shift(s, i, +1), i));
        cubic += complex_trace_pair(A.at(s, 0), bracket(A.at(s, 1), A.at(s, 2)));
    }
    const std::complex<double> v = std::pow(g.h(), 3) * (0.5 * quad + cubic);
    return {v.real(), v.imag()};
}

Su2CForm cs_gradient(const GaugePair& P) {
    const Grid& g = P.a.grid;
    require_3d(g);
    const Su2CForm A = complexify(P);
    const Su2CForm curlA = hodge(extder(A));
    const Su2CForm transposed = coder(hodge(back_shift(A)));
    Su2CForm G(g, 1);
    for (std::size_t s = 0; s < g.sites(); ++s)
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            G.at(s, i) = 0.5 * (curlA.at(g.shift(s, i, +1), i) + transposed.at(s, i)) + bracket(A.at(s, j), A.at(s, k));
        }
    return G;
}

GaugePair cs_gradient_velocity(const GaugePair& P) {
    const Su2CForm G = cs_gradient(P);
    GaugePair V{Su2Form(P.a.grid, 1), Su2Form(P.a.grid, 1), P.r};
    for (std::size_t i = 0; i < G.data.size(); ++i) {
        V.a.data[i] = G.data[i].re;
        V.alpha.data[i] = -G.data[i].im;
    }
    return V;
}

GaugePair cs_hamiltonian_velocity(const GaugePair& P) {
    const Su2CForm G = cs_gradient(P);
    GaugePair V{Su2Form(P.a.grid, 1), Su2Form(P.a.grid, 1), P.r};
    for (std::size_t i = 0; i < G.data.size(); ++i) {
        V.a.data[i] = G.data[i].im;
        V.alpha.data[i] = G.data[i].re;
    }
    return V;
}

double cs_default_dt(const Grid& g) { return g.h() / 8.0; }

Su2Form coclosure_constraint(const GaugePair& P, const GaugePair& V) {
    Su2Form out = cov_dstar(P.a, V.alpha);
    for (std::size_t s = 0; s < out.sites(); ++s)
        for (int j = 0; j < P.a.grid.dim; ++j) out.at(s, 0) += bracket(P.alpha.at(s, j), V.a.at(s, j));
    return out;
}

namespace {

/// Transpose of coclosure_constraint: w -> ([w, alpha], d_A w).
GaugePair constraint_transpose(const GaugePair& P, const Su2Form& w) {
    GaugePair out{Su2Form(P.a.grid, 1), cov_d(P.a, w), P.r};
    for (std::size_t s = 0; s < w.sites(); ++s)
        for (int j = 0; j < P.a.grid.dim; ++j) out.a.at(s, j) = bracket(w.at(s, 0), P.alpha.at(s, j));
    return out;
}

}  // namespace

GaugePair project_coclosure(const GaugePair& P, const GaugePair& V) {
    const Su2Form rhs = coclosure_constraint(P, V);
    if (norm(rhs) == 0.0) return V;
    auto op = [&P](const Su2Form& w) { return coclosure_constraint(P, constraint_transpose(P, w)); };
    const Su2Form w = conjugate_gradient(op, rhs, 1e-12, default_max_iter(P.a.grid));
    const GaugePair c = constraint_transpose(P, w);
    return {V.a - c.a, V.alpha - c.alpha, V.r};
}

GaugePair cs_velocity(const GaugePair& P, CsFlowKind kind, bool preserve_coclosure) {
    GaugePair V = kind == CsFlowKind::gradient ? cs_gradient_velocity(P) : cs_hamiltonian_velocity(P);
    return preserve_coclosure ? project_coclosure(P, V) : V;
}

namespace {

double pair_norm_sq(const GaugePair& P) { return norm_sq(P.a) + norm_sq(P.alpha); }

HistoryRow cs_row(const FlowState& S, CsFlowKind kind, const CsOptions& opt) {
    const GaugePair& P = S.pair;
    HistoryRow row;
    row.t = S.t;
    row.norm_a_sq = norm_sq(P.alpha);
    row.energy = big_f(P);
    row.q_norm_sq = pair_norm_sq(cs_velocity(P, kind, opt.preserve_coclosure));
    const CsValue v = cs(P);
    row.re_cs = v.re;
    row.im_cs = v.im;
    row.coclosure_energy = norm_sq(cov_dstar(P.a, P.alpha));
    return row;
}

void axpy_pair(GaugePair& P, double s, const GaugePair& V) {
    P.a.axpy(s, V.a);
    P.alpha.axpy(s, V.alpha);
}

}  // namespace

FlowState cs_start(const GaugePair& P, CsFlowKind kind, double dt, const CsOptions& opt) {
    require_3d(P.a.grid);
    FlowState S{P, 0.0, dt > 0 ? dt : cs_default_dt(P.a.grid), {}, 0.0};
    S.history.push_back(cs_row(S, kind, opt));
    return S;
}

void cs_step(FlowState& S, CsFlowKind kind, const CsOptions& opt) {
    auto vel = [&](const GaugePair& P) { return cs_velocity(P, kind, opt.preserve_coclosure); };
    const double before = pair_norm_sq(S.pair);
    const double dt = S.dt;
    GaugePair next = S.pair;
    if (opt.integrator == Integrator::euler) {
        axpy_pair(next, dt, vel(S.pair));
    } else {
        const GaugePair k1 = vel(S.pair);
        GaugePair tmp = S.pair;
        axpy_pair(tmp, dt / 2, k1);
        const GaugePair k2 = vel(tmp);
        tmp = S.pair;
        axpy_pair(tmp, dt / 2, k2);
        const GaugePair k3 = vel(tmp);
        tmp = S.pair;
        axpy_pair(tmp, dt, k3);
        const GaugePair k4 = vel(tmp);
        axpy_pair(next, dt / 6, k1);
        axpy_pair(next, dt / 3, k2);
        axpy_pair(next, dt / 3, k3);
        axpy_pair(next, dt / 6, k4);
    }
    if (before > 0 && !(pair_norm_sq(next) <= 100.0 * before))
        throw FlowError("Chern-Simons step rejected: norm grew more than tenfold");
    S.q_integral += dt * S.history.back().q_norm_sq;
    S.pair = std::move(next);
    S.t += dt;
    S.history.push_back(cs_row(S, kind, opt));
}

void cs_gradient_step(FlowState& S, const CsOptions& opt) { cs_step(S, CsFlowKind::gradient, opt); }

void cs_hamiltonian_step(FlowState& S, const CsOptions& opt) { cs_step(S, CsFlowKind::hamiltonian, opt); }

FlowState run_cs(const GaugePair& P, CsFlowKind kind, double T, double dt, const CsOptions& opt) {
    FlowState S = cs_start(P, kind, dt, opt);
    const double base = S.dt;
    while (S.t < T - 1e-12 * T) {
        S.dt = std::min(base, T - S.t);
        cs_step(S, kind, opt);
    }
    S.dt = base;
    return S;
}

}  // namespace gaugelab
