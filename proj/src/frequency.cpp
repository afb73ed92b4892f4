#include "gaugelab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gaugelab {

std::vector<double> radii_between(double a, double b, int count) {
    if (count < 1) throw FrequencyError("radii_between: need at least one radius");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
    return out;
}

namespace {

constexpr int kMaxCorners = 8;

/// Reference-cell stiffness of the multilinear element, integral over [0,1]^dim of grad phi_p . grad phi_q.
std::array<std::array<double, kMaxCorners>, kMaxCorners> reference_stiffness(int dim) {
    std::array<std::array<double, kMaxCorners>, kMaxCorners> K{};
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    const int corners = 1 << dim;
    for (int qp = 0; qp < (1 << dim); ++qp) {
        std::array<double, 3> xi{};
        for (int a = 0; a < dim; ++a) xi[a] = gp[(qp >> a) & 1];
        const double w = std::pow(0.5, dim);
        std::array<std::array<double, 3>, kMaxCorners> grad{};
        for (int c = 0; c < corners; ++c)
            for (int a = 0; a < dim; ++a) {
                double v = 1.0;
                for (int b = 0; b < dim; ++b) {
                    const int bit = (c >> b) & 1;
                    if (b == a) v *= bit ? 1.0 : -1.0;
                    else v *= bit ? xi[b] : 1.0 - xi[b];
                }
                grad[c][a] = v;
            }
        for (int p = 0; p < corners; ++p)
            for (int q = 0; q < corners; ++q) {
                double d = 0.0;
                for (int a = 0; a < dim; ++a) d += grad[p][a] * grad[q][a];
                K[p][q] += w * d;
            }
    }
    return K;
}

double smooth_weight(double r, double d, double h) { return std::clamp(0.5 + (r - d) / h, 0.0, 1.0); }

/// Corner values of one cell as a list of real channels, each of length 2^dim.
using CellReader = std::function<void(const std::array<int, 3>& base, std::vector<std::array<double, kMaxCorners>>& out)>;

struct Domain {
    const Grid* g;
    bool periodic;
    Point p;
    Point offset(const Point& x) const {
        if (periodic) return g->displacement(x, p);
        return {x[0] - p[0], x[1] - p[1], x[2] - p[2]};
    }
    double dist(const Point& x) const {
        const Point d = offset(x);
        double acc = 0.0;
        for (int a = 0; a < g->dim; ++a) acc += d[a] * d[a];
        return std::sqrt(acc);
    }
    /// Inclusive range of lattice coordinates whose cells or sites can meet the ball of radius R.
    std::array<std::pair<int, int>, 3> box(double R, int cell_slack) const {
        std::array<std::pair<int, int>, 3> out{};
        const double h = g->h();
        for (int a = 0; a < 3; ++a) {
            if (a >= g->dim) {
                out[a] = {0, 0};
                continue;
            }
            int lo = static_cast<int>(std::floor((p[a] - R - h) / h)) - 1;
            int hi = static_cast<int>(std::ceil((p[a] + R + h) / h)) + 1;
            if (!periodic) {
                if (lo < 0 || hi + cell_slack > g->n - 1)
                    throw FrequencyError("profile: ball leaves the sampled domain");
            }
            out[a] = {lo, hi};
        }
        return out;
    }
};

/// Ball energies sum_cells w(r, |center - p|) * E_cell for every radius, with channel scale `scale`.
std::vector<double> q1_energies(const Domain& D, const std::vector<double>& radii, int channels, double scale,
                                const CellReader& read) {
    const Grid& g = *D.g;
    const double h = g.h();
    const auto K = reference_stiffness(g.dim);
    const int corners = 1 << g.dim;
    const double rmax = *std::max_element(radii.begin(), radii.end());
    const auto bx = D.box(rmax, 1);
    std::vector<double> out(radii.size(), 0.0);
    std::vector<std::array<double, kMaxCorners>> vals(channels);
    const double hscale = std::pow(h, g.dim - 2) * scale;
    for (int i = bx[0].first; i <= bx[0].second; ++i)
        for (int j = bx[1].first; j <= bx[1].second; ++j)
            for (int k = bx[2].first; k <= bx[2].second; ++k) {
                const std::array<int, 3> base{i, j, k};
                Point cc{0.0, 0.0, 0.0};
                for (int a = 0; a < g.dim; ++a) cc[a] = (base[a] + 0.5) * h;
                const double d = D.dist(cc);
                if (d > rmax + h) continue;
                read(base, vals);
                double e = 0.0;
                for (int ch = 0; ch < channels; ++ch)
                    for (int p = 0; p < corners; ++p)
                        for (int q = 0; q < corners; ++q) e += vals[ch][p] * K[p][q] * vals[ch][q];
                e *= hscale;
                for (std::size_t ri = 0; ri < radii.size(); ++ri) out[ri] += smooth_weight(radii[ri], d, h) * e;
            }
    return out;
}

/// Ball integrals of a site density with the same smooth edge.
std::vector<double> site_integrals(const Domain& D, const std::vector<double>& radii,
                                   const std::function<double(std::size_t)>& density) {
    const Grid& g = *D.g;
    const double h = g.h();
    const double rmax = *std::max_element(radii.begin(), radii.end());
    const auto bx = D.box(rmax, 0);
    std::vector<double> out(radii.size(), 0.0);
    for (int i = bx[0].first; i <= bx[0].second; ++i)
        for (int j = bx[1].first; j <= bx[1].second; ++j)
            for (int k = bx[2].first; k <= bx[2].second; ++k) {
                const std::array<int, 3> c{i, j, k};
                Point x{0.0, 0.0, 0.0};
                for (int a = 0; a < g.dim; ++a) x[a] = c[a] * h;
                const double d = D.dist(x);
                if (d > rmax + h) continue;
                const double f = density(g.index(c));
                for (std::size_t ri = 0; ri < radii.size(); ++ri) out[ri] += smooth_weight(radii[ri], d, h) * f;
            }
    for (double& v : out) v *= std::pow(h, g.dim);
    return out;
}

int sphere_resolution(const Grid& g, double r) { return std::max(16, static_cast<int>(std::ceil(2.0 * r / g.h()))); }

/// r^{dim-1} sum_i w_i f(p + r omega_i)
double sphere_integral(const Grid& g, const Point& p, double r, const std::function<double(const Point&)>& f) {
    const SphereRule rule = sphere_rule(g.dim, sphere_resolution(g, r));
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        Point x = p;
        for (int a = 0; a < g.dim; ++a) x[a] += r * rule.nodes[i][a];
        acc += rule.weights[i] * f(x);
    }
    return acc * std::pow(r, g.dim - 1);
}

void check_radii(const Grid& g, const std::vector<double>& radii) {
    if (radii.empty()) throw FrequencyError("profile: no radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 4 * g.h() - 1e-12 || radii[i] > g.L / 4 + 1e-12)
            throw FrequencyError("profile: radius outside [4h, L/4]");
        if (i && !(radii[i] > radii[i - 1])) throw FrequencyError("profile: radii must increase");
    }
}

void finish(FrequencyProfile& P) {
    P.N.assign(P.r.size(), 0.0);
    P.defined.assign(P.r.size(), 0);
    for (std::size_t i = 0; i < P.r.size(); ++i)
        if (P.h[i] > 0) {
            P.N[i] = P.r[i] * P.H[i] / P.h[i];
            P.defined[i] = 1;
        }
}

/// Position of lattice coordinate c without wrapping.
Point lattice_point(const Grid& g, const std::array<int, 3>& c) {
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) x[a] = c[a] * g.h();
    return x;
}

}  // namespace

FrequencyProfile profile(const CutBundleField& v, const Point& p, const std::vector<double>& radii) {
    const Grid& g = v.grid();
    check_radii(g, radii);
    const double dz = v.cut.distance_to_zeros(p);
    for (double r : radii)
        if (dz < r && r < 8 * g.h() - 1e-12) throw FrequencyError("profile: radius below 8h near the zero set");
    FrequencyProfile P;
    P.center = p;
    P.dim = g.dim;
    P.mode = ProfileMode::one_form;
    P.r = radii;
    const Domain D{&g, v.cut.periodic, p};
    const ScalarField dens = v.norm_sq();
    for (double r : radii) P.h.push_back(sphere_integral(g, p, r, [&](const Point& x) { return interpolate(dens, x); }));
    const int corners = 1 << g.dim;
    CellReader read = [&](const std::array<int, 3>& base, std::vector<std::array<double, kMaxCorners>>& out) {
        const Point x0 = lattice_point(g, base);
        for (int q = 0; q < corners; ++q) {
            std::array<int, 3> c = base;
            for (int a = 0; a < g.dim; ++a) c[a] += (q >> a) & 1;
            const double sg = v.cut.crossing_sign(x0, lattice_point(g, c));
            const std::size_t s = g.index(c);
            for (int a = 0; a < g.dim; ++a) out[a][q] = sg * v.form.at(s, a);
        }
    };
    P.H = q1_energies(D, radii, g.dim, 1.0, read);
    finish(P);
    return P;
}

FrequencyProfile profile(const GaugePair& Pair, const Point& p, const std::vector<double>& radii) {
    const Grid& g = Pair.a.grid;
    check_radii(g, radii);
    FrequencyProfile P;
    P.center = p;
    P.dim = g.dim;
    P.mode = ProfileMode::gauge_pair;
    P.r = radii;
    const Domain D{&g, true, p};
    const Su2Form& al = Pair.alpha;
    const ScalarField dens = pointwise_norm_sq(al);
    for (double r : radii) P.h.push_back(sphere_integral(g, p, r, [&](const Point& x) { return interpolate(dens, x); }));
    const int corners = 1 << g.dim;
    CellReader read = [&](const std::array<int, 3>& base, std::vector<std::array<double, kMaxCorners>>& out) {
        for (int q = 0; q < corners; ++q) {
            std::array<int, 3> c = base;
            for (int a = 0; a < g.dim; ++a) c[a] += (q >> a) & 1;
            const std::size_t s = g.index(c);
            for (int a = 0; a < g.dim; ++a)
                for (int i = 0; i < 3; ++i) out[3 * a + i][q] = al.at(s, a)[i];
        }
    };
    // inner = (1/2) c.c on Su2 coefficients
    P.H = q1_energies(D, radii, 3 * g.dim, 0.5, read);
    const ScalarField wedge = pointwise_norm_sq(wedge_self(al));
    const double h = g.h();
    const double r2 = Pair.r * Pair.r;
    auto extra = [&](std::size_t s) {
        double acc = 2.0 * r2 * wedge.at(s, 0);
        for (int i = 0; i < g.dim; ++i) {
            const std::size_t sp = g.shift(s, i, +1);
            for (int j = 0; j < g.dim; ++j) {
                const Su2 diff = (1.0 / h) * (al.at(sp, j) - al.at(s, j));
                const Su2 br = bracket(Pair.a.at(s, i), al.at(s, j));
                acc += 2.0 * inner(diff, br) + inner(br, br);
            }
        }
        return acc;
    };
    const std::vector<double> rest = site_integrals(D, radii, extra);
    for (std::size_t i = 0; i < radii.size(); ++i) P.H[i] += rest[i];
    finish(P);
    return P;
}

double dh_check(const FrequencyProfile& P) {
    if (P.r.size() < 3) throw FrequencyError("dh_check: needs at least three radii");
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < P.r.size(); ++i) {
        if (!P.defined[i] || !P.defined[i - 1] || !P.defined[i + 1]) continue;
        const double a = P.r[i] - P.r[i - 1], b = P.r[i + 1] - P.r[i];
        const double dh = (-b / (a * (a + b))) * P.h[i - 1] + ((b - a) / (a * b)) * P.h[i] + (a / (b * (a + b))) * P.h[i + 1];
        const double expect = (P.dim - 1 + 2 * P.N[i]) * P.h[i] / P.r[i];
        worst = std::max(worst, std::abs(dh - expect) / (P.h[i] / P.r[i]));
    }
    return worst;
}

double monotonicity_check(const FrequencyProfile& P, double kappa) {
    double worst = 0.0;
    for (std::size_t i = 0; i < P.r.size(); ++i)
        for (std::size_t j = i + 1; j < P.r.size(); ++j) {
            if (!P.defined[i] || !P.defined[j]) continue;
            const double ds = P.r[j] * P.r[j] - P.r[i] * P.r[i];
            worst = std::max(worst, std::exp(-kappa * ds) * P.N[i] - kappa * ds - P.N[j]);
        }
    return worst;
}

double scaling_identity_check(const FrequencyProfile& P) {
    if (P.r.size() < 2) throw FrequencyError("scaling_identity_check: needs at least two radii");
    for (char d : P.defined)
        if (!d) throw FrequencyError("scaling_identity_check: undefined N in profile");
    double worst = 0.0, expo = 0.0;
    for (std::size_t i = 1; i < P.r.size(); ++i) {
        expo += 0.5 * (P.N[i - 1] / P.r[i - 1] + P.N[i] / P.r[i]) * (P.r[i] - P.r[i - 1]);
        const double measured = P.h[i] / P.h[0];
        const double predicted = std::pow(P.r[i] / P.r[0], P.dim - 1) * std::exp(2.0 * expo);
        worst = std::max(worst, std::abs(measured - predicted) / measured);
    }
    return worst;
}

CutBundleField rescale(const CutBundleField& v, const Point& p, double lambda) {
    const Grid& g = v.grid();
    if (!(lambda > 0 && lambda <= 1)) throw FrequencyError("rescale: lambda must lie in (0, 1]");
    const ScalarField dens = v.norm_sq();
    const double hl = sphere_integral(g, p, lambda, [&](const Point& x) { return interpolate(dens, x); });
    if (!(hl > 0)) throw FrequencyError("rescale: h(lambda) vanishes");
    const double factor = lambda * std::sqrt(std::pow(lambda, g.dim - 3) / hl);
    CutBundleField out{ScalarField(g, 1), v.cut};
    for (CutZero& z : out.cut.zeros)
        for (int a = 0; a < 3; ++a) z.p[a] = p[a] + (z.p[a] - p[a]) / lambda;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const Point x = g.position(s);
        Point y = p;
        for (int a = 0; a < g.dim; ++a) y[a] += lambda * (x[a] - p[a]);
        if (!v.inside(y)) continue;
        const auto val = v.value_at(y);
        for (int a = 0; a < g.dim; ++a) out.form.at(s, a) = factor * val[a];
    }
    return out;
}

double psi_scaling_check(const ModelZForm& M, double R) {
    if (!(R > 0)) throw FrequencyError("psi_scaling_check: R must be positive");
    const double n0 = 0.5 * M.k;
    const double scale = std::pow(R, 1 + n0);
    double worst = 0.0;
    const int m = 6;
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j)
            for (int k = (M.dim == 3 ? -2 : 0); k <= (M.dim == 3 ? 2 : 0); ++k) {
                const Point off{0.37 * i / m, 0.41 * j / m + 0.013, 0.5 * k};
                if (std::hypot(off[0], off[1]) < 0.05) continue;
                Point x = M.axis, y = M.axis;
                for (int a = 0; a < 3; ++a) {
                    x[a] += off[a];
                    y[a] += R * off[a];
                }
                const ModelValue vx = model_eval(M, x);
                const ModelValue vy = model_eval(M, y);
                double diff = 0.0;
                for (int a = 0; a < 3; ++a) diff += std::pow(R * vy.v[a] - scale * vx.v[a], 2);
                worst = std::max(worst, std::sqrt(diff) / (scale * vx.norm));
            }
    return worst;
}

double LimitReport::worst() const {
    double w = 0.0;
    for (const LimitValue& v : values) w = std::max(w, v.relative());
    return w;
}

LimitReport limit_values_check(const ModelZForm& M, const Grid& g, const std::vector<double>& Rs) {
    if (M.dim != 3 || g.dim != 3) throw FrequencyError("limit_values_check: needs a 3-D model and grid");
    const CutBundleField v = sample_model(g, M);
    const Point& p = M.axis;
    const double N = 0.5 * M.k;
    const double h = g.h();
    const double delta = 2.0 * h;
    std::vector<double> radii;
    for (double R : Rs) {
        radii.push_back(R - delta);
        radii.push_back(R);
        radii.push_back(R + delta);
    }
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    const Domain D{&g, false, p};
    const ScalarField dens = v.norm_sq();
    const int corners = 1 << g.dim;
    CellReader read = [&](const std::array<int, 3>& base, std::vector<std::array<double, kMaxCorners>>& out) {
        const Point x0 = lattice_point(g, base);
        for (int q = 0; q < corners; ++q) {
            std::array<int, 3> c = base;
            for (int a = 0; a < g.dim; ++a) c[a] += (q >> a) & 1;
            const double sg = v.cut.crossing_sign(x0, lattice_point(g, c));
            const std::size_t s = g.index(c);
            for (int a = 0; a < g.dim; ++a) out[a][q] = sg * v.form.at(s, a);
        }
    };
    const std::vector<double> H = q1_energies(D, radii, g.dim, 1.0, read);
    const std::vector<double> mass = site_integrals(D, radii, [&](std::size_t s) { return dens.at(s, 0); });
    LimitReport rep;
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        const double R = Rs[i];
        const double hR = sphere_integral(g, p, R, [&](const Point& x) { return interpolate(dens, x); });
        const double radial = sphere_integral(g, p, R, [&](const Point& x) {
            const auto nu = v.value_at(x);
            double d = 0.0;
            for (int a = 0; a < 3; ++a) d += nu[a] * (x[a] - p[a]) / R;
            return d * d;
        });
        const double radial_derivative = sphere_integral(g, p, R, [&](const Point& x) {
            Point xp = x, xm = x;
            for (int a = 0; a < 3; ++a) {
                xp[a] += h * (x[a] - p[a]) / R;
                xm[a] -= h * (x[a] - p[a]) / R;
            }
            const auto a1 = v.value_at(xp);
            const auto a0 = v.value_at(xm);
            const double sp = v.cut.crossing_sign(x, xp), sm = v.cut.crossing_sign(x, xm);
            double d = 0.0;
            for (int a = 0; a < 3; ++a) d += std::pow((sp * a1[a] - sm * a0[a]) / (2 * h), 2);
            return d;
        });
        const double ball_mass = mass[3 * i + 1];
        const double energy = H[3 * i + 1];
        const double sphere_energy = (H[3 * i + 2] - H[3 * i]) / (2 * delta);
        rep.values.push_back({"sphere_mass", R, hR, std::pow(R, 2 + 2 * N)});
        rep.values.push_back({"sphere_radial_mass", R, radial, (1 + N) / (3 + 2 * N) * std::pow(R, 2 + 2 * N)});
        rep.values.push_back({"ball_mass", R, ball_mass, std::pow(R, 3 + 2 * N) / (3 + 2 * N)});
        rep.values.push_back({"ball_energy", R, energy, N * std::pow(R, 1 + 2 * N)});
        rep.values.push_back({"sphere_energy", R, sphere_energy, N * (1 + 2 * N) * std::pow(R, 2 * N)});
        rep.values.push_back({"sphere_radial_energy", R, radial_derivative, N * N * std::pow(R, 2 * N)});
        const double poho = R * (radial - 0.5 * hR) + 0.5 * ball_mass;
        rep.pohozaev.push_back(std::abs(poho) / (0.5 * ball_mass));
        rep.lemma73_margin.push_back(1.0 - ball_mass / (R * hR));
    }
    return rep;
}

NZero n_at_zero(const FrequencyProfile& P) {
    std::vector<double> rs, ns;
    double rmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < P.r.size(); ++i)
        if (P.defined[i]) rmin = std::min(rmin, P.r[i]);
    for (std::size_t i = 0; i < P.r.size(); ++i)
        if (P.defined[i] && P.r[i] <= 10.0 * rmin) {
            rs.push_back(P.r[i]);
            ns.push_back(P.N[i]);
        }
    if (rs.size() < 2) throw FrequencyError("n_at_zero: needs at least two defined radii");
    const double n = static_cast<double>(rs.size());
    double sr = 0, sn = 0, srr = 0, srn = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        sr += rs[i];
        sn += ns[i];
        srr += rs[i] * rs[i];
        srn += rs[i] * ns[i];
    }
    const double slope = (n * srn - sr * sn) / (n * srr - sr * sr);
    const double icpt = (sn - slope * sr) / n;
    NZero out;
    out.estimate = icpt;
    double ss = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) ss += std::pow(ns[i] - (icpt + slope * rs[i]), 2);
    out.fit_rms = std::sqrt(ss / n);
    out.snapped = std::max(0.0, std::round(2.0 * icpt) / 2.0);
    out.residual = std::abs(icpt - out.snapped);
    out.snappable = out.residual <= 0.25 && out.fit_rms <= 0.25;
    return out;
}

}  // namespace gaugelab
