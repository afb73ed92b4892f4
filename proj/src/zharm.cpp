#include "gaugelab/zharm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace gaugelab {

double CutDescriptor::crossing_sign(const Point& x, const Point& y) const {
    double sign = 1.0;
    for (const CutZero& z : zeros) {
        if (!z.odd) continue;
        const double ay = x[1] - z.p[1], by = y[1] - z.p[1];
        const bool up_a = ay >= 0.0, up_b = by >= 0.0;
        if (up_a == up_b) continue;
        const double t = ay / (ay - by);
        const double xi = x[0] + t * (y[0] - x[0]);
        if (xi < z.p[0]) sign = -sign;
    }
    return sign;
}

double CutDescriptor::distance_to_zeros(const Point& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const CutZero& z : zeros) best = std::min(best, std::hypot(x[0] - z.p[0], x[1] - z.p[1]));
    return best;
}

bool CutBundleField::has_neighbour(std::size_t site, int axis, int dir) const {
    if (cut.periodic) return true;
    const int c = grid().coord(site, axis) + dir;
    return c >= 0 && c < grid().n;
}

double CutBundleField::edge_sign(std::size_t site, int axis, int dir) const {
    const Point x = grid().position(site);
    Point y = x;
    y[axis] += dir * grid().h();
    return cut.crossing_sign(x, y);
}

ScalarField CutBundleField::norm_sq() const {
    ScalarField out(grid(), 0);
    for (std::size_t s = 0; s < form.sites(); ++s) {
        double acc = 0.0;
        for (int c = 0; c < form.ncomp; ++c) acc += form.at(s, c) * form.at(s, c);
        out.at(s, 0) = acc;
    }
    return out;
}

bool CutBundleField::inside(const Point& x) const {
    if (cut.periodic) return true;
    const double top = (grid().n - 1) * grid().h();
    for (int a = 0; a < grid().dim; ++a)
        if (!(x[a] >= 0.0 && x[a] <= top)) return false;
    return true;
}

std::array<double, 3> CutBundleField::value_at(const Point& x) const {
    const Grid& g = grid();
    if (!inside(x)) throw ZharmError("value_at: point outside the sampled domain");
    const double h = g.h();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        const double u = x[a] / h;
        base[a] = static_cast<int>(std::floor(u));
        if (!cut.periodic) base[a] = std::min(base[a], g.n - 2);
        frac[a] = u - base[a];
    }
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int q = 0; q < (1 << g.dim); ++q) {
        std::array<int, 3> c = base;
        Point pos{0.0, 0.0, 0.0};
        double w = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            const int bit = (q >> a) & 1;
            c[a] += bit;
            pos[a] = c[a] * h;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        const double sg = cut.crossing_sign(x, pos) * w;
        const std::size_t s = g.index(c);
        for (int a = 0; a < g.dim; ++a) out[a] += sg * form.at(s, a);
    }
    return out;
}

// ---- models ---------------------------------------------------------------------

namespace {

std::complex<double> model_coefficient(const ModelZForm& M, const Point& x) {
    const double dx = x[0] - M.axis[0];
    double dy = x[1] - M.axis[1];
    if (dy == 0.0) dy = 0.0; // fold -0 onto the upper side of the cut
    const double rho = std::hypot(dx, dy);
    const double th = std::atan2(dy, dx);
    return std::polar(M.c * std::pow(rho, 0.5 * M.k), 0.5 * M.k * th);
}

/// int_0^pi sin^m
double sine_power_integral(double m) {
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 1);
}

}  // namespace

ModelValue model_eval(const ModelZForm& M, const Point& x) {
    const double rho = std::hypot(x[0] - M.axis[0], x[1] - M.axis[1]);
    if (rho == 0.0) throw ZharmError("model_eval: point on the zero set");
    const std::complex<double> f = model_coefficient(M, x);
    return {{f.real(), -f.imag(), 0.0}, std::abs(f)};
}

double model_norm(const ModelZForm& M, const Point& x) {
    return M.c * std::pow(std::hypot(x[0] - M.axis[0], x[1] - M.axis[1]), 0.5 * M.k);
}

CutDescriptor model_cut(const ModelZForm& M) {
    CutDescriptor cut;
    cut.zeros.push_back({M.axis, M.k % 2 == 1});
    cut.periodic = false;
    return cut;
}

CutBundleField sample_models(const Grid& g, const std::vector<ModelZForm>& parts) {
    if (parts.empty()) throw ZharmError("sample_models: no models");
    for (const ModelZForm& M : parts) {
        if (M.dim != g.dim) throw ZharmError("sample_models: model and grid dimension differ");
        if (M.axis != parts.front().axis || M.k % 2 != parts.front().k % 2)
            throw ZharmError("sample_models: models must share the axis and the parity of k");
    }
    CutBundleField out{ScalarField(g, 1), model_cut(parts.front())};
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const Point x = g.position(s);
        if (std::hypot(x[0] - parts.front().axis[0], x[1] - parts.front().axis[1]) == 0.0) continue;
        for (const ModelZForm& M : parts) {
            const ModelValue v = model_eval(M, x);
            for (int a = 0; a < g.dim; ++a) out.form.at(s, a) += v.v[a];
        }
    }
    return out;
}

CutBundleField sample_model(const Grid& g, const ModelZForm& M) { return sample_models(g, {M}); }

double model_h(const ModelZForm& M, double r) {
    const double c2 = M.c * M.c;
    if (M.dim == 2) return 2.0 * std::numbers::pi * c2 * std::pow(r, M.k + 1);
    return 2.0 * std::numbers::pi * c2 * std::pow(r, M.k + 2) * sine_power_integral(M.k + 1);
}

ModelZForm normalized_model(int k, const Point& axis) {
    ModelZForm M{k, 1.0, axis, 3};
    M.c = 1.0 / std::sqrt(model_h(M, 1.0));
    return M;
}

// ---- residuals and holonomy -----------------------------------------------------------

HarmonicityResidual harmonicity_residual(const CutBundleField& v, double rho) {
    const Grid& g = v.grid();
    const double h = g.h();
    if (rho < 4 * h - 1e-12) throw ZharmError("harmonicity_residual: exclusion radius must be at least 4h");
    const ScalarField n2 = v.norm_sq();
    HarmonicityResidual res;
    double d2 = 0.0, ds2 = 0.0, boch = 0.0, grad2 = 0.0;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        if (v.cut.distance_to_zeros(g.position(s)) <= rho) continue;
        bool ok = true;
        for (int i = 0; i < g.dim && ok; ++i) ok = v.has_neighbour(s, i, +1) && v.has_neighbour(s, i, -1);
        if (!ok) continue;
        ++res.sites;
        std::array<std::size_t, 3> up{}, dn{};
        std::array<double, 3> su{}, sd{};
        for (int i = 0; i < g.dim; ++i) {
            up[i] = g.shift(s, i, +1);
            dn[i] = g.shift(s, i, -1);
            su[i] = v.edge_sign(s, i, +1);
            sd[i] = v.edge_sign(s, i, -1);
        }
        for (int i = 0; i < g.dim; ++i)
            for (int j = i + 1; j < g.dim; ++j) {
                const double dij = (su[i] * v.form.at(up[i], j) - v.form.at(s, j)) / h -
                                   (su[j] * v.form.at(up[j], i) - v.form.at(s, i)) / h;
                d2 += dij * dij;
            }
        double div = 0.0;
        for (int i = 0; i < g.dim; ++i) div += (v.form.at(s, i) - sd[i] * v.form.at(dn[i], i)) / h;
        ds2 += div * div;
        double lap = 0.0, gr = 0.0;
        for (int i = 0; i < g.dim; ++i) {
            lap += (n2.at(up[i], 0) - 2 * n2.at(s, 0) + n2.at(dn[i], 0)) / (h * h);
            for (int j = 0; j < g.dim; ++j) {
                const double dj = (su[i] * v.form.at(up[i], j) - sd[i] * v.form.at(dn[i], j)) / (2 * h);
                gr += dj * dj;
            }
        }
        boch += std::abs(-0.5 * lap + gr);
        grad2 += gr;
    }
    const double vol = std::pow(h, g.dim);
    res.d_norm = std::sqrt(d2 * vol);
    res.dstar_norm = std::sqrt(ds2 * vol);
    res.bochner_relative = grad2 > 0 ? boch / grad2 : 0.0;
    return res;
}

int holonomy(const CutBundleField& v, const std::vector<std::size_t>& loop) {
    const Grid& g = v.grid();
    if (loop.size() < 2) throw ZharmError("holonomy: loop needs at least two sites");
    double sign = 1.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const std::size_t a = loop[i], b = loop[(i + 1) % loop.size()];
        if (v.cut.distance_to_zeros(g.position(a)) < 2 * g.h())
            throw ZharmError("holonomy: loop passes within 2h of the zero set");
        int axis = -1, dir = 0;
        for (int j = 0; j < g.dim && axis < 0; ++j)
            for (int d : {-1, 1})
                if (g.shift(a, j, d) == b && v.has_neighbour(a, j, d)) {
                    axis = j;
                    dir = d;
                    break;
                }
        if (axis < 0) throw ZharmError("holonomy: consecutive loop sites are not lattice neighbours");
        sign *= v.edge_sign(a, axis, dir);
    }
    return sign > 0 ? 1 : -1;
}

std::vector<std::size_t> square_loop(const Grid& g, std::array<int, 3> center, int half) {
    std::vector<std::size_t> out;
    auto at = [&](int x, int y) { return g.index({x, y, center[2]}); };
    const int x0 = center[0] - half, x1 = center[0] + half, y0 = center[1] - half, y1 = center[1] + half;
    for (int x = x0; x < x1; ++x) out.push_back(at(x, y0));
    for (int y = y0; y < y1; ++y) out.push_back(at(x1, y));
    for (int x = x1; x > x0; --x) out.push_back(at(x, y1));
    for (int y = y1; y > y0; --y) out.push_back(at(x0, y));
    return out;
}

// ---- quadratic differentials ------------------------------------------------------------

QdOutput qd_pipeline(const Grid& g, const QuadDiff& q) {
    if (g.dim != 2) throw ZharmError("qd_pipeline: needs a 2-D grid");
    QdOutput out;
    out.sigma = std::sqrt(2.0) * Su2::basis(0);
    out.e.assign(g.sites(), 0.0);
    std::vector<std::complex<double>> mu(g.sites(), 0.0);
    if (q.surface == Surface::torus) {
        const std::complex<double> root = std::sqrt(q.c);
        std::fill(out.e.begin(), out.e.end(), root);
        std::fill(mu.begin(), mu.end(), q.c);
        out.nu = {ScalarField(g, 1), CutDescriptor{}};
    } else {
        if (q.k < 1) throw ZharmError("qd_pipeline: disk model needs k >= 1");
        const ModelZForm M{q.k, 1.0, q.center, 2};
        out.nu = {ScalarField(g, 1), model_cut(M)};
        for (std::size_t s = 0; s < g.sites(); ++s) {
            const Point x = g.position(s);
            const std::complex<double> z(x[0] - q.center[0], x[1] - q.center[1]);
            mu[s] = std::pow(z, q.k);
            if (z != 0.0) out.e[s] = model_coefficient(M, x);
        }
        out.zeros.push_back({q.center, q.k});
    }
    for (std::size_t s = 0; s < g.sites(); ++s) {
        out.nu.form.at(s, 0) = 2.0 * out.e[s].real();
        out.nu.form.at(s, 1) = -2.0 * out.e[s].imag();
        if (std::abs(mu[s]) > 0)
            out.square_defect = std::max(out.square_defect, std::abs(out.e[s] * out.e[s] - mu[s]) / std::abs(mu[s]));
    }
    double dbar2 = 0.0, d2 = 0.0;
    const double h = g.h();
    for (std::size_t s = 0; s < g.sites(); ++s) {
        if (out.nu.cut.distance_to_zeros(g.position(s)) <= 4 * h) continue;
        bool ok = true;
        for (int i = 0; i < 2 && ok; ++i) ok = out.nu.has_neighbour(s, i, +1) && out.nu.has_neighbour(s, i, -1);
        if (!ok) continue;
        std::array<std::complex<double>, 2> der;
        for (int i = 0; i < 2; ++i)
            der[i] = (out.nu.edge_sign(s, i, +1) * out.e[g.shift(s, i, +1)] -
                      out.nu.edge_sign(s, i, -1) * out.e[g.shift(s, i, -1)]) /
                     (2 * h);
        const std::complex<double> I(0.0, 1.0);
        dbar2 += std::norm(0.5 * (der[0] + I * der[1]));
        d2 += std::norm(0.5 * (der[0] - I * der[1]));
    }
    out.cauchy_riemann = d2 > 0 ? std::sqrt(dbar2 / d2) : std::sqrt(dbar2);
    return out;
}

// ---- foliations ---------------------------------------------------------------------------

namespace {

/// Unit vector annihilated by nu at x, or false where nu is too small to define it.
bool leaf_direction(const CutBundleField& v, const Point& x, Point& t) {
    const auto nu = v.value_at(x);
    const double n = std::hypot(nu[0], nu[1]);
    if (n < 1e-14) return false;
    t = {-nu[1] / n, nu[0] / n, 0.0};
    return true;
}

double dot2(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }

bool trace_ok(const CutBundleField& v, const Point& x) {
    const Grid& g = v.grid();
    if (v.cut.distance_to_zeros(x) < 2 * g.h()) return false;
    for (int a = 0; a < 2; ++a)
        if (!(x[a] >= 0.0 && x[a] <= (v.cut.periodic ? g.L : (g.n - 1) * g.h()))) return false;
    return true;
}

std::vector<Point> trace_half(const CutBundleField& v, Point x, Point dir, double step, double max_len) {
    std::vector<Point> pts;
    double len = 0.0;
    while (len < max_len - 1e-12) {
        const double ds = std::min(step, max_len - len);
        Point t1;
        if (!leaf_direction(v, x, t1)) break;
        if (dot2(t1, dir) < 0) t1 = {-t1[0], -t1[1], 0.0};
        const Point xm{x[0] + 0.5 * ds * t1[0], x[1] + 0.5 * ds * t1[1], 0.0};
        if (!trace_ok(v, xm)) break;
        Point t2;
        if (!leaf_direction(v, xm, t2)) break;
        if (dot2(t2, t1) < 0) t2 = {-t2[0], -t2[1], 0.0};
        const Point xn{x[0] + ds * t2[0], x[1] + ds * t2[1], 0.0};
        if (!trace_ok(v, xn)) break;
        pts.push_back(xn);
        x = xn;
        dir = t2;
        len += ds;
    }
    return pts;
}

}  // namespace

FoliationOutput foliation_trace(const CutBundleField& v, const std::vector<Point>& seeds, double step,
                                double max_len) {
    const Grid& g = v.grid();
    if (g.dim != 2) throw ZharmError("foliation_trace: needs a 2-D field");
    if (!(step > 0)) step = g.h() / 2;
    FoliationOutput out;
    out.L = g.L;
    for (const CutZero& z : v.cut.zeros) out.zeros.push_back(z.p);
    for (const Point& seed : seeds) {
        if (v.cut.distance_to_zeros(seed) < 2 * g.h()) throw ZharmError("foliation_trace: seed on the zero set");
        Point t;
        if (!trace_ok(v, seed) || !leaf_direction(v, seed, t)) throw ZharmError("foliation_trace: seed is not traceable");
        std::vector<Point> back = trace_half(v, seed, {-t[0], -t[1], 0.0}, step, max_len);
        const std::vector<Point> fwd = trace_half(v, seed, t, step, max_len);
        std::reverse(back.begin(), back.end());
        back.push_back(seed);
        back.insert(back.end(), fwd.begin(), fwd.end());
        out.leaves.push_back(std::move(back));
    }
    return out;
}

double transverse_measure(const CutBundleField& v, const std::vector<Point>& path) {
    const double hmax = v.grid().h() / 4;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Point& a = path[i];
        const Point& b = path[i + 1];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (len == 0.0) continue;
        const Point u{(b[0] - a[0]) / len, (b[1] - a[1]) / len, 0.0};
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / hmax)));
        const double ds = len / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double s = (p + 0.5) * ds;
            const auto nu = v.value_at({a[0] + s * u[0], a[1] + s * u[1], 0.0});
            acc += std::abs(nu[0] * u[0] + nu[1] * u[1]) * ds;
        }
    }
    return acc;
}

std::string foliation_json(const FoliationOutput& f) {
    nlohmann::json j;
    j["L"] = f.L;
    j["leaves"] = nlohmann::json::array();
    for (const auto& leaf : f.leaves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const Point& p : leaf) pts.push_back({p[0], p[1]});
        j["leaves"].push_back(pts);
    }
    j["measures"] = nlohmann::json::object();
    for (const auto& [label, value] : f.measures) j["measures"][label] = value;
    j["zeros"] = nlohmann::json::array();
    for (const Point& p : f.zeros) j["zeros"].push_back({p[0], p[1]});
    return j.dump(2) + "\n";
}

std::string foliation_svg(const FoliationOutput& f) {
    const double px = 800.0;
    const double s = f.L > 0 ? px / f.L : 1.0;
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px << "\" viewBox=\"0 0 "
       << px << ' ' << px << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& leaf : f.leaves) {
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < leaf.size(); ++i)
            os << (i ? " " : "") << leaf[i][0] * s << ',' << px - leaf[i][1] * s;
        os << "\"/>\n";
    }
    for (const Point& z : f.zeros)
        os << "<circle cx=\"" << z[0] * s << "\" cy=\"" << px - z[1] * s << "\" r=\"4\" fill=\"red\"/>\n";
    os << "</svg>\n";
    return os.str();
}

// ---- sphere restriction ---------------------------------------------------------------------

SphereEquation sphere_equation_residual(const ModelZForm& M, int m) {
    if (M.dim != 3) throw ZharmError("sphere_equation_residual: needs a 3-D model");
    if (m < 4) throw ZharmError("sphere_equation_residual: mesh too coarse");
    const CutDescriptor cut = model_cut(M);
    const double n0 = 0.5 * M.k;
    const double dth = std::numbers::pi / m, dph = std::numbers::pi / m;
    auto point = [&](double th, double ph) {
        return Point{M.axis[0] + std::sin(th) * std::cos(ph), M.axis[1] + std::sin(th) * std::sin(ph),
                     M.axis[2] + std::cos(th)};
    };
    auto radial = [&](const Point& x) {
        const ModelValue v = model_eval(M, x);
        return v.v[0] * (x[0] - M.axis[0]) + v.v[1] * (x[1] - M.axis[1]) + v.v[2] * (x[2] - M.axis[2]);
    };
    double num_a = 0.0, num_b = 0.0, den = 0.0;
    for (int i = 1; i + 1 < m; ++i) {
        const double th = (i + 0.5) * dth;
        const double st = std::sin(th), ct = std::cos(th);
        for (int j = 0; j < 2 * m; ++j) {
            const double ph = (j + 0.5) * dph;
            const Point x = point(th, ph);
            const ModelValue v = model_eval(M, x);
            const Point e_th{ct * std::cos(ph), ct * std::sin(ph), -st};
            const Point e_ph{-std::sin(ph), std::cos(ph), 0.0};
            const double nu_th = v.v[0] * e_th[0] + v.v[1] * e_th[1] + v.v[2] * e_th[2];
            const double nu_ph = v.v[0] * e_ph[0] + v.v[1] * e_ph[1] + v.v[2] * e_ph[2];
            auto carried = [&](double t2, double p2) {
                const Point y = point(t2, p2);
                return cut.crossing_sign(x, y) * radial(y);
            };
            const double d_th = (carried(th + dth, ph) - carried(th - dth, ph)) / (2 * dth);
            const double d_ph = (carried(th, ph + dph) - carried(th, ph - dph)) / (2 * dph * st);
            const double w = st * dth * dph;
            num_a += w * (std::pow(d_th - (n0 + 1) * nu_th, 2) + std::pow(d_ph - (n0 + 1) * nu_ph, 2));
            num_b += w * (std::pow(d_th - n0 * nu_th, 2) + std::pow(d_ph - n0 * nu_ph, 2));
            den += w * (n0 + 1) * (n0 + 1) * (nu_th * nu_th + nu_ph * nu_ph);
        }
    }
    if (den == 0.0) return {};
    return {std::sqrt(num_a / den), std::sqrt(num_b / den)};
}

}  // namespace gaugelab
