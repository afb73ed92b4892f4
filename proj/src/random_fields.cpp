#include "gaugelab/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace gaugelab {

namespace {

struct Mode {
    std::array<int, 3> k;
};

std::vector<Mode> modes_for(int dim, int K, bool include_constant, bool axis_only) {
    std::vector<Mode> out;
    const int z_lo = dim == 3 ? -K : 0, z_hi = dim == 3 ? K : 0;
    for (int a = -K; a <= K; ++a)
        for (int b = -K; b <= K; ++b)
            for (int c = z_lo; c <= z_hi; ++c) {
                if (a == 0 && b == 0 && c == 0 && !include_constant) continue;
                if (axis_only && (a != 0) + (b != 0) + (c != 0) > 1) continue;
                out.push_back({{a, b, c}});
            }
    return out;
}

double uniform(std::mt19937_64& rng) {
    return std::generate_canonical<double, 53>(rng) * 2.0 - 1.0;
}

}  // namespace

Su2Form random_smooth_form(const Grid& g, int degree, std::uint64_t seed, const SmoothFieldSpec& spec) {
    std::mt19937_64 rng(seed);
    Su2Form out(g, degree);
    const auto modes = modes_for(g.dim, spec.max_mode, spec.include_constant, spec.axis_only);
    const double scale = spec.amplitude / std::sqrt(static_cast<double>(modes.size()));
    const double w = 2.0 * std::numbers::pi / g.L;
    for (const Mode& m : modes) {
        std::vector<Su2> ca(out.ncomp), sa(out.ncomp);
        for (int c = 0; c < out.ncomp; ++c)
            for (int i = 0; i < 3; ++i) {
                ca[c][i] = scale * uniform(rng);
                sa[c][i] = scale * uniform(rng);
            }
        for (std::size_t s = 0; s < g.sites(); ++s) {
            const Point x = g.position(s);
            const double ph = w * (m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2]);
            const double cp = std::cos(ph), sp = std::sin(ph);
            for (int c = 0; c < out.ncomp; ++c) out.at(s, c) += cp * ca[c] + sp * sa[c];
        }
    }
    return out;
}

ScalarField random_smooth_scalar(const Grid& g, std::uint64_t seed, const SmoothFieldSpec& spec) {
    const Su2Form f = random_smooth_form(g, 0, seed, spec);
    ScalarField out(g, 0);
    for (std::size_t s = 0; s < g.sites(); ++s) out.at(s, 0) = f.at(s, 0)[0];
    return out;
}

GaugeMap random_gauge_map(const Grid& g, std::uint64_t seed, double amplitude, int max_mode) {
    const Su2Form xi = random_smooth_form(g, 0, seed, {max_mode, amplitude, false, false});
    GaugeMap out = GaugeMap::identity(g);
    for (std::size_t s = 0; s < g.sites(); ++s) out.q[s] = exp_su2(xi.at(s, 0));
    out.renormalize();
    return out;
}

GaugePair random_smooth_pair(const Grid& g, std::uint64_t seed, const SmoothFieldSpec& spec, double r) {
    return {random_smooth_form(g, 1, seed, spec), random_smooth_form(g, 1, seed ^ 0x9e3779b97f4a7c15ULL, spec), r};
}

}  // namespace gaugelab
