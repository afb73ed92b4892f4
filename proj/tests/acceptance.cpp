// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gaugelab/cli.hpp"
#include "gaugelab/flows.hpp"
#include "gaugelab/frequency.hpp"
#include "gaugelab/lm_op.hpp"
#include "gaugelab/random_fields.hpp"
#include "gaugelab/zharm.hpp"

using namespace gaugelab;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += "[failed: " + what + "] ";
        }
    }
    void note(const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        detail += buf;
        detail += ' ';
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool in_band(double r, double lo, double hi) { return r >= lo && r <= hi; }

Point offset_centre(const Grid& g) {
    const double c = g.L / 2 + g.h() / 2;
    return {c, c, g.dim == 3 ? c : 0.0};
}

// ---- 1 ------------------------------------------------------------------------

Outcome bochner() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst32 = 0, rmin = 1e9, rmax = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        double d[2];
        for (int i = 0; i < 2; ++i) {
            const Grid g(3, 16 << i, 2 * pi);
            const GaugePair P = random_smooth_pair(g, seed, {1, 0.5, false, false});
            d[i] = bochner_terms(P, sample_scalar(g, [](const Point&) { return 1.0; })).relative();
        }
        const double ratio = d[0] / d[1];
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
        worst32 = std::max(worst32, d[1]);
        o.require(in_band(ratio, 1.6, 2.4), "ratio seed " + std::to_string(seed));
    }
    o.require(worst32 <= 0.05, "residual at n = 32");
    const double secs = seconds_since(t0);
    o.require(secs <= 120, "runtime");
    o.note("ratios %.3f..%.3f, worst residual at n=32 %.2e, %.1f s", rmin, rmax, worst32, secs);
    return o;
}

// ---- 2 ------------------------------------------------------------------------

Outcome heat() {
    Outcome o;
    const Grid g(3, 32, 2 * pi);
    const GaugePair P = random_smooth_pair(g, 3, {1, 0.5, false, false});
    const double T = 0.05, h2 = g.h() * g.h();
    double errs[2];
    for (int i = 0; i < 2; ++i) {
        const FlowState S = run_heat(P.a, P.alpha, T, h2 / (8 << i));
        bool mono = true;
        for (std::size_t j = 1; j < S.history.size(); ++j) {
            const HistoryRow &a = S.history[j - 1], &b = S.history[j];
            mono = mono && b.norm_a_sq <= a.norm_a_sq * (1 + 1e-10) && b.energy <= a.energy * (1 + 1e-10);
        }
        o.require(mono, "monotone norm and energy");
        const double drop = S.history.front().energy - S.history.back().energy;
        errs[i] = std::abs(drop - S.q_integral) / drop;
    }
    o.require(errs[0] <= 0.02, "quadrature within 2%");
    o.require(errs[0] / errs[1] >= 1.8, "quadrature improvement");
    const StoppingResult st = stopping_time(P.a, P.alpha, T);
    o.require(st.q_norm_sq <= st.bound, "stopping bound");
    o.require(st.displacement_ok, "displacement bound");
    o.note("quadrature error %.3f%% -> %.3f%% (x%.2f), s = %.4f, |q|^2/bound = %.3f", 100 * errs[0], 100 * errs[1],
           errs[0] / errs[1], st.s, st.q_norm_sq / st.bound);
    return o;
}

// ---- 3 ------------------------------------------------------------------------

Outcome chern_simons() {
    Outcome o;
    const Grid g(3, 16, 2 * pi);
    const GaugePair P = random_smooth_pair(g, 5, {1, 0.1, false, true});
    const CsValue c0 = cs(P);
    const double scale = std::hypot(c0.re, c0.im);
    std::vector<double> im, co;
    for (int i = 0; i < 3; ++i) {
        const FlowState S = run_cs(P, CsFlowKind::gradient, 1.0, g.h() / (8 << i));
        bool mono = true;
        for (std::size_t j = 1; j < S.history.size(); ++j) mono = mono && S.history[j].re_cs <= S.history[j - 1].re_cs;
        o.require(mono, "Re CS non-increasing");
        const HistoryRow &a = S.history.front(), &b = S.history.back();
        im.push_back(std::abs(b.im_cs - a.im_cs) / scale);
        co.push_back(std::abs(b.coclosure_energy - a.coclosure_energy) / a.coclosure_energy);
    }
    for (int i = 0; i < 3; ++i) {
        o.require(im[i] <= 0.05 && co[i] <= 0.05, "drift within 5%");
        if (i > 0) {
            o.require(in_band(im[i - 1] / im[i], 1.4, 2.6), "Im CS drift halving");
            o.require(in_band(co[i - 1] / co[i], 1.4, 2.6), "coclosure drift halving");
        }
    }
    o.note("Im drift %.2e %.2e %.2e, coclosure drift %.2e %.2e %.2e", im[0], im[1], im[2], co[0], co[1], co[2]);
    return o;
}

// ---- 4 ------------------------------------------------------------------------

Outcome frequency_models() {
    Outcome o;
    for (int dim : {2, 3}) {
        const Grid g(dim, dim == 2 ? 128 : 64, 2.0);
        const Point p = offset_centre(g);
        for (int k = 1; k <= 3; ++k) {
            const CutBundleField v = sample_model(g, {k, 1.0, p, dim});
            const FrequencyProfile F = profile(v, p, radii_between(std::max(0.1 * g.L, 8 * g.h()), 0.2 * g.L, 9));
            double dev = 0;
            for (double n : F.N) dev = std::max(dev, std::abs(n - k / 2.0));
            const NZero z = n_at_zero(profile(v, p, radii_between(8 * g.h(), g.L / 4, 12)));
            const double mono = monotonicity_check(F, 0.0);
            const std::string tag = std::to_string(dim) + "D k=" + std::to_string(k);
            o.require(dev <= 0.02, tag + " N");
            o.require(z.snapped == k / 2.0 && z.residual <= 0.02, tag + " n_at_zero");
            o.require(mono <= 0.02, tag + " monotonicity");
            o.note("%dD k=%d: |N-k/2| %.4f, N(0) %.4f (res %.4f), mono %.1e;", dim, k, dev, z.estimate, z.residual, mono);
        }
    }
    return o;
}

// ---- 5 ------------------------------------------------------------------------

Outcome limit_values() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(3, 96, 4.0);
    double worst = 0;
    for (int k : {1, 2}) {
        const LimitReport rep = limit_values_check(normalized_model(k, offset_centre(g)), g, {0.5, 1.0});
        o.require(rep.values.size() == 12, "six quantities at two radii");
        for (const LimitValue& v : rep.values) o.require(v.relative() <= 0.03, v.name + " k=" + std::to_string(k));
        worst = std::max(worst, rep.worst());
    }
    const double secs = seconds_since(t0);
    o.require(secs <= 300, "runtime");
    o.note("worst relative error %.2f%%, %.1f s", 100 * worst, secs);
    return o;
}

// ---- 6 ------------------------------------------------------------------------

Outcome scaling() {
    Outcome o;
    double psi = 0;
    for (int k = 1; k <= 4; ++k)
        for (int dim : {2, 3})
            for (double R : {0.5, 2.0, 3.0}) psi = std::max(psi, psi_scaling_check({k, 1.3, {0.3, 0.2, 0}, dim}, R));
    o.require(psi <= 1e-12, "psi scaling");
    const Grid g(2, 128, 2.0);
    const Point p = offset_centre(g);
    double worst = 0;
    for (int k : {1, 2}) {
        const ModelZForm M{k, 1.0, p, 2};
        const ModelZForm U{k, 1.0 / std::sqrt(model_h(M, 1.0)), p, 2};
        for (double lambda : {0.5, 0.25}) {
            const CutBundleField v = rescale(sample_model(g, M), p, lambda);
            for (Point d : {Point{0.3, 0.2, 0}, Point{-0.4, 0.1, 0}, Point{0.1, -0.5, 0}, Point{-0.2, -0.3, 0}}) {
                const Point x{p[0] + d[0], p[1] + d[1], 0};
                const auto got = v.value_at(x);
                const ModelValue want = model_eval(U, x);
                worst = std::max(worst, std::hypot(got[0] - want.v[0], got[1] - want.v[1]) / want.norm);
            }
        }
    }
    o.require(worst <= 0.01, "rescale self-similarity");
    o.note("psi defect %.1e, rescale mismatch %.2e", psi, worst);
    return o;
}

// ---- 7 ------------------------------------------------------------------------

Outcome quantization() {
    Outcome o;
    const Grid g(2, 64, 2.0);
    const Point p = offset_centre(g);
    for (int k = 1; k <= 5; ++k) {
        const CutBundleField v = sample_model(g, {k, 1.0, p, 2});
        o.require(holonomy(v, square_loop(g, {32, 32, 0}, 5)) == (k % 2 ? -1 : 1), "holonomy k=" + std::to_string(k));
        int sum = 0;
        for (const auto& z : qd_pipeline(g, {Surface::disk, {1.0, 0.0}, k, p}).zeros) sum += z.second;
        o.require(sum == k, "disk multiplicity k=" + std::to_string(k));
    }
    const QdOutput torus = qd_pipeline(g, {Surface::torus, {0.7, 0.4}, 1, p});
    o.require(torus.zeros.empty(), "torus has 4G-4 = 0 zeros");
    o.note("holonomy (-1)^k for k=1..5, disk sums k, torus zeros %zu", torus.zeros.size());
    return o;
}

// ---- 8 ------------------------------------------------------------------------

Outcome coulomb() {
    Outcome o;
    const Grid g(3, 16, 2 * pi);
    GaugePair pg = zero_pair(g);
    pg.a = pure_gauge(random_gauge_map(g, 1, 0.3));
    const CoulombResult r = coulomb_fix(pg, 1e-8);
    const double reduction = norm(pg.a) / std::max(norm(r.pair.a), 1e-300);
    o.require(reduction >= 1e3, "pure-gauge reduction");
    double worst_ratio = 0;
    for (double amp : {0.1, 0.3, 0.5})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            GaugePair P = random_smooth_pair(g, seed, {1, amp, false, false});
            const CoulombResult c = coulomb_fix(P, 1e-8);
            worst_ratio = std::max(worst_ratio, c.coclosure_ratio);
        }
    o.require(worst_ratio <= 1e-6, "coclosure ratio");
    double d[2];
    for (int i = 0; i < 2; ++i) {
        const Grid gi(3, 16 << i, 2 * pi);
        d[i] = gauge_drift(random_gauge_map(gi, 1, 0.5), random_smooth_pair(gi, 1)).density;
    }
    o.require(in_band(d[0] / d[1], 1.6, 2.4), "gauge drift ratio");
    o.note("reduction %.1e, worst coclosure %.1e, drift %.2e -> %.2e (x%.2f)", reduction, worst_ratio, d[0], d[1], d[0] / d[1]);
    return o;
}

// ---- 9 ------------------------------------------------------------------------

Outcome lm() {
    Outcome o;
    LmParams p;
    p.m = 8;
    const double d1 = square_identity_defect(Grid(3, 32, 2 * pi), p, 3, 7);
    const double d2 = square_identity_defect(Grid(3, 64, 2 * pi), p, 3, 7);
    o.require(in_band(d1 / d2, 1.6, 2.4), "square identity ratio");
    const double sym = symmetry_defect(Grid(3, 32, 2 * pi), p, 3, 7);
    o.require(sym <= 1e-10, "symmetry");
    const GreensResidual gr = greens_discrete_residual(1.0, 128, 16.0);
    o.require(gr.relative <= 0.05, "Green's residual");
    const DecayReport dr = decay_check(1.0, 0.5, 10.0);
    o.require(dr.ok, "decay bound");
    o.note("square defect %.2e -> %.2e (x%.3f), symmetry %.1e, Green residual %.4f, decay C %.4f", d1, d2, d1 / d2, sym,
           gr.relative, dr.constant);
    return o;
}

// ---- 10 -----------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() == ".cfg") continue;
        std::ifstream f(e.path(), std::ios::binary);
        files.emplace_back(e.path().filename().string(), std::string(std::istreambuf_iterator<char>(f), {}));
    }
    std::sort(files.begin(), files.end());
    return files;
}

Outcome determinism() {
    Outcome o;
    struct Scenario {
        std::string command, config;
        bool seeded = true;
    };
    const std::vector<Scenario> scenarios{
        {"flow", "scenario = heat\nn = 12\nT = 0.02\n"},
        {"flow", "scenario = cs_gradient\nn = 8\nT = 0.1\n"},
        {"gauge-fix", "scenario = random\nn = 12\n"},
        {"frequency-profile", "source = pair\ndim = 3\nn = 32\nL = 4\n"},
        {"zform", "scenario = disk\nn = 64\nk = 3\n", false},
        {"lm-check", "n = 16\ngreen_n = 32\ntrials = 1\n"},
    };
    const fs::path root = fs::temp_directory_path() / ("gaugelab_acceptance_" + std::to_string(::getpid()));
    int compared = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        std::vector<std::pair<std::string, std::string>> runs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(rep));
            fs::remove_all(dir);
            fs::create_directories(dir);
            const fs::path cfg = dir / "run.cfg";
            std::ofstream(cfg) << scenarios[i].config;
            const std::string cfg_s = cfg.string(), dir_s = dir.string();
            std::vector<const char*> argv{"gaugelab", scenarios[i].command.c_str(), "--config", cfg_s.c_str(), "--out", dir_s.c_str()};
            if (scenarios[i].seeded) argv.insert(argv.end(), {"--seed", "11"});
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            o.require(code == 0 || code == 1, scenarios[i].command + " ran (" + err.str() + ")");
            runs[rep] = snapshot(dir);
        }
        o.require(!runs[0].empty() && runs[0] == runs[1], scenarios[i].command + " outputs identical");
        compared += static_cast<int>(runs[0].size());
    }
    fs::remove_all(root);
    o.note("%zu scenarios, %d files compared byte for byte", scenarios.size(), compared);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Bochner-Weitzenboeck residual refinement", bochner},
        {"heat flow monotonicity, energy quadrature, stopping time", heat},
        {"Chern-Simons flow drifts", chern_simons},
        {"frequency of homogeneous models", frequency_models},
        {"limit-value report", limit_values},
        {"scaling laws", scaling},
        {"holonomy and zero quantization", quantization},
        {"Coulomb gauge", coulomb},
        {"L_m square identity, symmetry, Green's function", lm},
        {"CLI determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s: %s | %s(%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
