#include "gaugelab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "gaugelab/flows.hpp"
#include "gaugelab/frequency.hpp"
#include "gaugelab/lm_op.hpp"
#include "gaugelab/random_fields.hpp"
#include "gaugelab/zharm.hpp"

namespace gaugelab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

enum class Kind { integer, real, text, boolean, vec3 };

struct KeySpec {
    std::string def;
    Kind kind = Kind::real;
    double lo = -INFINITY;
    double hi = INFINITY;
    std::vector<std::string> choices{};
};

using Schema = std::map<std::string, KeySpec>;

const std::string kTwoPi = "6.283185307179586";

/// Effective configuration for one command, validated against its schema.
class Config {
  public:
    Config(const Schema& schema, ConfigMap values) : schema_(schema), values_(std::move(values)) {
        for (const auto& [key, value] : values_) {
            if (!schema_.count(key)) throw ConfigError(key, "unknown key for this command");
            check(key, value);
        }
        for (const auto& [key, spec] : schema_)
            if (!values_.count(key)) values_[key] = spec.def;
    }

    const ConfigMap& values() const { return values_; }

    long long integer(const std::string& k) const { return std::stoll(values_.at(k)); }
    double real(const std::string& k) const { return std::stod(values_.at(k)); }
    const std::string& text(const std::string& k) const { return values_.at(k); }
    bool boolean(const std::string& k) const { return values_.at(k) == "true"; }
    std::array<double, 3> vec3(const std::string& k) const { return parse_vec3(k, values_.at(k)); }

    [[noreturn]] static void fail(const std::string& key, const std::string& msg) { throw ConfigError(key, msg); }

  private:
    static std::array<double, 3> parse_vec3(const std::string& key, const std::string& v) {
        std::array<double, 3> out{};
        std::stringstream ss(v);
        std::string part;
        int i = 0;
        while (std::getline(ss, part, ',')) {
            if (i >= 3) fail(key, "expected three comma-separated numbers");
            out[i++] = parse_real(key, trim(part));
        }
        if (i != 3) fail(key, "expected three comma-separated numbers");
        return out;
    }

    static double parse_real(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + v + "'");
        }
    }

    void check(const std::string& key, const std::string& v) const {
        const KeySpec& s = schema_.at(key);
        switch (s.kind) {
            case Kind::integer: {
                std::size_t used = 0;
                long long x = 0;
                try {
                    x = std::stoll(v, &used);
                } catch (const std::exception&) {
                    fail(key, "expected an integer, got '" + v + "'");
                }
                if (used != v.size()) fail(key, "expected an integer, got '" + v + "'");
                if (x < s.lo || x > s.hi) fail(key, "out of range");
                break;
            }
            case Kind::real: {
                const double x = parse_real(key, v);
                if (x < s.lo || x > s.hi) fail(key, "out of range");
                break;
            }
            case Kind::text:
                if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end())
                    fail(key, "unsupported value '" + v + "'");
                break;
            case Kind::boolean:
                if (v != "true" && v != "false") fail(key, "expected true or false");
                break;
            case Kind::vec3:
                parse_vec3(key, v);
                break;
        }
    }

    const Schema& schema_;
    ConfigMap values_;
};

KeySpec integer(long long def, double lo, double hi) { return {std::to_string(def), Kind::integer, lo, hi}; }
KeySpec real(const std::string& def, double lo, double hi) { return {def, Kind::real, lo, hi}; }
KeySpec choice(const std::string& def, std::vector<std::string> c) { return {def, Kind::text, 0, 0, std::move(c)}; }
KeySpec flag(bool def) { return {def ? "true" : "false", Kind::boolean}; }
KeySpec vec3(const std::string& def) { return {def, Kind::vec3}; }

/// Where results go and how each file is stamped.
struct Emitter {
    fs::path dir;
    std::string header;
    std::vector<std::string> written;

    void write(const std::string& name, const std::string& body) {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << body;
        written.push_back(p.string());
    }
    void csv(const std::string& name, const std::string& rows) { write(name, "# " + header + "\n" + rows); }
    void json_file(const std::string& name, json j) {
        j["header"] = header;
        write(name, j.dump(2) + "\n");
    }
    void svg(const std::string& name, const std::string& body) { write(name, "<!-- " + header + " -->\n" + body); }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Grid grid_from(const Config& c) { return Grid(static_cast<int>(c.integer("dim")), static_cast<int>(c.integer("n")), c.real("L")); }

// ---- verify-identities ---------------------------------------------------------

Schema verify_schema() {
    return {{"n", integer(16, 4, 256)},
            {"dim", integer(3, 3, 3)},
            {"L", real(kTwoPi, 1e-6, 1e6)},
            {"seed", integer(1, 0, 9.2e18)},
            {"pairs", integer(5, 1, 100)},
            {"amplitude", real("0.5", 0, 10)},
            {"lm_n", integer(32, 8, 128)},
            {"lm_m", real("8", 1e-6, 1e6)},
            {"lm_trials", integer(3, 1, 100)},
            {"lm_seed", integer(7, 0, 9.2e18)},
            {"ratio_min", real("1.6", 0, 100)},
            {"ratio_max", real("2.4", 0, 100)},
            {"adjoint_tol", real("1e-12", 0, 1)},
            {"fault", choice("none", {"none", "broken_stencil"})}};
}

int cmd_verify(const Config& c, Emitter& em) {
    const int n = static_cast<int>(c.integer("n"));
    const double L = c.real("L");
    const double lo = c.real("ratio_min"), hi = c.real("ratio_max");
    const bool fault = c.text("fault") == "broken_stencil";
    json ids = json::array();
    bool all = true;
    auto ladder = [&](const std::string& name, std::uint64_t seed, int n0, const std::function<double(const Grid&)>& defect) {
        const Grid g1(3, n0, L), g2(3, 2 * n0, L);
        const double d1 = defect(g1), d2 = defect(g2);
        const double ratio = d2 > 0 ? d1 / d2 : 0.0;
        const bool pass = ratio >= lo && ratio <= hi;
        all = all && pass;
        ids.push_back({{"name", name}, {"seed", seed}, {"n", {n0, 2 * n0}}, {"defect", {d1, d2}}, {"ratio", ratio}, {"pass", pass}});
    };
    const SmoothFieldSpec spec{1, c.real("amplitude"), false, false};
    for (long long i = 0; i < c.integer("pairs"); ++i) {
        const std::uint64_t seed = static_cast<std::uint64_t>(c.integer("seed") + i);
        ladder("bochner", seed, n, [&](const Grid& g) {
            const GaugePair P = random_smooth_pair(g, seed, spec);
            const ScalarField one = sample_scalar(g, [](const Point&) { return 1.0; });
            BochnerTerms t = bochner_terms(P, one);
            // Fault fixture: a 1% error in the right-hand side, which does not refine away.
            if (fault) t.rhs *= 1.01;
            return t.relative();
        });
    }
    LmParams lp;
    lp.m = c.real("lm_m");
    const auto lm_seed = static_cast<std::uint64_t>(c.integer("lm_seed"));
    ladder("lm_square_identity", lm_seed, static_cast<int>(c.integer("lm_n")),
           [&](const Grid& g) { return square_identity_defect(g, lp, static_cast<int>(c.integer("lm_trials")), lm_seed); });
    {
        const Grid g(3, n, L);
        const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
        const Su2Form a = random_smooth_form(g, 1, seed, spec);
        const Su2Form b = random_smooth_form(g, 2, seed + 1, spec);
        const Connection A = random_smooth_form(g, 1, seed + 2, spec);
        const Su2Form da = extder(a), dAa = cov_d(A, a);
        const double flat = std::abs(pairing(da, b) - pairing(a, coder(b))) / (norm(da) * norm(b));
        const double cov = std::abs(pairing(dAa, b) - pairing(a, cov_dstar(A, b))) / (norm(dAa) * norm(b));
        const double tol = c.real("adjoint_tol");
        for (const auto& [name, d] : {std::pair{"adjoint_flat", flat}, std::pair{"adjoint_covariant", cov}}) {
            const bool pass = d <= tol;
            all = all && pass;
            ids.push_back({{"name", name}, {"n", {n}}, {"defect", {d}}, {"tolerance", tol}, {"pass", pass}});
        }
    }
    em.json_file("identities.json", {{"identities", ids}, {"pass", all}, {"ratio_band", {lo, hi}}});
    return all ? 0 : 1;
}

// ---- flow ----------------------------------------------------------------------

Schema flow_schema() {
    return {{"scenario", choice("heat_eigenmode", {"heat_eigenmode", "heat", "cs_gradient", "cs_hamiltonian", "zero"})},
            {"dim", integer(3, 2, 3)},
            {"n", integer(16, 4, 256)},
            {"L", real(kTwoPi, 1e-6, 1e6)},
            {"T", real("0", 0, 1e6)},
            {"dt", real("0", 0, 1e6)},
            {"seed", integer(1, 0, 9.2e18)},
            {"amplitude", real("0", 0, 10)},
            {"max_mode", integer(1, 1, 8)},
            {"r", real("1", 1e-9, 1e9)},
            {"preserve_coclosure", flag(true)}};
}

std::string history_csv(const FlowState& S) {
    std::string out = "t,norm_a_sq,energy,q_norm_sq,re_cs,im_cs,coclosure_energy\n";
    for (const HistoryRow& r : S.history)
        out += num(r.t) + "," + num(r.norm_a_sq) + "," + num(r.energy) + "," + num(r.q_norm_sq) + "," + num(r.re_cs) + "," +
               num(r.im_cs) + "," + num(r.coclosure_energy) + "\n";
    return out;
}

int cmd_flow(const Config& c, Emitter& em) {
    const Grid g = grid_from(c);
    const std::string sc = c.text("scenario");
    const bool cs_kind = sc.rfind("cs_", 0) == 0;
    if (cs_kind && g.dim != 3) Config::fail("dim", "Chern-Simons flows need dim = 3");
    const double T = c.real("T") > 0 ? c.real("T") : (cs_kind ? 1.0 : 0.05);
    const double amp = c.real("amplitude") > 0 ? c.real("amplitude") : (cs_kind ? 0.1 : 0.5);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    const SmoothFieldSpec spec{static_cast<int>(c.integer("max_mode")), amp, false, cs_kind};
    json summary{{"scenario", sc}, {"T", T}};
    FlowState S;
    if (cs_kind) {
        const GaugePair P = random_smooth_pair(g, seed, spec, c.real("r"));
        const CsOptions opt{Integrator::euler, c.boolean("preserve_coclosure")};
        const CsFlowKind kind = sc == "cs_gradient" ? CsFlowKind::gradient : CsFlowKind::hamiltonian;
        S = run_cs(P, kind, T, c.real("dt"), opt);
        bool monotone = true;
        for (std::size_t i = 1; i < S.history.size(); ++i)
            monotone = monotone && S.history[i].re_cs <= S.history[i - 1].re_cs + 1e-12 * std::abs(S.history[i - 1].re_cs);
        const HistoryRow &h0 = S.history.front(), &h1 = S.history.back();
        const double scale = std::hypot(h0.re_cs, h0.im_cs);
        summary["re_cs_non_increasing"] = monotone;
        summary["im_cs_drift_relative"] = scale > 0 ? std::abs(h1.im_cs - h0.im_cs) / scale : 0.0;
        summary["coclosure_drift_relative"] =
            h0.coclosure_energy > 0 ? std::abs(h1.coclosure_energy - h0.coclosure_energy) / h0.coclosure_energy : 0.0;
    } else {
        const Connection A(g, 1);
        Su2Form a0(g, 1);
        if (sc == "heat_eigenmode") {
            const int comp = 1;
            for (std::size_t s = 0; s < g.sites(); ++s)
                a0.at(s, comp) = std::sin(2 * std::numbers::pi * g.position(s)[0] / g.L) * Su2::basis(0);
        } else if (sc == "heat") {
            const GaugePair P = random_smooth_pair(g, seed, spec);
            S = run_heat(P.a, P.alpha, T, c.real("dt"));
        }
        if (sc != "heat") S = run_heat(A, a0, T, c.real("dt"));
        if (sc == "heat_eigenmode") {
            const double lam = 4.0 / (g.h() * g.h()) * std::pow(std::sin(std::numbers::pi * g.h() / g.L), 2);
            const double rate = -std::log(S.history.back().norm_a_sq / S.history.front().norm_a_sq) / (2.0 * S.t);
            summary["lambda_h"] = lam;
            summary["decay_constant"] = rate;
            summary["decay_relative_error"] = std::abs(rate - lam) / lam;
        }
    }
    summary["steps"] = S.history.size() - 1;
    summary["dt"] = S.dt;
    em.csv("history.csv", history_csv(S));
    em.json_file("summary.json", summary);
    return 0;
}

// ---- frequency-profile ---------------------------------------------------------

Schema frequency_schema() {
    return {{"source", choice("model", {"model", "pair"})},
            {"dim", integer(2, 2, 3)},
            {"n", integer(128, 8, 512)},
            {"L", real("2", 1e-6, 1e6)},
            {"k", integer(1, 1, 12)},
            {"c", real("1", 1e-12, 1e12)},
            {"rmin", real("0", 0, 1e6)},
            {"rmax", real("0", 0, 1e6)},
            {"count", integer(9, 2, 1000)},
            {"kappa", real("0", 0, 1e6)},
            {"seed", integer(1, 0, 9.2e18)},
            {"amplitude", real("0.5", 0, 10)}};
}

json n0_json(const NZero& z) {
    return {{"estimate", z.estimate}, {"snapped", z.snapped}, {"residual", z.residual}, {"fit_rms", z.fit_rms}, {"snappable", z.snappable}};
}

std::string profile_csv(const FrequencyProfile& P) {
    std::string out = "r,h,H,N,defined\n";
    for (std::size_t i = 0; i < P.r.size(); ++i)
        out += num(P.r[i]) + "," + num(P.h[i]) + "," + num(P.H[i]) + "," + num(P.N[i]) + "," + (P.defined[i] ? "1" : "0") + "\n";
    return out;
}

Point cell_center(const Grid& g) {
    const double h = g.h();
    Point p{g.L / 2 + h / 2, g.L / 2 + h / 2, 0.0};
    if (g.dim == 3) p[2] = g.L / 2;
    return p;
}

int cmd_frequency(const Config& c, Emitter& em) {
    const Grid g = grid_from(c);
    const double h = g.h();
    const bool model = c.text("source") == "model";
    const double rmin = c.real("rmin") > 0 ? c.real("rmin") : std::max(0.1 * g.L, (model ? 8 : 4) * h);
    const double rmax = c.real("rmax") > 0 ? c.real("rmax") : 0.2 * g.L;
    if (!(rmax > rmin)) Config::fail("rmax", "must exceed rmin");
    const auto radii = radii_between(rmin, rmax, static_cast<int>(c.integer("count")));
    json summary;
    FrequencyProfile P;
    if (model) {
        const Point p = cell_center(g);
        const ModelZForm M{static_cast<int>(c.integer("k")), c.real("c"), p, g.dim};
        const CutBundleField v = sample_model(g, M);
        P = profile(v, p, radii);
        summary["expected_N"] = 0.5 * M.k;
        const FrequencyProfile near = profile(v, p, radii_between(8 * h, g.L / 4, 12));
        summary["n_at_zero"] = n0_json(n_at_zero(near));
    } else {
        const GaugePair pair = random_smooth_pair(g, static_cast<std::uint64_t>(c.integer("seed")), {1, c.real("amplitude"), false, false});
        Point p{g.L / 2, g.L / 2, g.dim == 3 ? g.L / 2 : 0.0};
        P = profile(pair, p, radii);
    }
    summary["monotonicity_violation"] = monotonicity_check(P, c.real("kappa"));
    summary["dh_defect"] = P.r.size() >= 3 ? dh_check(P) : 0.0;
    summary["scaling_identity_defect"] = scaling_identity_check(P);
    summary["source"] = c.text("source");
    em.csv("profile.csv", profile_csv(P));
    em.json_file("summary.json", summary);
    return 0;
}

// ---- zform ---------------------------------------------------------------------

Schema zform_schema() {
    return {{"scenario", choice("model", {"model", "torus", "disk"})},
            {"dim", integer(2, 2, 3)},
            {"n", integer(128, 16, 512)},
            {"L", real("2", 1e-6, 1e6)},
            {"k", integer(1, 1, 12)},
            {"c", real("1", 1e-12, 1e12)},
            {"seeds", integer(8, 1, 200)},
            {"step", real("0", 0, 1e6)},
            {"max_len", real("0", 0, 1e6)}};
}

/// Directions along which the leaves of ker(Re(z^{k/2} dz)) run into the zero.
std::vector<Point> separatrix_seeds(const Point& p, int k, double radius) {
    std::vector<Point> out;
    for (int j = 0; j < k + 2; ++j) {
        const double th = (std::numbers::pi + 2 * std::numbers::pi * j) / (k + 2);
        out.push_back({p[0] + radius * std::cos(th), p[1] + radius * std::sin(th), 0.0});
    }
    return out;
}

int cmd_zform(const Config& c, Emitter& em) {
    const Grid g = grid_from(c);
    const std::string sc = c.text("scenario");
    if (sc != "model" && g.dim != 2) Config::fail("dim", "quadratic differential scenarios need dim = 2");
    const int k = static_cast<int>(c.integer("k"));
    const double h = g.h();
    const double step = c.real("step") > 0 ? c.real("step") : 0.0;
    const double max_len = c.real("max_len") > 0 ? c.real("max_len") : 0.45 * g.L;
    const Point p = cell_center(g);
    json summary{{"scenario", sc}};
    std::optional<CutBundleField> field;
    std::vector<Point> seeds;
    if (sc == "model") {
        const ModelZForm M{k, c.real("c"), p, g.dim};
        field = sample_model(g, M);
        const FrequencyProfile P = profile(*field, p, radii_between(8 * h, g.L / 4, 12));
        const NZero z = n_at_zero(P);
        summary["N0"] = n0_json(z);
        summary["N0_snapped"] = z.snapped;
        std::array<int, 3> centre{g.n / 2, g.n / 2, g.dim == 3 ? g.n / 2 : 0};
        summary["holonomy"] = holonomy(*field, square_loop(g, centre, 4));
        em.csv("profile.csv", profile_csv(P));
        if (g.dim == 2) seeds = separatrix_seeds(p, k, 0.3 * g.L / 2);
    } else {
        QuadDiff q;
        q.surface = sc == "torus" ? Surface::torus : Surface::disk;
        q.c = {c.real("c"), 0.0};
        q.k = k;
        q.center = p;
        QdOutput out = qd_pipeline(g, q);
        int mult = 0;
        json zeros = json::array();
        for (const auto& [z, m] : out.zeros) {
            mult += m;
            zeros.push_back({{"x", z[0]}, {"y", z[1]}, {"multiplicity", m}});
        }
        summary["zeros"] = zeros;
        summary["multiplicity_sum"] = mult;
        summary["cauchy_riemann"] = out.cauchy_riemann;
        summary["square_defect"] = out.square_defect;
        field = out.nu;
        if (sc == "torus") {
            const int m = static_cast<int>(c.integer("seeds"));
            for (int i = 0; i < m; ++i) seeds.push_back({g.L * (i + 0.5) / m, g.L * 0.5, 0.0});
            summary["transversal_measure"] = transverse_measure(*field, {{0.1 * g.L, 0.3 * g.L, 0.0}, {0.9 * g.L, 0.3 * g.L, 0.0}});
        } else {
            seeds = separatrix_seeds(p, k, 0.3 * g.L / 2);
        }
    }
    if (!seeds.empty()) {
        const FoliationOutput f = foliation_trace(*field, seeds, step, max_len);
        summary["leaves"] = f.leaves.size();
        json fj = json::parse(foliation_json(f));
        fj["header"] = em.header;
        em.write("foliation.json", fj.dump(2) + "\n");
        em.svg("foliation.svg", foliation_svg(f));
    }
    em.json_file("summary.json", summary);
    return 0;
}

// ---- gauge-fix -----------------------------------------------------------------

Schema gauge_schema() {
    return {{"scenario", choice("pure_gauge", {"pure_gauge", "random"})},
            {"dim", integer(3, 2, 3)},
            {"n", integer(16, 4, 128)},
            {"L", real(kTwoPi, 1e-6, 1e6)},
            {"seed", integer(1, 0, 9.2e18)},
            {"amplitude", real("0.3", 0, 10)},
            {"tol", real("1e-8", 1e-15, 1)},
            {"max_iter", integer(500, 1, 100000)}};
}

int cmd_gauge(const Config& c, Emitter& em) {
    const Grid g = grid_from(c);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    const double amp = c.real("amplitude");
    GaugePair P = zero_pair(g);
    if (c.text("scenario") == "pure_gauge") P.a = pure_gauge(random_gauge_map(g, seed, amp));
    else P = random_smooth_pair(g, seed, {1, amp, false, false});
    const double in = norm(P.a);
    const CoulombResult r = coulomb_fix(P, c.real("tol"), static_cast<int>(c.integer("max_iter")));
    const double outn = norm(r.pair.a);
    json summary{{"scenario", c.text("scenario")},
                 {"input_norm", in},
                 {"output_norm", outn},
                 {"reduction", outn > 0 ? in / outn : INFINITY},
                 {"coclosure_ratio", r.coclosure_ratio},
                 {"kappa_ratio", r.kappa_ratio},
                 {"iterations", r.iterations},
                 {"converged", r.converged},
                 {"big_f_before", big_f(P)},
                 {"big_f_after", big_f(r.pair)}};
    if (!std::isfinite(summary["reduction"].get<double>())) summary["reduction"] = nullptr;
    em.json_file("summary.json", summary);
    return 0;
}

// ---- lm-check ------------------------------------------------------------------

Schema lm_schema() {
    return {{"n", integer(32, 8, 128)},
            {"dim", integer(3, 3, 3)},
            {"L", real(kTwoPi, 1e-6, 1e6)},
            {"m", real("8", 1e-6, 1e6)},
            {"seed", integer(7, 0, 9.2e18)},
            {"trials", integer(3, 1, 100)},
            {"e", vec3("1,0,0")},
            {"tau", vec3("0,0,1")},
            {"variant", choice("corrected", {"corrected", "printed"})},
            {"green_n", integer(128, 16, 1024)},
            {"green_L", real("16", 1e-6, 1e6)},
            {"green_m", real("1", 1e-6, 1e6)},
            {"decay_min", real("0.5", 1e-9, 1e6)},
            {"decay_max", real("10", 1e-9, 1e6)}};
}

int cmd_lm(const Config& c, Emitter& em) {
    LmParams p;
    p.m = c.real("m");
    p.e = c.vec3("e");
    p.tau = Su2(c.vec3("tau")[0], c.vec3("tau")[1], c.vec3("tau")[2]);
    p.printed_variant = c.text("variant") == "printed";
    const int n = static_cast<int>(c.integer("n"));
    const Grid g1(3, n, c.real("L")), g2(3, 2 * n, c.real("L"));
    try {
        validate(g1, p);
    } catch (const LmError& e) {
        throw ConfigError(std::string(e.what()).find("tau") != std::string::npos ? "tau" : "e", e.what());
    }
    if (!(c.real("decay_max") > c.real("decay_min"))) Config::fail("decay_max", "must exceed decay_min");
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    const int trials = static_cast<int>(c.integer("trials"));
    const double d1 = square_identity_defect(g1, p, trials, seed), d2 = square_identity_defect(g2, p, trials, seed);
    const GreensResidual gr = greens_discrete_residual(c.real("green_m"), static_cast<int>(c.integer("green_n")), c.real("green_L"));
    const DecayReport dr = decay_check(c.real("green_m"), c.real("decay_min"), c.real("decay_max"));
    const double ratio = d1 / d2, sym = symmetry_defect(g1, p, trials, seed);
    const bool ratio_ok = ratio >= 1.6 && ratio <= 2.4, sym_ok = sym <= 1e-10, green_ok = gr.relative <= 0.05;
    const bool all = ratio_ok && sym_ok && green_ok && dr.ok;
    json report{{"variant", c.text("variant")},
                {"square_identity", {{"n", {n, 2 * n}}, {"defect", {d1, d2}}, {"ratio", ratio}, {"pass", ratio_ok}}},
                {"symmetry", {{"defect", sym}, {"pass", sym_ok}}},
                {"greens_residual", {{"relative", gr.relative}, {"points", gr.points}, {"pass", green_ok}}},
                {"decay", {{"constant", dr.constant}, {"worst_ratio", dr.worst_ratio}, {"ok", dr.ok}}},
                {"pass", all}};
    em.json_file("lm.json", report);
    return all ? 0 : 1;
}

struct Command {
    std::string name;
    std::string help;
    Schema (*schema)();
    int (*run)(const Config&, Emitter&);
};

const std::vector<Command>& commands() {
    static const std::vector<Command> cmds{
        {"verify-identities", "Bochner, adjointness and L_m square identities over a refinement ladder", verify_schema, cmd_verify},
        {"flow", "heat or Chern-Simons flow history", flow_schema, cmd_flow},
        {"frequency-profile", "h, H, N profile of a model form or random pair", frequency_schema, cmd_frequency},
        {"zform", "Z/2-harmonic model or quadratic differential with foliation output", zform_schema, cmd_zform},
        {"gauge-fix", "Coulomb gauge fixing report", gauge_schema, cmd_gauge},
        {"lm-check", "L_m square identity, symmetry and Green's function report", lm_schema, cmd_lm}};
    return cmds;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') {
        json j;
        try {
            j = json::parse(t);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("malformed JSON config: ") + e.what());
        }
        for (const auto& [key, v] : j.items()) {
            if (v.is_string()) out[key] = v.get<std::string>();
            else if (v.is_boolean()) out[key] = v.get<bool>() ? "true" : "false";
            else if (v.is_number_integer()) out[key] = std::to_string(v.get<long long>());
            else if (v.is_number()) out[key] = num(v.get<double>());
            else if (v.is_array() && v.size() == 3) {
                std::string s;
                for (std::size_t i = 0; i < 3; ++i) {
                    if (!v[i].is_number()) throw ConfigError(key, "array entries must be numbers");
                    s += (i ? "," : "") + num(v[i].get<double>());
                }
                out[key] = s;
            } else
                throw ConfigError(key, "unsupported JSON value");
        }
        return out;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        if (out.count(key)) throw ConfigError(key, "duplicate key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::string config_hash(const std::string& command, const ConfigMap& cfg) {
    std::uint64_t hsh = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char ch : s) {
            hsh ^= ch;
            hsh *= 1099511628211ULL;
        }
    };
    feed(command + "\n");
    for (const auto& [k, v] : cfg) feed(k + "=" + v + "\n");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hsh));
    return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"gaugelab: discrete checks for PSL(2;C) connection analysis"};
    app.require_subcommand(1);
    struct Flags {
        std::string config, out_dir;
        std::optional<std::uint64_t> seed;
        std::optional<long long> n, dim;
    };
    std::vector<Flags> flags(commands().size());
    for (std::size_t i = 0; i < commands().size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands()[i].name, commands()[i].help);
        sub->add_option("--config", flags[i].config, "key = value or JSON config file");
        sub->add_option("--out", flags[i].out_dir, "output directory");
        sub->add_option("--seed", flags[i].seed, "random seed (overrides config)");
        sub->add_option("--n", flags[i].n, "grid points per axis (overrides config)");
        sub->add_option("--dim", flags[i].dim, "dimension (overrides config)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }
    for (std::size_t i = 0; i < commands().size(); ++i) {
        const Command& cmd = commands()[i];
        if (!app.got_subcommand(cmd.name)) continue;
        const Flags& f = flags[i];
        const Schema schema = cmd.schema();
        std::optional<Config> cfg;
        try {
            ConfigMap values = f.config.empty() ? ConfigMap{} : parse_config_text(read_file(f.config));
            auto override_key = [&](const std::string& key, const std::string& v) {
                if (!schema.count(key)) throw ConfigError(key, "not accepted by " + cmd.name);
                values[key] = v;
            };
            if (f.seed) override_key("seed", std::to_string(*f.seed));
            if (f.n) override_key("n", std::to_string(*f.n));
            if (f.dim) override_key("dim", std::to_string(*f.dim));
            cfg.emplace(schema, std::move(values));
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return 2;
        }
        std::string dir = f.out_dir;
        if (dir.empty()) {
            const char* env = std::getenv("GAUGELAB_OUT");
            dir = env && *env ? env : "out";
        }
        Emitter em{dir, std::string("gaugelab ") + kVersion + " command=" + cmd.name + " config=" + config_hash(cmd.name, cfg->values()), {}};
        try {
            const int code = cmd.run(*cfg, em);
            for (const std::string& p : em.written) out << p << "\n";
            return code;
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            err << cmd.name << " failed: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}

}  // namespace gaugelab::cli
