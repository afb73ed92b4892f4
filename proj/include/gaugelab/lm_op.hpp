/// The first-order operator L_m on pairs of (1-form, 0-form) blocks in su(2)-perp,
/// its square identity, and the massive Green's function e^{-mr} / (4 pi r).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gaugelab/grid.hpp"
#include "gaugelab/random_fields.hpp"

namespace gaugelab {

class LmError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// (a, a0): Su2 1-form and Su2 0-form.
struct VBlock {
    Su2Form a;
    Su2Form a0;
};

struct VPair {
    VBlock first;
    VBlock second;
};

struct LmParams {
    double m = 1.0;
    std::array<double, 3> e{1.0, 0.0, 0.0}; ///< constant unit 1-form
    Su2 tau = Su2::basis(2);                ///< |c(tau)| = 1, so ad_tau^2 = -1 on the complement
    bool printed_variant = false;            ///< second row m B' k1 + D k2 with B' = ad_tau (x) E(-1, +1, -1)
};

/// Throws LmError unless dim = 3, m > 0, |e| = 1 and |c(tau)| = 1 (tolerance 1e-9).
void validate(const Grid& g, const LmParams& p);

VPair zero_vpair(const Grid& g);
/// Remove the tau component of every value.
void project(VPair& k, const Su2& tau);
/// max over sites and components of |<tau, value>| / |tau|.
double max_tau_component(const VPair& k, const Su2& tau);

double pairing(const VPair& j, const VPair& k);
double norm_sq(const VPair& k);
/// Sum over all components of the forward-difference gradient energy.
double grad_norm_sq(const VPair& k);

/// Dirac-type block D(a, a0) = (curl_sym a - d a0, -d* a), curl_sym = (*d + d* *) / 2.
VBlock apply_d(const VBlock& b);
/// B(a, a0) = ([tau, e x a + e a0], -[tau, e . a]); the printed variant flips the sign of e x a.
VBlock apply_b(const VBlock& b, const std::array<double, 3>& e, const Su2& tau, bool printed_variant = false);

/// L_m k = (D k1 + m B k2, m B k1 - D k2), projected back to the complement of tau.
VPair apply_lm(const VPair& k, const LmParams& p);

/// Smooth band-limited VPair drawn from four seeds derived from `seed`, projected.
VPair random_vpair(const Grid& g, std::uint64_t seed, const Su2& tau, const SmoothFieldSpec& spec = {});

/// worst over trials of |‖L k‖^2 - ‖grad k‖^2 - m^2 ‖k‖^2| / ‖L k‖^2 (0 when ‖L k‖ = 0).
double square_identity_defect(const Grid& g, const LmParams& p, int trials, std::uint64_t seed,
                              const SmoothFieldSpec& spec = {});

/// worst over trials of |<L j, k> - <j, L k>| / (‖L j‖ ‖k‖ + ‖j‖ ‖L k‖).
double symmetry_defect(const Grid& g, const LmParams& p, int trials, std::uint64_t seed,
                       const SmoothFieldSpec& spec = {});

/// e^{-m |x - y|} / (4 pi |x - y|); throws LmError at x = y.
double greens_massive(const Point& y, double m, const Point& x);
/// |grad G| = G (1/r + m) at distance r > 0.
double greens_massive_gradient(double m, double r);

struct DecayReport {
    double constant = 0.0;    ///< C fitted at delta_min
    double worst_ratio = 0.0; ///< max over samples of (|G| + |dG|) / (C e^{-m delta / 2})
    bool ok = false;
};

/// Samples distances on [delta_min, delta_max].
DecayReport decay_check(double m, double delta_min, double delta_max, int samples = 200);

struct GreensResidual {
    double relative = 0.0; ///< ‖(-Delta_h + m^2) G‖ / ‖m^2 G‖ over the shell
    std::size_t points = 0;
};

/// Seven-point operator applied to exact samples of G at lattice points with |x - y| in [8h, L/8].
GreensResidual greens_discrete_residual(double m, int n, double L);

}  // namespace gaugelab
