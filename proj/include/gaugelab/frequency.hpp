/// Almgren frequency diagnostics h, H, N for gauge pairs and Z/2-harmonic 1-forms.
#pragma once

#include <string>
#include <vector>

#include "gaugelab/gauge.hpp"
#include "gaugelab/zharm.hpp"

namespace gaugelab {

class FrequencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ProfileMode { gauge_pair, one_form };

struct FrequencyProfile {
    Point center{0.0, 0.0, 0.0};
    int dim = 3;
    ProfileMode mode = ProfileMode::one_form;
    std::vector<double> r, h, H, N;
    std::vector<char> defined; ///< N is meaningful only where h > 0
};

/// Evenly spaced radii on [a, b].
std::vector<double> radii_between(double a, double b, int count);

/// h(r) = int over the sphere of |nu|^2 (quadrature of the interpolated density) and
/// H(r) = int over the ball of |grad nu|^2 (cellwise energy of the sign-aligned multilinear
/// interpolant with a one-cell smooth edge). Radii must lie in [4h, L/4], and in [8h, L/4]
/// when the ball meets the zero set.
FrequencyProfile profile(const CutBundleField& v, const Point& p, const std::vector<double>& radii);

/// Gauge-pair mode: h from |alpha|^2, H = int |grad_A alpha|^2 + 2 r^2 |alpha ^ alpha|^2 with r = P.r.
FrequencyProfile profile(const GaugePair& P, const Point& p, const std::vector<double>& radii);

/// max over interior radii of |h' - r^{-1}(dim - 1 + 2N) h| / (h / r), h' by central differences.
double dh_check(const FrequencyProfile& P);

/// max over s > r of max(0, exp(-kappa (s^2 - r^2)) N(r) - kappa (s^2 - r^2) - N(s)).
double monotonicity_check(const FrequencyProfile& P, double kappa);

/// max over s of |h(s)/h(r0) - (s/r0)^{dim-1} exp(2 int N/t)| / (h(s)/h(r0)), trapezoidal exponent.
double scaling_identity_check(const FrequencyProfile& P);

/// nu_lambda(x) = lambda (lambda^{dim-3} / h(lambda))^{1/2} nu(p + lambda (x - p)), sampled on the same grid;
/// normalized so that the unit sphere about p carries |nu_lambda|^2 mass 1.
CutBundleField rescale(const CutBundleField& v, const Point& p, double lambda);

/// Closed-form homogeneity defect max |R nu(psi_R x) - R^{1+N0} nu(x)| / (R^{1+N0} |nu(x)|).
double psi_scaling_check(const ModelZForm& M, double R);

struct LimitValue {
    std::string name;
    double R = 0.0;
    double measured = 0.0;
    double expected = 0.0;
    double relative() const { return std::abs(measured - expected) / std::abs(expected); }
};

struct LimitReport {
    std::vector<LimitValue> values;
    std::vector<double> pohozaev;     ///< |R int_S (nu_r^2 - |nu|^2/2) + (1/2) int_B |nu|^2| / ((1/2) int_B |nu|^2)
    std::vector<double> lemma73_margin; ///< 1 - int_B |nu|^2 / (R h(R)); nonnegative when the bound holds
    double worst() const;
};

/// Six limit quantities of a 3-D model sampled on g, compared with their closed forms at each R.
/// The model should be normalized so that h(1) = 1 (see normalized_model).
LimitReport limit_values_check(const ModelZForm& M, const Grid& g, const std::vector<double>& Rs);

struct NZero {
    double estimate = 0.0;
    double snapped = 0.0;
    double residual = 0.0;
    double fit_rms = 0.0;
    bool snappable = false;
};

/// Linear extrapolation of N to r = 0 over the smallest decade of defined radii, snapped to {0, 1/2, 1, ...}.
NZero n_at_zero(const FrequencyProfile& P);

}  // namespace gaugelab
