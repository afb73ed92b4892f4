/// Connections on the trivial bundle, covariant calculus, the functional F,
/// gauge maps, Coulomb gauge fixing and the curvature scale.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gaugelab/grid.hpp"

namespace gaugelab {

/// Connection offset a-hat; the connection is the product connection plus this 1-form.
using Connection = Su2Form;

struct GaugePair {
    Connection a;
    Su2Form alpha;
    double r = 1.0;
};

GaugePair zero_pair(const Grid& g, double r = 1.0);

/// Per-site unit quaternions.
struct GaugeMap {
    Grid grid;
    std::vector<Quat> q;

    static GaugeMap identity(const Grid& g);
    static GaugeMap constant(const Grid& g, const Quat& q0);
    void renormalize();
};

/// Symmetric 2-tensor per site, row-major dim x dim. An empty field means zero.
struct RicciField {
    std::vector<std::array<double, 9>> values;
    bool is_zero() const { return values.empty(); }
};

/// Covariant derivative of a form: entry (site, axis j, component I).
struct Su2Tensor {
    Grid grid;
    int degree = 0;
    int ncomp = 1;
    std::vector<Su2> data;

    Su2Tensor(const Grid& g, int p);
    Su2& at(std::size_t s, int j, int c) { return data[(s * grid.dim + j) * ncomp + c]; }
    const Su2& at(std::size_t s, int j, int c) const { return data[(s * grid.dim + j) * ncomp + c]; }
};

double norm_sq(const Su2Tensor& t);

/// [a ^ w]: (.)_J = sum_{j in J} sign [a_j, w_{J\j}] for an Su2 1-form a.
Su2Form bracket_wedge(const Su2Form& a, const Su2Form& w);

/// Transpose of w -> [a ^ w] under the L2 pairing.
Su2Form bracket_wedge_transpose(const Su2Form& a, const Su2Form& eta);

/// Pointwise alpha ^ alpha = (1/2)[alpha ^ alpha] for an Su2 1-form.
Su2Form wedge_self(const Su2Form& alpha);

/// F = d a + (1/2)[a ^ a].
Su2Form curvature(const Connection& a);

Su2Form cov_d(const Connection& a, const Su2Form& w);
Su2Form cov_dstar(const Connection& a, const Su2Form& w);
Su2Tensor cov_grad(const Connection& a, const Su2Form& w);
Su2Form cov_grad_adjoint(const Connection& a, const Su2Tensor& t);

/// Integral of |F - alpha^alpha|^2 + |d_A alpha|^2 + |d_A* alpha|^2.
double big_f(const GaugePair& P);

/// Scale-weighted version with r^{-1}F - r alpha^alpha, equal to big_f when r = 1.
double big_f_scaled(const GaugePair& P);

/// Pointwise integrand of big_f.
ScalarField big_f_density(const GaugePair& P);

/// Ric applied to a 1-form: (Ric a)_k = sum_j Ric_kj a_j.
Su2Form apply_ricci(const RicciField& ric, const Su2Form& a);

/// Rough Laplacian plus the curvature term: grad_A^dag grad_A a + sum_j [F_jk, a_j] + Ric(a).
Su2Form q_a(const Connection& A, const Su2Form& a, const RicciField& ric = {});

/// d_A* d_A a + d_A d_A* a.
Su2Form covariant_hodge_laplacian(const Connection& A, const Su2Form& a);

/// Per-site symmetric tensor <a_i, a_j>, row-major dim x dim.
std::vector<std::array<double, 9>> outer_tensor(const Su2Form& a);

struct BochnerTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual() const { return std::abs(lhs - rhs); }
    double relative() const { return lhs != 0.0 ? residual() / std::abs(lhs) : residual(); }
};

/// Both sides of the weighted Bochner identity with r = P.r:
///   int f(|d_A a|^2 + |d_A* a|^2 + |r^{-1}F - r a^a|^2)
/// = (1/2) int (d*df)|a|^2 + int f(|grad_A a|^2 + r^2|a^a|^2 + r^{-2}|F|^2 + Ric<a a>)
///   - sum_ij int d_i f <a_j, (d_A a)_ij> + sum_j int d_j f <a_j, d_A* a>.
BochnerTerms bochner_terms(const GaugePair& P, const ScalarField& f, const RicciField& ric = {});
double bochner_residual(const GaugePair& P, const ScalarField& f, const RicciField& ric = {});

/// Link action: with U_j(x) = exp(h a_j(x)), a_j -> log(g(x) U_j(x) g(x+e_j)^{-1}) / h,
/// alpha -> Ad_g alpha. This is Ad_g a + g d(g^{-1}) to first order in h.
GaugePair gauge_apply(const GaugeMap& g, const GaugePair& P);

struct GaugeDrift {
    double reference = 0.0;  ///< F(P)
    double integrated = 0.0; ///< |F(gP) - F(P)| / F(P)
    double density = 0.0;    ///< int |f(gP) - f(P)| / F(P) for the pointwise integrand f
};

/// How far the discrete F is from gauge invariant under g.
GaugeDrift gauge_drift(const GaugeMap& g, const GaugePair& P);

/// Apply Ad_g pointwise to a form of any degree.
Su2Form adjoint_apply(const GaugeMap& g, const Su2Form& w);

/// The connection offset gauge-equivalent to zero under g.
Connection pure_gauge(const GaugeMap& g);

struct CoulombResult {
    GaugeMap g;
    GaugePair pair;
    double coclosure_ratio = 0.0;
    double kappa_ratio = 0.0;
    int iterations = 0;
    bool converged = false;
};

class CoulombError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Minimize (1/2)||a^g||^2 over gauge maps by preconditioned descent until
/// ||d* a|| <= tol ||a||, or until ||a|| falls to 1e-14 of its input value (then
/// coclosure_ratio is ||d* a|| over the input norm). Throws CoulombError on non-convergence.
CoulombResult coulomb_fix(const GaugePair& P, double tol, int max_iter = 500);

/// Largest r in [4h, L/4] with int_{B_r}|F|^2 <= (1/100) kappa^{-2} r^{-1}.
double r_diamond(const Connection& A, const Point& p, double kappa_u = 10.0);

}  // namespace gaugelab
