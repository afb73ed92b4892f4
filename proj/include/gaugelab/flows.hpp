/// Heat flow for Su2 1-forms with a fixed connection, its Dirichlet ball variant,
/// and the Chern-Simons gradient and Hamiltonian flows.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "gaugelab/gauge.hpp"

namespace gaugelab {

struct HistoryRow {
    double t = 0.0;
    double norm_a_sq = 0.0;
    double energy = 0.0;
    double q_norm_sq = 0.0;
    double re_cs = 0.0;
    double im_cs = 0.0;
    double coclosure_energy = 0.0;
};

enum class Integrator { euler, rk4 };

/// For the heat flow, pair.a is the fixed connection and pair.alpha the evolving 1-form.
struct FlowState {
    GaugePair pair;
    double t = 0.0;
    double dt = 0.0;
    std::vector<HistoryRow> history;
    /// Running left-rectangle sum of ||q||^2 dt, so n(t) = integral / t.
    double q_integral = 0.0;

    double n_of_t() const { return t > 0 ? q_integral / t : 0.0; }
};

class FlowError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CsValue {
    double re = 0.0;
    double im = 0.0;
};

// ---- heat flow ----------------------------------------------------------------

/// E = (1/2)(||d_A a||^2 + ||d_A* a||^2).
double heat_energy(const Connection& A, const Su2Form& a);

/// Stable explicit step bound h^2 / (2 dim).
double heat_dt_limit(const Grid& g);

/// Start a heat flow with dt (0 means the default h^2/8) and record the t = 0 row.
FlowState heat_start(const Connection& A, const Su2Form& a0, double dt = 0.0);

/// a <- a - dt q(a) with q = d_A* d_A + d_A d_A*. Throws FlowError if ||a|| grows.
void heat_step(FlowState& S);

/// Integrate to time T (the last step is shortened to land on T).
FlowState run_heat(const Connection& A, const Su2Form& a0, double T, double dt = 0.0);

struct StoppingResult {
    double s = 0.0;
    Su2Form a_s;
    double q_norm_sq = 0.0;       ///< ||q(a_s)||^2
    double bound = 0.0;           ///< E(0) / t_target
    double n_s = 0.0;             ///< n(s)
    double displacement_sq = 0.0; ///< ||a_s - a_0||^2
    bool displacement_ok = false; ///< displacement_sq <= s^2 n(s) (1 + 1e-12)
};

/// First sampled s in (0, t_target] with ||q(a_s)||^2 <= E(0)/t_target.
StoppingResult stopping_time(const Connection& A, const Su2Form& a0, double t_target, double dt = 0.0);

/// Ball domain for the Dirichlet heat flow: interior sites evolve, collar sites are frozen.
struct BallDomain {
    std::vector<char> interior;
    std::vector<char> collar;
    static BallDomain make(const Grid& g, const Point& center, double radius);
};

/// Sum of |d_A a|^2 + |d_A* a|^2 over interior and collar sites.
double ball_energy(const Connection& A, const Su2Form& a, const BallDomain& D);

/// Interior update a_I <- a_I - dt q(a)_I; collar and exterior untouched.
/// Appends a row whose energy column is the ball energy and whose q column is ||q||^2 on the interior.
void dirichlet_heat_step(FlowState& S, const BallDomain& D);

FlowState dirichlet_heat_start(const Connection& A, const Su2Form& a0, const BallDomain& D, double dt = 0.0);

// ---- Chern-Simons ---------------------------------------------------------------

/// Complexified connection A + i alpha.
Su2CForm complexify(const GaugePair& P);

/// CS = (1/2) int tr(A ^ dA) + (1/3) int tr(A ^ A ^ A) with the cubical cup product
/// (A_i(x) paired with (*dA)_i(x + e_i)) in the quadratic term. Relative to the trivialization.
CsValue cs(const GaugePair& P);

/// Complex gradient G with dCS = h^3 sum tr(G_i dA_i).
Su2CForm cs_gradient(const GaugePair& P);

/// Descent of Re CS: a' = Re G, alpha' = -Im G. Re CS decreases at rate ||G||^2.
GaugePair cs_gradient_velocity(const GaugePair& P);

/// Descent of Im CS, which conserves Re CS: a' = Im G, alpha' = Re G.
GaugePair cs_hamiltonian_velocity(const GaugePair& P);

/// Default first-order step h/8.
double cs_default_dt(const Grid& g);

enum class CsFlowKind { gradient, hamiltonian };

struct CsOptions {
    Integrator integrator = Integrator::euler;
    /// Remove the velocity component along imaginary gauge directions
    /// (delta a = [w, alpha], delta alpha = d_A w), so d_A* alpha is conserved by the
    /// time-continuous flow exactly rather than up to O(h).
    bool preserve_coclosure = true;
};

/// Time derivative of d_A* alpha along the velocity V: d_A* V_alpha + sum_j [alpha_j, V_a,j].
Su2Form coclosure_constraint(const GaugePair& P, const GaugePair& V);

/// Orthogonal projection of V onto the kernel of coclosure_constraint(P, .).
GaugePair project_coclosure(const GaugePair& P, const GaugePair& V);

GaugePair cs_velocity(const GaugePair& P, CsFlowKind kind, bool preserve_coclosure);

FlowState cs_start(const GaugePair& P, CsFlowKind kind, double dt = 0.0, const CsOptions& opt = {});
void cs_step(FlowState& S, CsFlowKind kind, const CsOptions& opt = {});
void cs_gradient_step(FlowState& S, const CsOptions& opt = {});
void cs_hamiltonian_step(FlowState& S, const CsOptions& opt = {});

FlowState run_cs(const GaugePair& P, CsFlowKind kind, double T, double dt = 0.0, const CsOptions& opt = {});

}  // namespace gaugelab
