/// Z/2-harmonic 1-forms in a branch-cut representation, the closed-form models nu_k,
/// quadratic differentials, holonomy and measured-foliation tracing.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaugelab/grid.hpp"

namespace gaugelab {

class ZharmError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One component of the zero set. In 2-D it is the point p with cut ray {p - t e_x : t > 0};
/// in 3-D it is the line through p parallel to e_z with cut half-plane {y = p_y, x < p_x}.
struct CutZero {
    Point p{0.0, 0.0, 0.0};
    bool odd = true; ///< sign flips across the cut only for odd vanishing order
};

struct CutDescriptor {
    std::vector<CutZero> zeros;
    /// When false, lattice stencils that wrap around the torus are treated as missing.
    bool periodic = true;

    /// Product of the flips met along the straight segment x -> y (no wrapping).
    double crossing_sign(const Point& x, const Point& y) const;
    /// Planar distance from x to the nearest zero component; +inf with no zeros.
    double distance_to_zeros(const Point& x) const;
};

/// Real 1-form with values stored on a branch that is continuous off the cut.
struct CutBundleField {
    ScalarField form;
    CutDescriptor cut;

    const Grid& grid() const { return form.grid; }
    /// False when the step along dir * e_axis would wrap on a non-periodic field.
    bool has_neighbour(std::size_t site, int axis, int dir) const;
    /// Sign that carries the neighbour's value to the branch at `site`.
    double edge_sign(std::size_t site, int axis, int dir) const;
    /// Pointwise |nu|^2, which is single valued.
    ScalarField norm_sq() const;
    /// Multilinear interpolation with corner values carried to the branch at x.
    std::array<double, 3> value_at(const Point& x) const;
    /// Whether value_at can be evaluated at x without leaving a non-periodic domain.
    bool inside(const Point& x) const;
};

/// nu = Re(c z^{k/2} dz) with z = (x - axis_x) + i (y - axis_y), branch arg in (-pi, pi];
/// in 3-D the z-invariant extension with vanishing dz component.
struct ModelZForm {
    int k = 1;
    double c = 1.0;
    Point axis{0.0, 0.0, 0.0};
    int dim = 2;
};

struct ModelValue {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    double norm = 0.0;
};

/// Closed-form value; throws ZharmError on the zero set.
ModelValue model_eval(const ModelZForm& M, const Point& x);
/// c rho^{k/2}, defined everywhere.
double model_norm(const ModelZForm& M, const Point& x);
CutDescriptor model_cut(const ModelZForm& M);
/// Sample at the lattice sites (non-periodic). Sites on the zero set get value 0.
CutBundleField sample_model(const Grid& g, const ModelZForm& M);
/// Sample a sum of models that share an axis and the parity of k.
CutBundleField sample_models(const Grid& g, const std::vector<ModelZForm>& parts);
/// Closed-form integral of |nu|^2 over the sphere (circle) of radius r about a point of the axis.
double model_h(const ModelZForm& M, double r);
/// 3-D model with amplitude chosen so model_h(M, 1) = 1.
ModelZForm normalized_model(int k, const Point& axis);

struct HarmonicityResidual {
    double d_norm = 0.0;        ///< ||d nu||_2 on admissible sites
    double dstar_norm = 0.0;    ///< ||d* nu||_2 on admissible sites
    double bochner_relative = 0.0; ///< int |(1/2) d*d |nu|^2 + |grad nu|^2| / int |grad nu|^2
    std::size_t sites = 0;
};

/// Residuals over sites farther than rho from the zero set, with cut-corrected stencils.
HarmonicityResidual harmonicity_residual(const CutBundleField& v, double rho);

/// Product of cut signs along a closed lattice path (consecutive sites must be neighbours).
int holonomy(const CutBundleField& v, const std::vector<std::size_t>& loop);

/// Boundary of the square of half-width `half` lattice steps around `center` in the (x, y) plane.
std::vector<std::size_t> square_loop(const Grid& g, std::array<int, 3> center, int half);

enum class Surface { torus, disk };

/// mu = c dz^2 on the square torus, or mu = z^k dz^2 about `center` on the disk model.
struct QuadDiff {
    Surface surface = Surface::torus;
    std::complex<double> c{1.0, 0.0};
    int k = 1;
    Point center{0.0, 0.0, 0.0};
};

struct QdOutput {
    std::vector<std::complex<double>> e; ///< dz coefficient of mu^{1/2} per site
    CutBundleField nu;                   ///< e + conj(e) as a real 1-form
    std::vector<std::pair<Point, int>> zeros;
    double cauchy_riemann = 0.0;         ///< ||d e / d zbar|| / ||d e / d z|| (absolute when the latter vanishes)
    double square_defect = 0.0;          ///< max |e^2 - mu| / |mu| off the zero set
    Su2 sigma;                           ///< constant unit section used for the Su2 embedding
};

QdOutput qd_pipeline(const Grid& g, const QuadDiff& q);

struct FoliationOutput {
    double L = 0.0;
    std::vector<std::vector<Point>> leaves;
    std::vector<std::pair<std::string, double>> measures;
    std::vector<Point> zeros;
};

/// Trace the line field ker(nu) through each seed in both directions with midpoint steps.
/// A direction stops after max_len, at the domain edge, or within 2h of a zero.
FoliationOutput foliation_trace(const CutBundleField& v, const std::vector<Point>& seeds, double step,
                                double max_len);

/// Sum of |nu(unit tangent)| ds along a polyline, subdivided to steps of at most h/4.
double transverse_measure(const CutBundleField& v, const std::vector<Point>& path);

std::string foliation_json(const FoliationOutput& f);
std::string foliation_svg(const FoliationOutput& f);

struct SphereEquation {
    double residual = 0.0;         ///< relative L2 defect of d nu_r = (N0 + 1) nu_perp
    double printed_residual = 0.0; ///< same with coefficient N0
};

/// Restrict a 3-D model to the unit sphere about its axis point on an m x 2m latitude-longitude
/// mesh and compare the tangential derivative of the radial part with the tangential part.
SphereEquation sphere_equation_residual(const ModelZForm& M, int m);

}  // namespace gaugelab
