#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace tptl {

/// A spherical-harmonic mode Y_{k,i} on S^{N-1}: degree k >= 0, index 1 <= i <= mode_dimension(N,k).
struct Mode {
    int k = 0;
    int i = 1;
};

/// dim of the space of degree-k spherical harmonics on S^{N-1}.
/// d_0 = 1; for k >= 1 this equals (2k+N-2)*(k+N-3)! / (k!*(N-2)!).
std::int64_t mode_dimension(int N, int k);

/// Laplace-Beltrami eigenvalue lambda_k = k(k+N-2) of degree-k harmonics on S^{N-1}.
double lb_eigenvalue(int N, int k);

/// Additive mean curvature of the sphere of radius R in R^N: (N-1)/R.
double sphere_mean_curvature(int N, double R);

/// Quadrature grid on S^{N-1}, N in {2,3}.
///
/// N=2: equispaced angles with trapezoid weights (exact for trig polynomials
/// of degree < n_nodes). N=3: Gauss-Legendre in cos(polar) x equispaced
/// azimuth; node index is ip*n_azim + ia.
class SurfaceGrid {
  public:
    static SurfaceGrid circle(int n_theta);
    static SurfaceGrid sphere(int n_polar, int n_azim);

    int dim() const { return N_; }
    int size() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    /// Unit-sphere point of node idx (third component unused for N=2).
    std::array<double, 3> point(int idx) const;

    // structure accessors used by the tangential operators
    int n_theta() const { return n_theta_; }
    int n_polar() const { return n_polar_; }
    int n_azim() const { return n_azim_; }
    double theta(int j) const { return theta_[j]; }
    double polar_x(int ip) const { return polar_x_[ip]; }
    double azim(int ia) const { return azim_[ia]; }

    /// Quadrature of a nodal field over S^{N-1}.
    double integrate(const std::vector<double>& field) const;

  private:
    int N_ = 2;
    int n_theta_ = 0;             // N=2
    int n_polar_ = 0, n_azim_ = 0; // N=3
    std::vector<double> theta_;    // N=2 angles
    std::vector<double> polar_x_;  // N=3 Gauss-Legendre abscissae (cos of polar angle)
    std::vector<double> azim_;     // N=3 azimuth angles
    std::vector<double> weights_;
};

/// Y_{k,i} at a unit-sphere point. N=2 expects (cos t, sin t); N=3 a unit 3-vector.
/// Ordering: N=2, k>=1: i=1 ~ cos(k t)/sqrt(pi), i=2 ~ sin(k t)/sqrt(pi).
/// N=3, k>=1: i=2m-1 / i=2m are the cos/sin pairs of azimuthal order m=1..k,
/// i=2k+1 is the zonal (m=0) harmonic. k=0 is the normalized constant.
double eval_harmonic(int N, Mode mode, const std::array<double, 3>& point);

/// Y_{k,i} sampled on every grid node.
std::vector<double> eval_harmonic_grid(const SurfaceGrid& grid, Mode mode);

/// Y_{k,i} together with its tangential gradient on the unit sphere
/// (analytic; ambient components, third unused for N=2).
struct HarmonicValue {
    double value;
    std::array<double, 3> grad_tau;
};
HarmonicValue eval_harmonic_gradient(int N, Mode mode, const std::array<double, 3>& point);

/// Coefficient list of expand_boundary_field: one entry per mode, degrees 0..k_max.
struct HarmonicCoefficients {
    int N = 2;
    int k_max = 0;
    std::vector<double> values; // packed by degree, modes of equal k contiguous
    int offset(int k) const;
    double& at(Mode m);
    double at(Mode m) const;
    double l2_norm() const;
};

/// Quadrature projection of a nodal field onto Y_{k,i}, k <= k_max.
/// Throws if the grid cannot resolve degree k_max (node-count heuristic).
HarmonicCoefficients expand_boundary_field(const SurfaceGrid& grid,
                                           const std::vector<double>& samples, int k_max);

/// Sum of coefficients * Y_{k,i} on the grid.
std::vector<double> synthesize_field(const SurfaceGrid& grid, const HarmonicCoefficients& coeffs);

/// Discrete tangential calculus on the grid's unit sphere.
/// Scalar fields are nodal vectors; ambient vector fields are N nodal vectors.
class TangentialOps {
  public:
    explicit TangentialOps(const SurfaceGrid& grid);

    /// Componentwise tangential gradient of a scalar field (N ambient components).
    std::vector<std::vector<double>> grad_tau(const std::vector<double>& field) const;
    /// Tangential divergence of an ambient vector field.
    std::vector<double> div_tau(const std::vector<std::vector<double>>& field) const;
    /// Laplace-Beltrami of a scalar field.
    std::vector<double> laplace_beltrami(const std::vector<double>& field) const;

  private:
    const SurfaceGrid& grid_;
    std::vector<double> polar_diff_; // dense differentiation matrix on GL nodes (N=3)
    std::vector<double> dperiodic(const std::vector<double>& f, int stride, int count,
                                  int offset, double spacing) const;
    std::vector<double> dpolar(const std::vector<double>& f) const;
    std::vector<double> dazim(const std::vector<double>& f) const;
};

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace tptl
