#pragma once

#include "tptl/harmonics.hpp"
#include "tptl/radial.hpp"

#include <array>
#include <functional>
#include <vector>

namespace tptl {

using Vec = std::array<double, 3>; // third component unused for N=2

/// Star-shaped domain about the origin: boundary r = rho(theta) sampled on a
/// parameter grid of S^{N-1}.
struct StarDomain {
    const SurfaceGrid* grid;
    std::vector<double> rho;
    void validate() const; // rho > 0 everywhere
};

struct Measures {
    double vol = 0;
    double per = 0;
    Vec bar{0, 0, 0}; // the integral of x over the domain
};

Measures measures(const StarDomain& domain);

/// First-order boundary forms of Vol/Bar/Per on the sphere of radius R.
struct L1Forms {
    double vol;
    Vec bar;
    double per;
};
L1Forms l1_forms(const SurfaceGrid& grid, double R, const std::vector<double>& xi);

/// Second-order boundary forms on the sphere of radius R (Hadamard directions).
struct L2Forms {
    double vol;
    Vec bar;
    double per;
};
L2Forms l2_forms(const SurfaceGrid& grid, double R, const std::vector<double>& xi);

/// Quadrature values of the volume/barycenter constraint integrals for normal
/// fields given on the parameter sphere. Integrals are taken against the unit
/// parameter-sphere measure (a positive multiple of the surface integrals, so
/// all admissibility zero-tests are unaffected); curvature factors belong to
/// the actual sphere of radius R.
struct ConstraintResiduals {
    double first_order_inner = 0;  // int h.n on the interface sphere
    double first_order_outer = 0;  // int h.n on the outer sphere
    double second_order_inner = 0; // Hadamard paths: H int (h.n)^2
    double second_order_outer = 0;
    Vec barycenter_outer{0, 0, 0}; // int x (h.n) on the outer sphere
};

ConstraintResiduals constraint_residuals(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                         const std::vector<double>& h_inner,
                                         const std::vector<double>& h_outer);

/// An ambient map perturbation with its Jacobian, evaluated pointwise.
struct VectorField {
    std::function<Vec(const Vec&)> value;
    std::function<std::array<double, 9>(const Vec&)> jacobian;
};

class PerturbationPath;
VectorField zero_field();
/// Phi(t, .) of a path as a fixed field; the correction scalars are computed
/// once, so pointwise evaluation stays cheap inside assembly loops.
VectorField path_field(const PerturbationPath& path, double t);
/// The first-order field h of the path (its normal extension with collars).
VectorField path_velocity(const PerturbationPath& path);

/// A flow of ambient transformations x -> x + Phi(t,x) built from normal
/// boundary fields on the two spheres, with optional volume/barycenter
/// corrections (the explicit constrained construction).
class PerturbationPath {
  public:
    enum class Correction { none, volume, volume_and_barycenter };

    /// grid carries the angular sampling of the boundary fields xi_inner (on
    /// the interface sphere, as a function of direction) and xi_outer (outer).
    PerturbationPath(const PhaseConfig& cfg, const SurfaceGrid& grid,
                     std::vector<double> xi_inner, std::vector<double> xi_outer,
                     Correction correction);

    /// Phi(t, x).
    Vec displacement(double t, const Vec& x) const;
    /// D_x Phi(t, x), row-major N x N.
    std::array<double, 9> jacobian(double t, const Vec& x) const;

    /// Measures of the transported domains (exact compositions of star-domain
    /// quadratures with the correction scalars).
    Measures inner_domain(double t) const;
    Measures outer_domain(double t) const;

    int dim() const { return cfg_.N; }
    const SurfaceGrid& grid() const { return *grid_; }
    const std::vector<double>& xi_inner() const { return xi_inner_; }
    const std::vector<double>& xi_outer() const { return xi_outer_; }
    double collar_width() const { return eps0_; }

  private:
    friend VectorField path_field(const PerturbationPath&, double);
    friend VectorField path_velocity(const PerturbationPath&);

    PhaseConfig cfg_;
    const SurfaceGrid* grid_;
    std::vector<double> xi_inner_, xi_outer_;
    HarmonicCoefficients coeff_inner_, coeff_outer_;
    Correction correction_;
    double eps0_;

    struct Scalars {
        double scale_inner = 1, scale_outer = 1;
        Vec center{0, 0, 0}; // outer barycenter point to subtract
    };
    Scalars scalars(double t) const;
    Vec displacement_with(const Scalars& s, double t, const Vec& x) const;
    std::array<double, 9> jacobian_with(const Scalars& s, double t, const Vec& x) const;
    // normal extension h(x) with C^inf radial collars, and its Jacobian
    Vec field(const Vec& x) const;
    std::array<double, 9> field_jacobian(const Vec& x) const;
    double xi_at(const HarmonicCoefficients& c, const Vec& dir) const;
    Vec xi_grad_at(const HarmonicCoefficients& c, const Vec& dir) const; // tangential gradient
};

/// The constrained construction: requires (1st) on both spheres and (bar 1st)
/// on the outer sphere; rejects inadmissible fields with the offending residual.
PerturbationPath build_constrained_perturbation(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                                const std::vector<double>& xi_inner,
                                                const std::vector<double>& xi_outer);

/// Volume-only corrected variant (second-order volume preserving on both
/// spheres, barycenter unconstrained): the setting of the E'' theorem.
PerturbationPath make_volume_preserving_path(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                             const std::vector<double>& xi_inner,
                                             const std::vector<double>& xi_outer);

/// Plain Hadamard flow Phi(t) = t h with no correction scalars.
PerturbationPath make_hadamard_path(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                    const std::vector<double>& xi_inner,
                                    const std::vector<double>& xi_outer);

} // namespace tptl
