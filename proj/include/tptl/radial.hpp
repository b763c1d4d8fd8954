#pragma once

#include <functional>
#include <vector>

namespace tptl {

/// Two-phase problem parameters. The shell conductivity is fixed at 1
/// (everything else in the model is invariant under rescaling sigma).
struct PhaseConfig {
    int N = 2;            // ambient dimension
    double R = 0.5;       // interface radius, 0 < R < 1
    double sigma_c = 2.0; // core conductivity
    double beta = 0.0;    // reaction coefficient
    double gamma = 1.0;   // source coefficient

    void validate() const;
};

/// The radial two-phase torsion state (beta = 0, gamma = 1) on concentric balls:
/// two analytic pieces glued by the transmission conditions, u(1) = 0.
struct RadialProfile {
    int N;
    double R;
    double sigma_c;
    double value(double r) const;
    double deriv(double r) const;       // one-sided at r = R: side chosen by r < R
    double second_deriv(double r) const;
};

RadialProfile solve_radial_torsion(const PhaseConfig& cfg);

/// [d_n u] = d_r u(R-) - d_r u(R+) = (R/N)(sigma_c - 1)/sigma_c for the torsion state.
double interface_jump(const PhaseConfig& cfg);

/// Closed-form radial coefficients of the mode-wise shape derivative u'_{+/-}
/// (degree k >= 1): inner piece B r^k, outer piece C r^{2-N-k} + D r^k,
/// common denominator F > 0.
struct ModeCoefficients {
    int N;
    int k;
    double R; // interface radius the coefficients were built for
    double B_minus, C_minus, D_minus;
    double B_plus, C_plus, D_plus;
    double F;
};

enum class Side { minus, plus };

ModeCoefficients mode_coefficients(const PhaseConfig& cfg, int k);

/// Radial profile of u'_{side} at radius r in [0,1] (per unit mode amplitude).
double eval_mode_profile(const ModeCoefficients& coeffs, Side side, double r);
/// d/dr of the same; at r = R the side is selected by from_inside.
double eval_mode_profile_deriv(const ModeCoefficients& coeffs, Side side, double r,
                               bool from_inside);

/// Data for the generalized radial mode problem
///   sigma (s'' + (N-1) s'/r - k(k+N-2) s/r^2) = beta s on (0,R) u (R,1),
///   s(R-) - s(R+) = jump_value, sigma_c s'(R-) - s'(R+) = jump_flux, s(1) = boundary_value,
/// with the regular branch selected on [0,R] (s(0) = 0).
struct ModeOdeData {
    double jump_value = 0.0;     // [s] across the interface
    double jump_flux = 0.0;      // [sigma d_r s] across the interface
    double boundary_value = 0.0; // s(1)
};

/// Chebyshev-collocation solution of the radial mode problem.
struct ModeProfile {
    int k;
    double R;
    double value(double r) const;
    double deriv_at_interface(bool from_inside) const;
    double deriv_at_boundary() const; // d_r s(1)
    double residual() const { return residual_; }

    // piecewise Chebyshev coefficients; inner piece stores q with s = r^k q(r)
    std::vector<double> inner_coeffs, outer_coeffs;
    double residual_ = 0.0;
};

ModeProfile solve_mode_ode(const PhaseConfig& cfg, int k, const ModeOdeData& data);

/// Second-order finite-difference solution of the radial transmission problem
///   div(sigma grad u) = beta u - gamma,  u(1) = 0
/// on [0,1] with a node exactly at r = R (conservative flux form, harmonic
/// averaging of sigma at cell faces).
struct RadialSolution {
    std::vector<double> r;
    std::vector<double> u;
    double value(double radius) const; // linear interpolation
    /// One-sided 2nd-order derivative at the interface.
    double deriv_at_interface(bool from_inside) const;
    int interface_index = 0;
};

RadialSolution radial_fd_oracle(const PhaseConfig& cfg, int n);

/// int_Omega u for the radial state, by per-phase Gauss-Legendre quadrature of
/// the FD (or closed-form) radial solution against the surface measure.
double radial_energy(const PhaseConfig& cfg, int n = 4096);

/// Surface area of the unit sphere S^{N-1}.
double unit_sphere_area(int N);

} // namespace tptl
