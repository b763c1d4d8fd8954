#pragma once

#include "tptl/geometry.hpp"
#include "tptl/radial.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace tptl {

/// Polar tensor grid of the unit disk with the interface circle r = R on a
/// node ring; n_r radial intervals (split proportionally at R), n_theta
/// angular intervals, one shared center node, Dirichlet ring at r = 1.
struct PolarGrid {
    double R;
    int n_r, n_theta;
    int interface_ring;
    std::vector<double> radii; // 0..n_r

    static PolarGrid make(double R, int n_r, int n_theta);
    int n_dof() const { return 1 + (n_r - 1) * n_theta; }
    /// ring i (0..n_r), angular j; -1 for the Dirichlet ring.
    int dof(int i, int j) const;
};

/// Nodal field on the polar reference grid.
struct DiscreteField {
    const PolarGrid* grid = nullptr;
    std::vector<double> values; // one per dof
    double at_node(int ring, int j) const;
};

/// Per-quadrature-point pulled-back coefficients A_phi (symmetric 2x2) and J_phi.
struct PulledBackCoefficients {
    int n_qp = 0;
    std::vector<double> a11, a12, a22, jac;
    double min_jacobian = 0;
    double min_eigenvalue = 0;
};

enum class LinearSolver { ldlt, pcg };

/// Two-dimensional finite-element oracle on the fixed reference disk (N = 2).
class PdeOracle {
  public:
    PdeOracle(const PhaseConfig& cfg, int n_r, int n_theta);

    const PolarGrid& grid() const { return grid_; }
    const PhaseConfig& config() const { return cfg_; }
    void set_solver(LinearSolver s) { solver_ = s; }

    /// A_phi, J_phi at every quadrature point; rejects degenerate maps.
    PulledBackCoefficients assemble_pullback(const VectorField& phi) const;

    /// Discrete weak solution of the pulled-back problem (v = 0 on the outer ring).
    DiscreteField solve_pulled_back(const PulledBackCoefficients& co) const;
    DiscreteField solve_pulled_back(const VectorField& phi) const;

    /// E(phi) = int A_phi grad v . grad v (beta = 0 only).
    double energy(const VectorField& phi) const;
    double energy(const PulledBackCoefficients& co, const DiscreteField& v) const;

    /// int_Omega_phi u dx = int J_phi v on the reference disk.
    double state_integral(const PulledBackCoefficients& co, const DiscreteField& v) const;

    struct FdDerivatives {
        double e0;
        double first, first_err;
        double second, second_err;
        bool richardson_monotone;
    };
    /// Central 5-point differences of the energy along a path at steps {h, h/2},
    /// Richardson-combined.
    FdDerivatives fd_shape_derivatives(const PerturbationPath& path, double h = 1e-2) const;

    struct AnalyticDerivatives {
        double first;  // E'(phi) zeta
        double second; // E''(phi)(xi, zeta)
    };
    /// Frechet derivatives of E in map space via the differentiated discrete
    /// systems (beta = 0).
    AnalyticDerivatives analytic_phi_derivatives(const VectorField& phi, const VectorField& xi,
                                                 const VectorField& zeta) const;

    /// A'(phi)zeta entries per quadrature point (jac carries J'(phi)zeta).
    PulledBackCoefficients pullback_first_derivative(const VectorField& phi,
                                                     const VectorField& zeta) const;

    /// One-sided radial derivative of the discrete field on the outer ring,
    /// one value per angular node.
    std::vector<double> boundary_normal_derivative(const DiscreteField& v) const;

    /// theta values of the angular nodes.
    std::vector<double> boundary_angles() const;

    // quadrature-point geometry (used by coefficient assembly and tests)
    int n_quadrature_points() const { return 4 * grid_.n_r * grid_.n_theta; }
    Vec quadrature_point(int q) const;
    double quadrature_weight(int q) const; // includes the polar r factor

  private:
    PhaseConfig cfg_;
    PolarGrid grid_;
    LinearSolver solver_ = LinearSolver::ldlt;
    mutable std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
    mutable bool pattern_ready_ = false;

    Eigen::SparseMatrix<double> assemble_matrix(const PulledBackCoefficients& co,
                                                bool with_mass) const;
    Eigen::VectorXd assemble_load(const PulledBackCoefficients& co) const; // int J N_a
    Eigen::VectorXd solve_system(const Eigen::SparseMatrix<double>& K,
                                 const Eigen::VectorXd& rhs) const;
    PulledBackCoefficients derivative_coefficients(const VectorField& phi, const VectorField* xi,
                                                   const VectorField* zeta, int order,
                                                   std::vector<double>* jprime) const;
};

/// Energy of the radially mapped configuration (interface at r_in, outer
/// radius r_out) for any N, via the 1D finite-difference oracle. This is the
/// N = 3 radial-only oracle path.
double radial_mapped_energy(const PhaseConfig& cfg, double r_in, double r_out, int n = 4096);

} // namespace tptl
