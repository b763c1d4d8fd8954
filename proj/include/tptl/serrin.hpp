#pragma once

#include "tptl/geometry.hpp"
#include "tptl/harmonics.hpp"
#include "tptl/pde.hpp"
#include "tptl/radial.hpp"

#include <memory>
#include <vector>

namespace tptl {

/// Zero-mean boundary fields (f on the interface sphere, g on the outer one)
/// expanded in harmonics up to k_max.
struct BoundaryPair {
    HarmonicCoefficients f, g;
};

struct ContinuationResult {
    HarmonicCoefficients f;       // converged inner field (coefficients)
    std::vector<double> f_nodal;  // the same field on the boundary grid
    int iterations = 0;
    double residual_norm = 0;
    double d_value = 0;
};

/// d = (gamma Vol(Omega) - beta int u) / Per(Omega).
double overdetermined_constant(const PhaseConfig& cfg, double state_integral, const Measures& m);

/// Newton continuation of the two-phase overdetermined problem from outer
/// perturbations to inner interfaces (N = 2).
class SerrinContinuation {
  public:
    explicit SerrinContinuation(const PhaseConfig& cfg, int k_max = 16, int n_r = 256,
                                int n_theta = 128);

    const SurfaceGrid& boundary_grid() const { return grid_; }
    const PhaseConfig& config() const { return cfg_; }
    int k_max() const { return k_max_; }

    /// Overdetermined residual Psi(f,g) as a nodal field on the outer boundary;
    /// zero-mean by construction (the interior constant d is balanced against
    /// the J_tau-weighted flux, the divergence-theorem form of the defining
    /// identity for d).
    std::vector<double> psi_residual(const BoundaryPair& pair) const;

    /// Diagonal action of the linearized map on mode k: d_r s_k(1).
    double mode_linearization(int k) const;

    /// Frozen-diagonal Newton iteration on f for fixed g.
    ContinuationResult continue_from_outer(const HarmonicCoefficients& g, double tol = 1e-8,
                                           int max_iter = 8) const;

    /// The volume-corrected variant: g_tilde must preserve Vol(Omega); the
    /// returned inner field preserves Vol(D) exactly (up to quadrature).
    ContinuationResult volume_corrected_continuation(const std::vector<double>& g_tilde_nodal,
                                                     double tol = 1e-8) const;

    /// Rescaling bijection between zero-mean and volume-preserving outer fields.
    std::vector<double> volume_preserving_from_zero_mean(const std::vector<double>& g) const;
    std::vector<double> zero_mean_from_volume_preserving(const std::vector<double>& g_tilde) const;

    /// d (via the literal volume form) along the plain inner normal path t -> t f.
    double d_along_inner_path(const std::vector<double>& f_nodal, double t) const;

    struct PsiEvaluation {
        std::vector<double> residual; // nodal on the outer boundary
        double d_flux = 0;            // flux-balanced constant used inside Psi
        double d_whatisd = 0;         // (gamma Vol - beta int u)/Per
    };
    PsiEvaluation evaluate(const std::vector<double>& f_nodal,
                           const std::vector<double>& g_nodal) const;

  private:
    PhaseConfig cfg_;
    int k_max_;
    SurfaceGrid grid_;
    std::unique_ptr<PdeOracle> oracle_;

    HarmonicCoefficients expand(const std::vector<double>& nodal) const;
    void check_band_limited(const HarmonicCoefficients& c, const char* what) const;
};

} // namespace tptl
