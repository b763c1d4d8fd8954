#include "tptl/serrin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tptl {

double overdetermined_constant(const PhaseConfig& cfg, double state_integral, const Measures& m) {
    cfg.validate();
    if (!(m.per > 0)) throw std::invalid_argument("overdetermined_constant: Per must be positive");
    return (cfg.gamma * m.vol - cfg.beta * state_integral) / m.per;
}

SerrinContinuation::SerrinContinuation(const PhaseConfig& cfg, int k_max, int n_r, int n_theta)
    : cfg_(cfg), k_max_(k_max), grid_(SurfaceGrid::circle(n_theta)) {
    cfg_.validate();
    if (cfg.N != 2)
        throw std::invalid_argument("SerrinContinuation: the full continuation is restricted to N = 2");
    if (n_theta < 4 * k_max)
        throw std::invalid_argument("SerrinContinuation: n_theta must resolve k_max");
    oracle_ = std::make_unique<PdeOracle>(cfg_, n_r, n_theta);
}

HarmonicCoefficients SerrinContinuation::expand(const std::vector<double>& nodal) const {
    return expand_boundary_field(grid_, nodal, k_max_);
}

void SerrinContinuation::check_band_limited(const HarmonicCoefficients& c, const char* what) const {
    // content above k_max is rejected rather than silently truncated
    std::vector<double> nodal = synthesize_field(grid_, c);
    (void)nodal;
    if (c.k_max > k_max_)
        throw std::invalid_argument(std::string(what) + ": degrees above k_max are not supported");
}

SerrinContinuation::PsiEvaluation
SerrinContinuation::evaluate(const std::vector<double>& f_nodal,
                             const std::vector<double>& g_nodal) const {
    const auto path = make_hadamard_path(cfg_, grid_, f_nodal, g_nodal);
    const auto phi = path_field(path, 1.0);
    const auto co = oracle_->assemble_pullback(phi);
    const auto v = oracle_->solve_pulled_back(co);
    const auto dn = oracle_->boundary_normal_derivative(v);
    const auto angles = oracle_->boundary_angles();
    const int n = int(angles.size());

    PsiEvaluation out;
    out.residual.resize(n);
    std::vector<double> flux(n), jtau(n);
    for (int j = 0; j < n; ++j) {
        const Vec x{std::cos(angles[j]), std::sin(angles[j]), 0.0};
        const auto Dphi = phi.jacobian(x);
        // M = I + Dphi, 2x2
        const double m11 = 1 + Dphi[0], m12 = Dphi[1], m21 = Dphi[3], m22 = 1 + Dphi[4];
        const double det = m11 * m22 - m12 * m21;
        if (!(det > 0)) throw std::invalid_argument("psi_residual: degenerate boundary map");
        // w = M^{-T} n with n = e_r = x
        const double i11 = m22 / det, i12 = -m12 / det, i21 = -m21 / det, i22 = m11 / det;
        // M^{-T} has entries (i11, i21; i12, i22)
        const double w1 = i11 * x[0] + i21 * x[1];
        const double w2 = i12 * x[0] + i22 * x[1];
        const double wn = std::hypot(w1, w2);
        // grad u at the mapped point: M^{-T} grad v; on the Dirichlet ring grad v = d_r v e_r
        const double gv1 = dn[j] * x[0], gv2 = dn[j] * x[1];
        const double gu1 = i11 * gv1 + i21 * gv2;
        const double gu2 = i12 * gv1 + i22 * gv2;
        flux[j] = (gu1 * w1 + gu2 * w2) / wn;
        jtau[j] = det * wn;
    }
    double num = 0, den = 0;
    for (int j = 0; j < n; ++j) {
        num += flux[j] * jtau[j];
        den += jtau[j];
    }
    out.d_flux = -num / den;
    for (int j = 0; j < n; ++j) out.residual[j] = (flux[j] + out.d_flux) * jtau[j];

    // the literal (whatisd) value for reporting
    StarDomain omega{&grid_, {}};
    omega.rho.resize(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) omega.rho[j] = 1.0 + g_nodal[j];
    const auto m = measures(omega);
    out.d_whatisd = overdetermined_constant(cfg_, oracle_->state_integral(co, v), m);
    return out;
}

std::vector<double> SerrinContinuation::psi_residual(const BoundaryPair& pair) const {
    check_band_limited(pair.f, "psi_residual: f");
    check_band_limited(pair.g, "psi_residual: g");
    const auto f_nodal = synthesize_field(grid_, pair.f);
    const auto g_nodal = synthesize_field(grid_, pair.g);
    const double mean_f = grid_.integrate(f_nodal), mean_g = grid_.integrate(g_nodal);
    if (std::abs(mean_f) > 1e-12 * std::max(1.0, grid_.integrate(std::vector<double>(grid_.size(), 1.0))))
        throw std::invalid_argument("psi_residual: f must have zero mean");
    if (std::abs(mean_g) > 1e-12 * 2 * std::numbers::pi)
        throw std::invalid_argument("psi_residual: g must have zero mean");
    return evaluate(f_nodal, g_nodal).residual;
}

double SerrinContinuation::mode_linearization(int k) const {
    if (k < 1) throw std::invalid_argument("mode_linearization: k must be >= 1");
    double du_in; // d_r u(R-) of the radial state
    if (cfg_.beta == 0.0 && cfg_.gamma == 1.0) {
        du_in = solve_radial_torsion(cfg_).deriv(cfg_.R);
    } else if (cfg_.beta == 0.0) {
        PhaseConfig unit = cfg_;
        unit.gamma = 1.0;
        du_in = cfg_.gamma * solve_radial_torsion(unit).deriv(cfg_.R);
    } else {
        du_in = radial_fd_oracle(cfg_, 8192).deriv_at_interface(true);
    }
    // flux transmission: d_r u(R+) = sigma_c d_r u(R-)
    const double jump_value = (cfg_.sigma_c - 1.0) * du_in; // s(R-) - s(R+) = -[d_r u]
    const auto s = solve_mode_ode(cfg_, k, {jump_value, 0.0, 0.0});
    return s.deriv_at_boundary();
}

ContinuationResult SerrinContinuation::continue_from_outer(const HarmonicCoefficients& g,
                                                           double tol, int max_iter) const {
    check_band_limited(g, "continue_from_outer: g");
    if (std::abs(g.at(Mode{0, 1})) > 1e-12)
        throw std::invalid_argument("continue_from_outer: g must have zero mean");
    const auto g_nodal = synthesize_field(grid_, g);

    std::vector<double> jac(k_max_ + 1, 0.0);
    for (int k = 1; k <= k_max_; ++k) {
        jac[k] = mode_linearization(k);
        if (std::abs(jac[k]) < 1e-10)
            throw std::runtime_error("continue_from_outer: linearization vanishes at mode " +
                                     std::to_string(k));
    }

    HarmonicCoefficients f = expand(std::vector<double>(grid_.size(), 0.0));
    ContinuationResult res;
    double best = 1e300;
    int stall = 0;
    for (int it = 0; it <= max_iter; ++it) {
        const auto f_nodal = synthesize_field(grid_, f);
        const auto eval = evaluate(f_nodal, g_nodal);
        double norm2 = 0;
        for (int j = 0; j < grid_.size(); ++j)
            norm2 += eval.residual[j] * eval.residual[j] * grid_.weights()[j];
        const double rnorm = std::sqrt(norm2);
        res.f = f;
        res.f_nodal = f_nodal;
        res.iterations = it;
        res.residual_norm = rnorm;
        res.d_value = eval.d_whatisd;
        if (rnorm <= tol) return res;
        if (it == max_iter) break;
        if (rnorm < best) {
            best = rnorm;
            stall = 0;
        } else if (++stall >= 3) {
            throw std::runtime_error("continue_from_outer: residual stalled at " +
                                     std::to_string(rnorm));
        }
        const auto psi_c = expand(eval.residual);
        for (int k = 1; k <= k_max_; ++k)
            for (int i = 1; i <= mode_dimension(2, k); ++i)
                f.at(Mode{k, i}) -= psi_c.at(Mode{k, i}) / jac[k];
    }
    throw std::runtime_error("continue_from_outer: no convergence in " +
                             std::to_string(max_iter) + " iterations, residual " +
                             std::to_string(res.residual_norm));
}

std::vector<double>
SerrinContinuation::volume_preserving_from_zero_mean(const std::vector<double>& g) const {
    StarDomain omega{&grid_, {}};
    omega.rho.resize(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) omega.rho[j] = 1.0 + g[j];
    const double vol = measures(omega).vol;
    const double t = std::pow(std::numbers::pi / vol, 1.0 / 2.0);
    std::vector<double> out(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) out[j] = t * (1.0 + g[j]) - 1.0;
    return out;
}

std::vector<double>
SerrinContinuation::zero_mean_from_volume_preserving(const std::vector<double>& g_tilde) const {
    const double per0 = 2 * std::numbers::pi;
    const double t = (per0 + grid_.integrate(g_tilde)) / per0;
    std::vector<double> out(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) out[j] = (1.0 + g_tilde[j]) / t - 1.0;
    return out;
}

ContinuationResult
SerrinContinuation::volume_corrected_continuation(const std::vector<double>& g_tilde_nodal,
                                                  double tol) const {
    StarDomain omega{&grid_, {}};
    omega.rho.resize(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) omega.rho[j] = 1.0 + g_tilde_nodal[j];
    const double vol = measures(omega).vol;
    if (std::abs(vol - std::numbers::pi) > 1e-6)
        throw std::invalid_argument("volume_corrected_continuation: g_tilde must preserve Vol(Omega)");

    const auto g_nodal = zero_mean_from_volume_preserving(g_tilde_nodal);
    auto g = expand(g_nodal);
    g.at(Mode{0, 1}) = 0.0; // exact zero mean (the rescale leaves roundoff)
    auto res = continue_from_outer(g, tol);

    // rescale the inner interface to exact volume
    StarDomain core{&grid_, {}};
    core.rho.resize(grid_.size());
    for (int j = 0; j < grid_.size(); ++j) core.rho[j] = cfg_.R + res.f_nodal[j];
    const double vol_f = measures(core).vol;
    const double vol0 = std::numbers::pi * cfg_.R * cfg_.R;
    const double s = std::pow(vol0 / vol_f, 1.0 / 2.0);
    for (int j = 0; j < grid_.size(); ++j)
        res.f_nodal[j] = s * (cfg_.R + res.f_nodal[j]) - cfg_.R;
    res.f = expand(res.f_nodal);
    return res;
}

double SerrinContinuation::d_along_inner_path(const std::vector<double>& f_nodal, double t) const {
    std::vector<double> scaled(f_nodal.size());
    for (std::size_t j = 0; j < scaled.size(); ++j) scaled[j] = t * f_nodal[j];
    const auto eval = evaluate(scaled, std::vector<double>(grid_.size(), 0.0));
    return eval.d_whatisd;
}

} // namespace tptl
