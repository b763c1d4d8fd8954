#include "tptl/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tptl {

namespace {

double bump_piece(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

// smooth transition: 1 for s <= 0, 0 for s >= 1, flat at both ends
double smooth_step_down(double s) {
    if (s <= 0) return 1.0;
    if (s >= 1) return 0.0;
    const double a = bump_piece(1 - s), b = bump_piece(s);
    return a / (a + b);
}

double smooth_step_down_deriv(double s) {
    if (s <= 0 || s >= 1) return 0.0;
    const double a = bump_piece(1 - s), b = bump_piece(s);
    const double da = -bump_piece(1 - s) / ((1 - s) * (1 - s));
    const double db = bump_piece(s) / (s * s);
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

} // namespace

void StarDomain::validate() const {
    if (!grid || int(rho.size()) != grid->size())
        throw std::invalid_argument("StarDomain: field size mismatch");
    for (double r : rho)
        if (!(r > 0)) throw std::invalid_argument("StarDomain: boundary must stay star-shaped (rho > 0)");
}

Measures measures(const StarDomain& domain) {
    domain.validate();
    const auto& grid = *domain.grid;
    const int N = grid.dim();
    Measures out;
    std::vector<double> voli(grid.size()), peri(grid.size());
    std::vector<std::vector<double>> bari(3, std::vector<double>(grid.size(), 0.0));
    TangentialOps ops(grid);
    const auto grad = ops.grad_tau(domain.rho);
    for (int idx = 0; idx < grid.size(); ++idx) {
        const double rho = domain.rho[idx];
        double g2 = 0;
        for (int c = 0; c < N; ++c) g2 += grad[c][idx] * grad[c][idx];
        voli[idx] = std::pow(rho, N) / N;
        peri[idx] = std::pow(rho, N - 2.0) * std::sqrt(rho * rho + g2);
        const auto p = grid.point(idx);
        for (int c = 0; c < N; ++c) bari[c][idx] = p[c] * std::pow(rho, N + 1.0) / (N + 1.0);
    }
    out.vol = grid.integrate(voli);
    out.per = grid.integrate(peri);
    for (int c = 0; c < N; ++c) out.bar[c] = grid.integrate(bari[c]);
    return out;
}

L1Forms l1_forms(const SurfaceGrid& grid, double R, const std::vector<double>& xi) {
    if (!(R > 0)) throw std::invalid_argument("l1_forms: R must be positive");
    const int N = grid.dim();
    const double surf = std::pow(R, N - 1.0);
    L1Forms out{0.0, {0, 0, 0}, 0.0};
    out.vol = surf * grid.integrate(xi);
    out.per = sphere_mean_curvature(N, R) * out.vol;
    std::vector<double> tmp(grid.size());
    for (int c = 0; c < N; ++c) {
        for (int idx = 0; idx < grid.size(); ++idx) tmp[idx] = R * grid.point(idx)[c] * xi[idx];
        out.bar[c] = surf * grid.integrate(tmp);
    }
    return out;
}

L2Forms l2_forms(const SurfaceGrid& grid, double R, const std::vector<double>& xi) {
    if (!(R > 0)) throw std::invalid_argument("l2_forms: R must be positive");
    const int N = grid.dim();
    const double surf = std::pow(R, N - 1.0);
    const double H = sphere_mean_curvature(N, R);
    L2Forms out{0.0, {0, 0, 0}, 0.0};
    std::vector<double> xi2(grid.size());
    for (int idx = 0; idx < grid.size(); ++idx) xi2[idx] = xi[idx] * xi[idx];
    out.vol = H * surf * grid.integrate(xi2);
    std::vector<double> tmp(grid.size());
    for (int c = 0; c < N; ++c) {
        // n + x H = theta (1 + R H) = N theta on the sphere of radius R
        for (int idx = 0; idx < grid.size(); ++idx) tmp[idx] = N * grid.point(idx)[c] * xi2[idx];
        out.bar[c] = surf * grid.integrate(tmp);
    }
    TangentialOps ops(grid);
    const auto grad = ops.grad_tau(xi);
    std::vector<double> per_i(grid.size());
    const double curv = (N - 1.0) * (N - 2.0) / (R * R); // H^2 - tr((D n)^T D n)
    for (int idx = 0; idx < grid.size(); ++idx) {
        double g2 = 0;
        for (int c = 0; c < N; ++c) g2 += grad[c][idx] * grad[c][idx];
        per_i[idx] = g2 / (R * R) + xi2[idx] * curv;
    }
    out.per = surf * grid.integrate(per_i);
    return out;
}

ConstraintResiduals constraint_residuals(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                         const std::vector<double>& h_inner,
                                         const std::vector<double>& h_outer) {
    cfg.validate();
    ConstraintResiduals out;
    out.first_order_inner = grid.integrate(h_inner);
    out.first_order_outer = grid.integrate(h_outer);
    std::vector<double> sq(grid.size());
    for (int idx = 0; idx < grid.size(); ++idx) sq[idx] = h_inner[idx] * h_inner[idx];
    out.second_order_inner = sphere_mean_curvature(cfg.N, cfg.R) * grid.integrate(sq);
    for (int idx = 0; idx < grid.size(); ++idx) sq[idx] = h_outer[idx] * h_outer[idx];
    out.second_order_outer = sphere_mean_curvature(cfg.N, 1.0) * grid.integrate(sq);
    std::vector<double> tmp(grid.size());
    for (int c = 0; c < cfg.N; ++c) {
        for (int idx = 0; idx < grid.size(); ++idx) tmp[idx] = grid.point(idx)[c] * h_outer[idx];
        out.barycenter_outer[c] = grid.integrate(tmp);
    }
    return out;
}

PerturbationPath::PerturbationPath(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                   std::vector<double> xi_inner, std::vector<double> xi_outer,
                                   Correction correction)
    : cfg_(cfg), grid_(&grid), xi_inner_(std::move(xi_inner)), xi_outer_(std::move(xi_outer)),
      correction_(correction), eps0_((1.0 - cfg.R) / 4.0) {
    cfg_.validate();
    if (int(xi_inner_.size()) != grid.size() || int(xi_outer_.size()) != grid.size())
        throw std::invalid_argument("PerturbationPath: boundary field size mismatch");
    int k_max;
    if (grid.dim() == 2)
        k_max = std::min(48, grid.n_theta() / 4);
    else
        k_max = std::min(24, std::min(grid.n_polar() - 2, grid.n_azim() / 4));
    coeff_inner_ = expand_boundary_field(grid, xi_inner_, k_max);
    coeff_outer_ = expand_boundary_field(grid, xi_outer_, k_max);
}

double PerturbationPath::xi_at(const HarmonicCoefficients& c, const Vec& dir) const {
    double acc = 0;
    for (int k = 0; k <= c.k_max; ++k)
        for (int i = 1; i <= mode_dimension(cfg_.N, k); ++i) {
            const double a = c.at(Mode{k, i});
            if (a == 0.0) continue;
            acc += a * eval_harmonic(cfg_.N, Mode{k, i}, dir);
        }
    return acc;
}

Vec PerturbationPath::xi_grad_at(const HarmonicCoefficients& c, const Vec& dir) const {
    Vec acc{0, 0, 0};
    for (int k = 0; k <= c.k_max; ++k)
        for (int i = 1; i <= mode_dimension(cfg_.N, k); ++i) {
            const double a = c.at(Mode{k, i});
            if (a == 0.0) continue;
            const auto hv = eval_harmonic_gradient(cfg_.N, Mode{k, i}, dir);
            for (int d = 0; d < 3; ++d) acc[d] += a * hv.grad_tau[d];
        }
    return acc;
}

Vec PerturbationPath::field(const Vec& x) const {
    const int N = cfg_.N;
    double r2 = 0;
    for (int c = 0; c < N; ++c) r2 += x[c] * x[c];
    const double r = std::sqrt(r2);
    const double w_in = std::min(eps0_, cfg_.R / 2), w_out = eps0_;
    Vec out{0, 0, 0};
    if (r < 1e-14) return out;
    const Vec dir{x[0] / r, x[1] / r, x[2] / r};
    const double cin = smooth_step_down(std::abs(r - cfg_.R) / w_in);
    const double cout = smooth_step_down(std::abs(r - 1.0) / w_out);
    double amp = 0;
    if (cin > 0) amp += cin * xi_at(coeff_inner_, dir);
    if (cout > 0) amp += cout * xi_at(coeff_outer_, dir);
    for (int c = 0; c < N; ++c) out[c] = amp * dir[c];
    return out;
}

std::array<double, 9> PerturbationPath::field_jacobian(const Vec& x) const {
    const int N = cfg_.N;
    std::array<double, 9> J{};
    double r2 = 0;
    for (int c = 0; c < N; ++c) r2 += x[c] * x[c];
    const double r = std::sqrt(r2);
    if (r < 1e-14) return J;
    const Vec dir{x[0] / r, x[1] / r, x[2] / r};
    const double w_in = std::min(eps0_, cfg_.R / 2), w_out = eps0_;

    auto accumulate = [&](const HarmonicCoefficients& coef, double center, double width) {
        const double s = std::abs(r - center) / width;
        const double c = smooth_step_down(s);
        if (c == 0.0) return;
        const double dc = smooth_step_down_deriv(s) * (r > center ? 1.0 : -1.0) / width;
        const double xi = xi_at(coef, dir);
        const Vec gxi = xi_grad_at(coef, dir);
        // h = xi(dir) c(r) dir; Dh = dir (x) grad(xi c) + xi c (I - dir dir)/r
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                const double gradf = c / r * gxi[b] + xi * dc * dir[b];
                double v = dir[a] * gradf;
                v += xi * c * ((a == b ? 1.0 : 0.0) - dir[a] * dir[b]) / r;
                J[a * 3 + b] += v;
            }
    };
    accumulate(coeff_inner_, cfg_.R, w_in);
    accumulate(coeff_outer_, 1.0, w_out);
    return J;
}

PerturbationPath::Scalars PerturbationPath::scalars(double t) const {
    Scalars s;
    if (correction_ == Correction::none || t == 0.0) return s;
    const int N = cfg_.N;
    const auto& grid = *grid_;
    std::vector<double> v0(grid.size()), vt(grid.size());
    // inner volume ratio
    for (int idx = 0; idx < grid.size(); ++idx) {
        v0[idx] = std::pow(cfg_.R, N) / N;
        vt[idx] = std::pow(cfg_.R + t * xi_inner_[idx], N) / N;
    }
    s.scale_inner = std::pow(grid.integrate(v0) / grid.integrate(vt), 1.0 / N);
    // outer volume ratio and barycenter
    double vol_t = 0;
    for (int idx = 0; idx < grid.size(); ++idx) {
        v0[idx] = 1.0 / N;
        vt[idx] = std::pow(1.0 + t * xi_outer_[idx], N) / N;
    }
    vol_t = grid.integrate(vt);
    s.scale_outer = std::pow(grid.integrate(v0) / vol_t, 1.0 / N);
    if (correction_ == Correction::volume_and_barycenter) {
        std::vector<double> bi(grid.size());
        for (int c = 0; c < N; ++c) {
            for (int idx = 0; idx < grid.size(); ++idx)
                bi[idx] = grid.point(idx)[c] * std::pow(1.0 + t * xi_outer_[idx], N + 1.0) / (N + 1.0);
            s.center[c] = grid.integrate(bi) / vol_t;
        }
    }
    return s;
}

Vec PerturbationPath::displacement(double t, const Vec& x) const {
    return displacement_with(scalars(t), t, x);
}

Vec PerturbationPath::displacement_with(const Scalars& s, double t, const Vec& x) const {
    const Vec h = field(x);
    Vec y{x[0] + t * h[0], x[1] + t * h[1], x[2] + t * h[2]};
    if (correction_ == Correction::none) return sub(y, x);
    double r2 = 0;
    for (int c = 0; c < cfg_.N; ++c) r2 += x[c] * x[c];
    const double eta = smooth_step_down((std::sqrt(r2) - cfg_.R - eps0_) / eps0_);
    Vec phi_minus = sub({s.scale_inner * y[0], s.scale_inner * y[1], s.scale_inner * y[2]}, x);
    Vec yc = sub(y, s.center);
    Vec phi_plus = sub({s.scale_outer * yc[0], s.scale_outer * yc[1], s.scale_outer * yc[2]}, x);
    return {eta * phi_minus[0] + (1 - eta) * phi_plus[0],
            eta * phi_minus[1] + (1 - eta) * phi_plus[1],
            eta * phi_minus[2] + (1 - eta) * phi_plus[2]};
}

std::array<double, 9> PerturbationPath::jacobian(double t, const Vec& x) const {
    return jacobian_with(scalars(t), t, x);
}

std::array<double, 9> PerturbationPath::jacobian_with(const Scalars& s, double t,
                                                      const Vec& x) const {
    const int N = cfg_.N;
    const auto Dh = field_jacobian(x);
    std::array<double, 9> base{}; // D(Id + t h) - I = t Dh
    for (int a = 0; a < 9; ++a) base[a] = t * Dh[a];
    if (correction_ == Correction::none) return base;
    double r2 = 0;
    for (int c = 0; c < N; ++c) r2 += x[c] * x[c];
    const double r = std::sqrt(r2);
    const double se = (r - cfg_.R - eps0_) / eps0_;
    const double eta = smooth_step_down(se);
    const double deta = r > 1e-14 ? smooth_step_down_deriv(se) / eps0_ : 0.0;
    const Vec h = field(x);
    const Vec y{x[0] + t * h[0], x[1] + t * h[1], x[2] + t * h[2]};
    const Vec yc = sub(y, s.center);
    std::array<double, 9> out{};
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const double dy = (a == b ? 1.0 : 0.0) + t * Dh[a * 3 + b];
            const double dphi_minus = s.scale_inner * dy - (a == b ? 1.0 : 0.0);
            const double dphi_plus = s.scale_outer * dy - (a == b ? 1.0 : 0.0);
            out[a * 3 + b] = eta * dphi_minus + (1 - eta) * dphi_plus;
        }
    // blending term: (phi_- - phi_+) (x) grad(eta)
    if (deta != 0.0) {
        const Vec phi_minus = sub({s.scale_inner * y[0], s.scale_inner * y[1], s.scale_inner * y[2]}, x);
        const Vec phi_plus = sub({s.scale_outer * yc[0], s.scale_outer * yc[1], s.scale_outer * yc[2]}, x);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                out[a * 3 + b] += (phi_minus[a] - phi_plus[a]) * deta * x[b] / r;
    }
    return out;
}

Measures PerturbationPath::inner_domain(double t) const {
    const int N = cfg_.N;
    StarDomain d;
    d.grid = grid_;
    d.rho.resize(grid_->size());
    for (int idx = 0; idx < grid_->size(); ++idx) d.rho[idx] = cfg_.R + t * xi_inner_[idx];
    Measures m = measures(d);
    const double s = scalars(t).scale_inner;
    Measures out;
    out.vol = std::pow(s, N) * m.vol;
    out.per = std::pow(s, N - 1.0) * m.per;
    for (int c = 0; c < N; ++c) out.bar[c] = std::pow(s, N + 1.0) * m.bar[c];
    return out;
}

Measures PerturbationPath::outer_domain(double t) const {
    const int N = cfg_.N;
    StarDomain d;
    d.grid = grid_;
    d.rho.resize(grid_->size());
    for (int idx = 0; idx < grid_->size(); ++idx) d.rho[idx] = 1.0 + t * xi_outer_[idx];
    Measures m = measures(d);
    const Scalars sc = scalars(t);
    const double s = sc.scale_outer;
    Measures out;
    out.vol = std::pow(s, N) * m.vol;
    out.per = std::pow(s, N - 1.0) * m.per;
    for (int c = 0; c < N; ++c)
        out.bar[c] = std::pow(s, N + 1.0) * (m.bar[c] - sc.center[c] * m.vol);
    return out;
}

VectorField zero_field() {
    return {[](const Vec&) { return Vec{0, 0, 0}; },
            [](const Vec&) { return std::array<double, 9>{}; }};
}

VectorField path_field(const PerturbationPath& path, double t) {
    const auto s = path.scalars(t);
    return {[&path, s, t](const Vec& x) { return path.displacement_with(s, t, x); },
            [&path, s, t](const Vec& x) { return path.jacobian_with(s, t, x); }};
}

VectorField path_velocity(const PerturbationPath& path) {
    return {[&path](const Vec& x) { return path.field(x); },
            [&path](const Vec& x) { return path.field_jacobian(x); }};
}

PerturbationPath build_constrained_perturbation(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                                const std::vector<double>& xi_inner,
                                                const std::vector<double>& xi_outer) {
    const auto res = constraint_residuals(cfg, grid, xi_inner, xi_outer);
    const double tol = 1e-8;
    if (std::abs(res.first_order_inner) > tol)
        throw std::invalid_argument("build_constrained_perturbation: inner field violates the "
                                    "first-order volume condition, residual " +
                                    std::to_string(res.first_order_inner));
    if (std::abs(res.first_order_outer) > tol)
        throw std::invalid_argument("build_constrained_perturbation: outer field violates the "
                                    "first-order volume condition, residual " +
                                    std::to_string(res.first_order_outer));
    for (int c = 0; c < cfg.N; ++c)
        if (std::abs(res.barycenter_outer[c]) > tol)
            throw std::invalid_argument("build_constrained_perturbation: outer field violates the "
                                        "barycenter condition, residual " +
                                        std::to_string(res.barycenter_outer[c]));
    return PerturbationPath(cfg, grid, xi_inner, xi_outer,
                            PerturbationPath::Correction::volume_and_barycenter);
}

PerturbationPath make_volume_preserving_path(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                             const std::vector<double>& xi_inner,
                                             const std::vector<double>& xi_outer) {
    const auto res = constraint_residuals(cfg, grid, xi_inner, xi_outer);
    const double tol = 1e-8;
    if (std::abs(res.first_order_inner) > tol || std::abs(res.first_order_outer) > tol)
        throw std::invalid_argument("make_volume_preserving_path: fields must be zero-mean");
    return PerturbationPath(cfg, grid, xi_inner, xi_outer, PerturbationPath::Correction::volume);
}

PerturbationPath make_hadamard_path(const PhaseConfig& cfg, const SurfaceGrid& grid,
                                    const std::vector<double>& xi_inner,
                                    const std::vector<double>& xi_outer) {
    return PerturbationPath(cfg, grid, xi_inner, xi_outer, PerturbationPath::Correction::none);
}

} // namespace tptl
