#include "tptl/pde.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tptl {

namespace {

constexpr double kGauss = 0.5773502691896257645091488; // 1/sqrt(3)

struct Mat2 {
    double a, b, c, d; // row-major [[a,b],[c,d]]
    static Mat2 identity() { return {1, 0, 0, 1}; }
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 inv() const {
        const double dd = det();
        return {d / dd, -b / dd, -c / dd, a / dd};
    }
    Mat2 t() const { return {a, c, b, d}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }
};

Mat2 from_field(const std::array<double, 9>& J) { return {J[0], J[1], J[3], J[4]}; }

double trace_prod(const Mat2& x, const Mat2& y) { return (x * y).trace(); }

} // namespace

PolarGrid PolarGrid::make(double R, int n_r, int n_theta) {
    if (!(R > 0 && R < 1)) throw std::invalid_argument("PolarGrid: R must lie in (0,1)");
    if (n_r < 4 || n_theta < 8) throw std::invalid_argument("PolarGrid: grid too small");
    PolarGrid g;
    g.R = R;
    g.n_r = n_r;
    g.n_theta = n_theta;
    g.interface_ring = std::min(n_r - 2, std::max(2, int(std::lround(R * n_r))));
    g.radii.resize(n_r + 1);
    for (int i = 0; i <= g.interface_ring; ++i) g.radii[i] = R * i / g.interface_ring;
    for (int i = g.interface_ring + 1; i <= n_r; ++i)
        g.radii[i] = R + (1 - R) * (i - g.interface_ring) / (n_r - g.interface_ring);
    return g;
}

int PolarGrid::dof(int i, int j) const {
    if (i == 0) return 0;
    if (i == n_r) return -1;
    return 1 + (i - 1) * n_theta + ((j % n_theta) + n_theta) % n_theta;
}

double DiscreteField::at_node(int ring, int j) const {
    const int d = grid->dof(ring, j);
    return d < 0 ? 0.0 : values[d];
}

PdeOracle::PdeOracle(const PhaseConfig& cfg, int n_r, int n_theta)
    : cfg_(cfg), grid_(PolarGrid::make(cfg.R, n_r, n_theta)) {
    cfg_.validate();
    if (cfg.N != 2)
        throw std::invalid_argument(
            "PdeOracle: the full angular oracle is restricted to N = 2 (use radial_mapped_energy "
            "for radial N = 3 checks)");
}

Vec PdeOracle::quadrature_point(int q) const {
    const int qi = q % 4, e = q / 4;
    const int j = e % grid_.n_theta, i = e / grid_.n_theta;
    const double a = (qi % 2 == 0 ? -kGauss : kGauss);
    const double b = (qi / 2 == 0 ? -kGauss : kGauss);
    const double r = 0.5 * (grid_.radii[i] + grid_.radii[i + 1]) +
                     0.5 * (grid_.radii[i + 1] - grid_.radii[i]) * a;
    const double dtheta = 2 * std::numbers::pi / grid_.n_theta;
    const double th = (j + 0.5 + 0.5 * b) * dtheta;
    return {r * std::cos(th), r * std::sin(th), 0.0};
}

double PdeOracle::quadrature_weight(int q) const {
    const int e = q / 4;
    const int i = e / grid_.n_theta;
    const int qi = q % 4;
    const double a = (qi % 2 == 0 ? -kGauss : kGauss);
    const double dr = grid_.radii[i + 1] - grid_.radii[i];
    const double dtheta = 2 * std::numbers::pi / grid_.n_theta;
    const double r = 0.5 * (grid_.radii[i] + grid_.radii[i + 1]) + 0.5 * dr * a;
    return 0.25 * dr * dtheta * r;
}

PulledBackCoefficients PdeOracle::assemble_pullback(const VectorField& phi) const {
    PulledBackCoefficients co;
    co.n_qp = n_quadrature_points();
    co.a11.resize(co.n_qp);
    co.a12.resize(co.n_qp);
    co.a22.resize(co.n_qp);
    co.jac.resize(co.n_qp);
    co.min_jacobian = 1e300;
    co.min_eigenvalue = 1e300;
    for (int q = 0; q < co.n_qp; ++q) {
        const Vec x = quadrature_point(q);
        const double r = std::hypot(x[0], x[1]);
        const double sigma = r < grid_.R ? cfg_.sigma_c : 1.0;
        const Mat2 M = Mat2::identity() + from_field(phi.jacobian(x));
        const double J = M.det();
        if (!(J > 0))
            throw std::invalid_argument("assemble_pullback: degenerate map (J_phi <= 0)");
        const Mat2 U = M.inv();
        const Mat2 A = (U * U.t()) * (sigma * J);
        if (std::abs(A.b - A.c) > 1e-12 * (std::abs(A.a) + std::abs(A.d)))
            throw std::logic_error("assemble_pullback: A_phi lost symmetry");
        co.a11[q] = A.a;
        co.a12[q] = 0.5 * (A.b + A.c);
        co.a22[q] = A.d;
        co.jac[q] = J;
        const double tr = A.a + A.d, det = A.a * A.d - co.a12[q] * co.a12[q];
        const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
        co.min_jacobian = std::min(co.min_jacobian, J);
        co.min_eigenvalue = std::min(co.min_eigenvalue, lmin);
    }
    if (!(co.min_eigenvalue > 0))
        throw std::invalid_argument("assemble_pullback: A_phi not positive definite");
    return co;
}

Eigen::SparseMatrix<double> PdeOracle::assemble_matrix(const PulledBackCoefficients& co,
                                                       bool with_mass) const {
    const int n = grid_.n_dof();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(grid_.n_r) * grid_.n_theta * 16);
    const double dtheta = 2 * std::numbers::pi / grid_.n_theta;
    for (int i = 0; i < grid_.n_r; ++i) {
        const double r0 = grid_.radii[i], r1 = grid_.radii[i + 1];
        const double dr = r1 - r0;
        for (int j = 0; j < grid_.n_theta; ++j) {
            const int dofs[4] = {grid_.dof(i, j), grid_.dof(i + 1, j), grid_.dof(i + 1, j + 1),
                                 grid_.dof(i, j + 1)};
            double ke[4][4] = {};
            for (int qi = 0; qi < 4; ++qi) {
                const int q = 4 * (i * grid_.n_theta + j) + qi;
                const double a = (qi % 2 == 0 ? -kGauss : kGauss);
                const double b = (qi / 2 == 0 ? -kGauss : kGauss);
                const double r = 0.5 * (r0 + r1) + 0.5 * dr * a;
                const double th = (j + 0.5 + 0.5 * b) * dtheta;
                const double w = 0.25 * dr * dtheta * r;
                // bilinear shapes on [-1,1]^2, corners ordered as dofs[]
                const double Nv[4] = {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b),
                                      0.25 * (1 + a) * (1 + b), 0.25 * (1 - a) * (1 + b)};
                const double dNa[4] = {-0.25 * (1 - b), 0.25 * (1 - b), 0.25 * (1 + b),
                                       -0.25 * (1 + b)};
                const double dNb[4] = {-0.25 * (1 - a), -0.25 * (1 + a), 0.25 * (1 + a),
                                       0.25 * (1 - a)};
                const double er[2] = {std::cos(th), std::sin(th)};
                const double et[2] = {-std::sin(th), std::cos(th)};
                double gx[4], gy[4];
                for (int m = 0; m < 4; ++m) {
                    const double ddr = dNa[m] * 2 / dr;
                    const double ddt = dNb[m] * 2 / dtheta / r;
                    gx[m] = er[0] * ddr + et[0] * ddt;
                    gy[m] = er[1] * ddr + et[1] * ddt;
                }
                const double A11 = co.a11[q], A12 = co.a12[q], A22 = co.a22[q];
                for (int m = 0; m < 4; ++m) {
                    const double fx = A11 * gx[m] + A12 * gy[m];
                    const double fy = A12 * gx[m] + A22 * gy[m];
                    for (int l = 0; l < 4; ++l) {
                        double v = w * (fx * gx[l] + fy * gy[l]);
                        if (with_mass) v += w * cfg_.beta * co.jac[q] * Nv[m] * Nv[l];
                        ke[m][l] += v;
                    }
                }
            }
            for (int m = 0; m < 4; ++m)
                for (int l = 0; l < 4; ++l)
                    if (dofs[m] >= 0 && dofs[l] >= 0)
                        trip.emplace_back(dofs[m], dofs[l], ke[m][l]);
        }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

Eigen::VectorXd PdeOracle::assemble_load(const PulledBackCoefficients& co) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(grid_.n_dof());
    const double dtheta = 2 * std::numbers::pi / grid_.n_theta;
    for (int i = 0; i < grid_.n_r; ++i) {
        const double r0 = grid_.radii[i], r1 = grid_.radii[i + 1];
        const double dr = r1 - r0;
        for (int j = 0; j < grid_.n_theta; ++j) {
            const int dofs[4] = {grid_.dof(i, j), grid_.dof(i + 1, j), grid_.dof(i + 1, j + 1),
                                 grid_.dof(i, j + 1)};
            for (int qi = 0; qi < 4; ++qi) {
                const int q = 4 * (i * grid_.n_theta + j) + qi;
                const double a = (qi % 2 == 0 ? -kGauss : kGauss);
                const double b = (qi / 2 == 0 ? -kGauss : kGauss);
                const double r = 0.5 * (r0 + r1) + 0.5 * dr * a;
                const double w = 0.25 * dr * dtheta * r;
                const double Nv[4] = {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b),
                                      0.25 * (1 + a) * (1 + b), 0.25 * (1 - a) * (1 + b)};
                for (int m = 0; m < 4; ++m)
                    if (dofs[m] >= 0) out[dofs[m]] += w * co.jac[q] * Nv[m];
            }
        }
    }
    return out;
}

Eigen::VectorXd PdeOracle::solve_system(const Eigen::SparseMatrix<double>& K,
                                        const Eigen::VectorXd& rhs) const {
    if (solver_ == LinearSolver::ldlt) {
        if (!ldlt_) ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        if (!pattern_ready_) {
            ldlt_->analyzePattern(K);
            pattern_ready_ = true;
        }
        ldlt_->factorize(K);
        if (ldlt_->info() != Eigen::Success)
            throw std::runtime_error("PdeOracle: sparse factorization failed");
        return ldlt_->solve(rhs);
    }
    // Jacobi-preconditioned conjugate gradient, deterministic
    const double tol = 1e-10;
    const int max_iter = 200000;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd d = K.diagonal().cwiseInverse();
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = d.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0) return x;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd Kp = K * p;
        const double alpha = rz / p.dot(Kp);
        x += alpha * p;
        r -= alpha * Kp;
        if (r.norm() <= tol * rhs_norm) return x;
        z = d.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw std::runtime_error("PdeOracle: PCG did not converge, residual " +
                             std::to_string(r.norm() / rhs_norm));
}

DiscreteField PdeOracle::solve_pulled_back(const PulledBackCoefficients& co) const {
    const auto K = assemble_matrix(co, cfg_.beta > 0);
    const Eigen::VectorXd rhs = cfg_.gamma * assemble_load(co);
    const Eigen::VectorXd v = solve_system(K, rhs);
    DiscreteField f;
    f.grid = &grid_;
    f.values.assign(v.data(), v.data() + v.size());
    return f;
}

DiscreteField PdeOracle::solve_pulled_back(const VectorField& phi) const {
    return solve_pulled_back(assemble_pullback(phi));
}

double PdeOracle::energy(const PulledBackCoefficients& co, const DiscreteField& v) const {
    const auto K = assemble_matrix(co, false);
    Eigen::Map<const Eigen::VectorXd> vv(v.values.data(), v.values.size());
    return vv.dot(K * vv);
}

double PdeOracle::energy(const VectorField& phi) const {
    if (cfg_.beta != 0.0)
        throw std::invalid_argument("PdeOracle::energy: the torsional energy requires beta = 0");
    const auto co = assemble_pullback(phi);
    const auto K = assemble_matrix(co, false);
    const Eigen::VectorXd rhs = cfg_.gamma * assemble_load(co);
    const Eigen::VectorXd v = solve_system(K, rhs);
    return v.dot(K * v);
}

double PdeOracle::state_integral(const PulledBackCoefficients& co, const DiscreteField& v) const {
    Eigen::Map<const Eigen::VectorXd> vv(v.values.data(), v.values.size());
    return assemble_load(co).dot(vv);
}

PdeOracle::FdDerivatives PdeOracle::fd_shape_derivatives(const PerturbationPath& path,
                                                         double h) const {
    std::map<double, double> memo;
    auto e = [&](double t) {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        const double val = t == 0.0 ? energy(zero_field()) : energy(path_field(path, t));
        memo.emplace(t, val);
        return val;
    };
    auto first_at = [&](double s) {
        return (-e(2 * s) + 8 * e(s) - 8 * e(-s) + e(-2 * s)) / (12 * s);
    };
    auto second_at = [&](double s) {
        return (-e(2 * s) + 16 * e(s) - 30 * e(0) + 16 * e(-s) - e(-2 * s)) / (12 * s * s);
    };
    FdDerivatives out;
    out.e0 = e(0);
    const double f1 = first_at(h), f2 = first_at(h / 2);
    const double s1 = second_at(h), s2 = second_at(h / 2);
    out.first = (16 * f2 - f1) / 15;
    out.first_err = std::abs(f2 - f1) / 15;
    out.second = (16 * s2 - s1) / 15;
    out.second_err = std::abs(s2 - s1) / 15;
    out.richardson_monotone =
        std::abs(out.second - s2) <= std::abs(out.second - s1) + 1e-14 * std::abs(out.second);
    return out;
}

PulledBackCoefficients PdeOracle::derivative_coefficients(const VectorField& phi,
                                                          const VectorField* xi,
                                                          const VectorField* zeta, int order,
                                                          std::vector<double>* jprime) const {
    // order 1: A'(phi)zeta and J'(phi)zeta; order 2: A''(phi)(xi,zeta) and J''(phi)(xi,zeta)
    PulledBackCoefficients co;
    co.n_qp = n_quadrature_points();
    co.a11.resize(co.n_qp);
    co.a12.resize(co.n_qp);
    co.a22.resize(co.n_qp);
    co.jac.assign(co.n_qp, 0.0);
    if (jprime) jprime->assign(co.n_qp, 0.0);
    for (int q = 0; q < co.n_qp; ++q) {
        const Vec x = quadrature_point(q);
        const double r = std::hypot(x[0], x[1]);
        const double sigma = r < grid_.R ? cfg_.sigma_c : 1.0;
        const Mat2 M = Mat2::identity() + from_field(phi.jacobian(x));
        const double J = M.det();
        if (!(J > 0)) throw std::invalid_argument("derivative_coefficients: degenerate map");
        const Mat2 U = M.inv();
        const Mat2 Dz = zeta ? from_field(zeta->jacobian(x)) : Mat2{0, 0, 0, 0};
        const Mat2 dUz = -(U * Dz * U);
        const double dJz = J * trace_prod(U, Dz);
        Mat2 out{0, 0, 0, 0};
        double dj = 0;
        if (order == 1) {
            out = (U * U.t()) * dJz + (dUz * U.t() + U * dUz.t()) * J;
            out = out * sigma;
            dj = dJz;
        } else {
            const Mat2 Dx = xi ? from_field(xi->jacobian(x)) : Mat2{0, 0, 0, 0};
            const Mat2 dUx = -(U * Dx * U);
            const double dJx = J * trace_prod(U, Dx);
            const double ddJ = dJx * trace_prod(U, Dz) + J * trace_prod(dUx, Dz);
            const Mat2 ddU = -(dUx * Dz * U) - (U * Dz * dUx);
            out = (U * U.t()) * ddJ + (dUx * U.t() + U * dUx.t()) * dJz +
                  (dUz * U.t() + U * dUz.t()) * dJx +
                  (ddU * U.t() + dUz * dUx.t() + dUx * dUz.t() + U * ddU.t()) * J;
            out = out * sigma;
            dj = ddJ;
        }
        co.a11[q] = out.a;
        co.a12[q] = 0.5 * (out.b + out.c);
        co.a22[q] = out.d;
        if (jprime) (*jprime)[q] = dj;
    }
    return co;
}

PulledBackCoefficients PdeOracle::pullback_first_derivative(const VectorField& phi,
                                                            const VectorField& zeta) const {
    std::vector<double> jp;
    auto co = derivative_coefficients(phi, nullptr, &zeta, 1, &jp);
    co.jac = jp;
    return co;
}

PdeOracle::AnalyticDerivatives PdeOracle::analytic_phi_derivatives(const VectorField& phi,
                                                                   const VectorField& xi,
                                                                   const VectorField& zeta) const {
    if (cfg_.beta != 0.0)
        throw std::invalid_argument("analytic_phi_derivatives: requires beta = 0");
    const auto co = assemble_pullback(phi);
    const auto K = assemble_matrix(co, false);
    const Eigen::VectorXd load = assemble_load(co);
    std::vector<double> jz, jx, jzz;
    const auto coz = derivative_coefficients(phi, nullptr, &zeta, 1, &jz);
    const auto cox = derivative_coefficients(phi, nullptr, &xi, 1, &jx);
    const auto coxz = derivative_coefficients(phi, &xi, &zeta, 2, &jzz);
    const auto Kz = assemble_matrix(coz, false);
    const auto Kx = assemble_matrix(cox, false);
    const auto Kxz = assemble_matrix(coxz, false);
    PulledBackCoefficients jz_co = coz; // reuse container for the J-weighted loads
    jz_co.jac = jz;
    PulledBackCoefficients jx_co = cox;
    jx_co.jac = jx;
    PulledBackCoefficients jxz_co = coxz;
    jxz_co.jac = jzz;
    const Eigen::VectorXd bz = assemble_load(jz_co);
    const Eigen::VectorXd bx = assemble_load(jx_co);
    const Eigen::VectorXd bxz = assemble_load(jxz_co);

    const Eigen::VectorXd v = solve_system(K, cfg_.gamma * load);
    const Eigen::VectorXd vz = solve_system(K, cfg_.gamma * bz - Kz * v);
    const Eigen::VectorXd vx = solve_system(K, cfg_.gamma * bx - Kx * v);
    const Eigen::VectorXd vxz =
        solve_system(K, cfg_.gamma * bxz - Kxz * v - Kz * vx - Kx * vz);

    PdeOracle::AnalyticDerivatives out;
    out.first = v.dot(Kz * v) + 2 * vz.dot(K * v);
    out.second = v.dot(Kxz * v) + 2 * vx.dot(Kz * v) + 2 * vz.dot(Kx * v) + 2 * vxz.dot(K * v) +
                 2 * vx.dot(K * vz);
    return out;
}

std::vector<double> PdeOracle::boundary_normal_derivative(const DiscreteField& v) const {
    const int n = grid_.n_r;
    const double h = grid_.radii[n] - grid_.radii[n - 1];
    const double h2 = grid_.radii[n - 1] - grid_.radii[n - 2];
    std::vector<double> out(grid_.n_theta);
    for (int j = 0; j < grid_.n_theta; ++j) {
        // one-sided 2nd-order stencil on the (possibly) non-uniform last two spacings
        const double u0 = 0.0; // Dirichlet ring
        const double u1 = v.at_node(n - 1, j);
        const double u2 = v.at_node(n - 2, j);
        const double a = (2 * h + h2) / (h * (h + h2));
        const double b = -(h + h2) / (h * h2);
        const double c = h / (h2 * (h + h2));
        out[j] = a * u0 + b * u1 + c * u2;
    }
    return out;
}

std::vector<double> PdeOracle::boundary_angles() const {
    std::vector<double> out(grid_.n_theta);
    for (int j = 0; j < grid_.n_theta; ++j) out[j] = 2 * std::numbers::pi * j / grid_.n_theta;
    return out;
}

double radial_mapped_energy(const PhaseConfig& cfg, double r_in, double r_out, int n) {
    if (!(r_in > 0 && r_in < r_out))
        throw std::invalid_argument("radial_mapped_energy: need 0 < r_in < r_out");
    PhaseConfig scaled = cfg;
    scaled.R = r_in / r_out;
    scaled.beta = cfg.beta * r_out * r_out;
    return std::pow(r_out, cfg.N + 2.0) * radial_energy(scaled, n);
}

} // namespace tptl
