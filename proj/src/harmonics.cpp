#include "tptl/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tptl {

namespace {
constexpr double kPi = std::numbers::pi;

// Fully normalized associated Legendre Pical_k^m(x) (Condon-Shortley phase dropped),
// such that Y_{k,0} = P(k,0) and Y_{k,m} = sqrt(2) P(k,m) {cos,sin}(m phi) are
// orthonormal on S^2. Three-term recurrence, stable for the degrees used here.
double normalized_legendre(int k, int m, double x) {
    const double s2 = std::max(0.0, 1.0 - x * x);
    const double s = std::sqrt(s2);
    double pmm = std::sqrt(1.0 / (4.0 * kPi));
    for (int mm = 1; mm <= m; ++mm)
        pmm *= std::sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * s;
    if (k == m) return pmm;
    double pm1 = std::sqrt(2.0 * m + 3.0) * x * pmm; // degree m+1
    if (k == m + 1) return pm1;
    double p = 0.0;
    for (int kk = m + 2; kk <= k; ++kk) {
        const double a = std::sqrt((4.0 * kk * kk - 1.0) / (double(kk) * kk - double(m) * m));
        const double b =
            std::sqrt((double(kk - 1) * (kk - 1) - double(m) * m) / (4.0 * double(kk - 1) * (kk - 1) - 1.0));
        p = a * (x * pm1 - b * pmm);
        pmm = pm1;
        pm1 = p;
    }
    return p;
}
} // namespace

std::int64_t mode_dimension(int N, int k) {
    if (N < 2) throw std::invalid_argument("mode_dimension: N must be >= 2");
    if (k < 0) throw std::invalid_argument("mode_dimension: k must be >= 0");
    if (k == 0) return 1;
    // (2k+N-2) * (k+N-3)! / (k! (N-2)!) = (2k+N-2) * C(k+N-3, N-2) / k, integer-exact
    std::int64_t binom = 1;
    for (int j = 1; j <= N - 2; ++j) binom = binom * (k - 1 + j) / j;
    return binom * (2 * k + N - 2) / k;
}

double lb_eigenvalue(int N, int k) {
    if (N < 2 || k < 0) throw std::invalid_argument("lb_eigenvalue: need N >= 2, k >= 0");
    return double(k) * (k + N - 2);
}

double sphere_mean_curvature(int N, double R) {
    if (R <= 0) throw std::invalid_argument("sphere_mean_curvature: R must be positive");
    return (N - 1) / R;
}

SurfaceGrid SurfaceGrid::circle(int n_theta) {
    if (n_theta < 4) throw std::invalid_argument("SurfaceGrid::circle: need at least 4 nodes");
    SurfaceGrid g;
    g.N_ = 2;
    g.n_theta_ = n_theta;
    g.theta_.resize(n_theta);
    g.weights_.assign(n_theta, 2.0 * kPi / n_theta);
    for (int j = 0; j < n_theta; ++j) g.theta_[j] = 2.0 * kPi * j / n_theta;
    return g;
}

SurfaceGrid SurfaceGrid::sphere(int n_polar, int n_azim) {
    if (n_polar < 2 || n_azim < 4)
        throw std::invalid_argument("SurfaceGrid::sphere: grid too small");
    SurfaceGrid g;
    g.N_ = 3;
    g.n_polar_ = n_polar;
    g.n_azim_ = n_azim;
    std::vector<double> gw;
    gauss_legendre(n_polar, g.polar_x_, gw);
    g.azim_.resize(n_azim);
    for (int ia = 0; ia < n_azim; ++ia) g.azim_[ia] = 2.0 * kPi * ia / n_azim;
    g.weights_.resize(std::size_t(n_polar) * n_azim);
    const double wphi = 2.0 * kPi / n_azim;
    for (int ip = 0; ip < n_polar; ++ip)
        for (int ia = 0; ia < n_azim; ++ia) g.weights_[std::size_t(ip) * n_azim + ia] = gw[ip] * wphi;
    return g;
}

std::array<double, 3> SurfaceGrid::point(int idx) const {
    if (N_ == 2) {
        return {std::cos(theta_[idx]), std::sin(theta_[idx]), 0.0};
    }
    const int ip = idx / n_azim_, ia = idx % n_azim_;
    const double x = polar_x_[ip];
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    return {s * std::cos(azim_[ia]), s * std::sin(azim_[ia]), x};
}

double SurfaceGrid::integrate(const std::vector<double>& field) const {
    if (field.size() != weights_.size())
        throw std::invalid_argument("SurfaceGrid::integrate: field size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) acc += field[i] * weights_[i];
    return acc;
}

namespace {
// value and d/dx of the fully normalized Legendre function, propagated
// through the same recurrences as normalized_legendre
void normalized_legendre_deriv(int k, int m, double x, double& val, double& dval) {
    const double s2 = std::max(0.0, 1.0 - x * x);
    const double s = std::sqrt(s2);
    const double dsdx = s > 0 ? -x / s : 0.0;
    double pmm = std::sqrt(1.0 / (4.0 * kPi)), dpmm = 0.0;
    for (int mm = 1; mm <= m; ++mm) {
        const double a = std::sqrt((2.0 * mm + 1.0) / (2.0 * mm));
        dpmm = a * (dsdx * pmm + s * dpmm);
        pmm = a * s * pmm;
    }
    if (k == m) {
        val = pmm;
        dval = dpmm;
        return;
    }
    const double b = std::sqrt(2.0 * m + 3.0);
    double pm1 = b * x * pmm, dpm1 = b * (pmm + x * dpmm);
    if (k == m + 1) {
        val = pm1;
        dval = dpm1;
        return;
    }
    double p = 0, dp = 0;
    for (int kk = m + 2; kk <= k; ++kk) {
        const double a = std::sqrt((4.0 * kk * kk - 1.0) / (double(kk) * kk - double(m) * m));
        const double c =
            std::sqrt((double(kk - 1) * (kk - 1) - double(m) * m) / (4.0 * double(kk - 1) * (kk - 1) - 1.0));
        p = a * (x * pm1 - c * pmm);
        dp = a * (pm1 + x * dpm1 - c * dpmm);
        pmm = pm1;
        dpmm = dpm1;
        pm1 = p;
        dpm1 = dp;
    }
    val = p;
    dval = dp;
}
} // namespace

HarmonicValue eval_harmonic_gradient(int N, Mode mode, const std::array<double, 3>& p) {
    const int k = mode.k, i = mode.i;
    if (k < 0 || i < 1 || i > mode_dimension(N, k))
        throw std::invalid_argument("eval_harmonic_gradient: invalid mode index");
    HarmonicValue out{0.0, {0.0, 0.0, 0.0}};
    if (N == 2) {
        if (k == 0) {
            out.value = 1.0 / std::sqrt(2.0 * kPi);
            return out;
        }
        const double t = std::atan2(p[1], p[0]);
        const double c = 1.0 / std::sqrt(kPi);
        const double val = i == 1 ? c * std::cos(k * t) : c * std::sin(k * t);
        const double dval = i == 1 ? -c * k * std::sin(k * t) : c * k * std::cos(k * t);
        out.value = val;
        out.grad_tau = {-std::sin(t) * dval, std::cos(t) * dval, 0.0};
        return out;
    }
    if (N != 3)
        throw std::invalid_argument("eval_harmonic_gradient: only N in {2,3}");
    const double x = p[2];
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    if (k == 0) {
        out.value = 1.0 / std::sqrt(4.0 * kPi);
        return out;
    }
    const double phi = std::atan2(p[1], p[0]);
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const std::array<double, 3> e_pol{x * cphi, x * sphi, -s};
    const std::array<double, 3> e_azi{-sphi, cphi, 0.0};
    int m;
    double ang, dang; // azimuthal factor and its phi derivative
    if (i == 2 * k + 1) {
        m = 0;
        ang = 1.0;
        dang = 0.0;
    } else {
        m = (i + 1) / 2;
        if (i % 2 == 1) {
            ang = std::sqrt(2.0) * std::cos(m * phi);
            dang = -std::sqrt(2.0) * m * std::sin(m * phi);
        } else {
            ang = std::sqrt(2.0) * std::sin(m * phi);
            dang = std::sqrt(2.0) * m * std::cos(m * phi);
        }
    }
    double leg, dleg;
    normalized_legendre_deriv(k, m, x, leg, dleg);
    out.value = leg * ang;
    const double dpolar = -s * dleg * ang;          // d/d(polar angle)
    const double dazim_over_s = s > 1e-300 ? leg * dang / s : 0.0;
    for (int c = 0; c < 3; ++c) out.grad_tau[c] = e_pol[c] * dpolar + e_azi[c] * dazim_over_s;
    return out;
}

double eval_harmonic(int N, Mode mode, const std::array<double, 3>& p) {
    const int k = mode.k, i = mode.i;
    if (k < 0 || i < 1 || i > mode_dimension(N, k))
        throw std::invalid_argument("eval_harmonic: invalid mode index");
    if (N == 2) {
        if (k == 0) return 1.0 / std::sqrt(2.0 * kPi);
        const double t = std::atan2(p[1], p[0]);
        const double c = 1.0 / std::sqrt(kPi);
        return i == 1 ? c * std::cos(k * t) : c * std::sin(k * t);
    }
    if (N == 3) {
        const double x = p[2];
        if (k == 0) return normalized_legendre(0, 0, x);
        if (i == 2 * k + 1) return normalized_legendre(k, 0, x); // zonal
        const int m = (i + 1) / 2;
        const double phi = std::atan2(p[1], p[0]);
        const double base = std::sqrt(2.0) * normalized_legendre(k, m, x);
        return (i % 2 == 1) ? base * std::cos(m * phi) : base * std::sin(m * phi);
    }
    throw std::invalid_argument("eval_harmonic: pointwise evaluation only for N in {2,3}");
}

std::vector<double> eval_harmonic_grid(const SurfaceGrid& grid, Mode mode) {
    std::vector<double> out(grid.size());
    for (int idx = 0; idx < grid.size(); ++idx) out[idx] = eval_harmonic(grid.dim(), mode, grid.point(idx));
    return out;
}

int HarmonicCoefficients::offset(int k) const {
    int off = 0;
    for (int kk = 0; kk < k; ++kk) off += int(mode_dimension(N, kk));
    return off;
}

double& HarmonicCoefficients::at(Mode m) { return values[offset(m.k) + m.i - 1]; }
double HarmonicCoefficients::at(Mode m) const { return values[offset(m.k) + m.i - 1]; }

double HarmonicCoefficients::l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

HarmonicCoefficients expand_boundary_field(const SurfaceGrid& grid,
                                           const std::vector<double>& samples, int k_max) {
    const int N = grid.dim();
    if (N == 2 && grid.n_theta() < 4 * std::max(1, k_max))
        throw std::invalid_argument("expand_boundary_field: circle grid under-resolved for k_max");
    if (N == 3 && (grid.n_polar() < k_max + 2 || grid.n_azim() < 4 * std::max(1, k_max)))
        throw std::invalid_argument("expand_boundary_field: sphere grid under-resolved for k_max");
    HarmonicCoefficients c;
    c.N = N;
    c.k_max = k_max;
    int total = 0;
    for (int k = 0; k <= k_max; ++k) total += int(mode_dimension(N, k));
    c.values.resize(total);
    std::vector<double> prod(grid.size());
    for (int k = 0; k <= k_max; ++k) {
        for (int i = 1; i <= mode_dimension(N, k); ++i) {
            const auto y = eval_harmonic_grid(grid, Mode{k, i});
            for (int idx = 0; idx < grid.size(); ++idx) prod[idx] = y[idx] * samples[idx];
            c.at(Mode{k, i}) = grid.integrate(prod);
        }
    }
    return c;
}

std::vector<double> synthesize_field(const SurfaceGrid& grid, const HarmonicCoefficients& coeffs) {
    std::vector<double> out(grid.size(), 0.0);
    for (int k = 0; k <= coeffs.k_max; ++k) {
        for (int i = 1; i <= mode_dimension(coeffs.N, k); ++i) {
            const double a = coeffs.at(Mode{k, i});
            if (a == 0.0) continue;
            const auto y = eval_harmonic_grid(grid, Mode{k, i});
            for (int idx = 0; idx < grid.size(); ++idx) out[idx] += a * y[idx];
        }
    }
    return out;
}

namespace {
// Fornberg weights for the first derivative at x0 from the given nodes
std::vector<double> fd_weights_first(double x0, const std::vector<double>& xs) {
    const int n = int(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    double c1 = 1.0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        const double c4 = xs[i - 1] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                c[i][1] = c1 * (c[i - 1][0] - c4 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c4 * c[i - 1][0] / c2;
            }
            const double c5 = xs[i] - x0;
            c[j][1] = (c5 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c5 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = c[i][1];
    return out;
}
} // namespace

TangentialOps::TangentialOps(const SurfaceGrid& grid) : grid_(grid) {
    if (grid.dim() == 3) {
        // banded differentiation in the polar angle on the Gauss-Legendre rows:
        // 5-node local Lagrange stencils (Fornberg weights), robust for the
        // nearly-equispaced theta distribution of the nodes
        const int n = grid.n_polar();
        std::vector<double> theta(n);
        for (int i = 0; i < n; ++i) theta[i] = std::acos(grid.polar_x(i));
        polar_diff_.assign(std::size_t(n) * n, 0.0);
        const int width = std::min(5, n);
        for (int i = 0; i < n; ++i) {
            int lo = std::max(0, std::min(i - width / 2, n - width));
            std::vector<double> xs(theta.begin() + lo, theta.begin() + lo + width);
            const auto w = fd_weights_first(theta[i], xs);
            for (int j = 0; j < width; ++j) polar_diff_[std::size_t(i) * n + lo + j] = w[j];
        }
    }
}

// 4th-order centered difference on a periodic family of nodes
std::vector<double> TangentialOps::dperiodic(const std::vector<double>& f, int stride, int count,
                                             int offset, double spacing) const {
    std::vector<double> out(count);
    auto at = [&](int j) { return f[std::size_t(offset) + std::size_t(((j % count) + count) % count) * stride]; };
    for (int j = 0; j < count; ++j)
        out[j] = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * spacing);
    return out;
}

// d/d(polar angle) along the polar direction, for every azimuth
std::vector<double> TangentialOps::dpolar(const std::vector<double>& f) const {
    const int np = grid_.n_polar(), na = grid_.n_azim();
    std::vector<double> out(f.size(), 0.0);
    for (int ia = 0; ia < na; ++ia) {
        for (int i = 0; i < np; ++i) {
            double acc = 0.0;
            for (int j = 0; j < np; ++j)
                acc += polar_diff_[std::size_t(i) * np + j] * f[std::size_t(j) * na + ia];
            out[std::size_t(i) * na + ia] = acc;
        }
    }
    return out;
}

std::vector<double> TangentialOps::dazim(const std::vector<double>& f) const {
    const int np = grid_.n_polar(), na = grid_.n_azim();
    const double h = 2.0 * kPi / na;
    std::vector<double> out(f.size());
    for (int ip = 0; ip < np; ++ip) {
        auto row = dperiodic(f, 1, na, ip * na, h);
        for (int ia = 0; ia < na; ++ia) out[std::size_t(ip) * na + ia] = row[ia];
    }
    return out;
}

std::vector<std::vector<double>> TangentialOps::grad_tau(const std::vector<double>& field) const {
    const int n = grid_.size();
    if (grid_.dim() == 2) {
        const double h = 2.0 * kPi / grid_.n_theta();
        auto df = dperiodic(field, 1, grid_.n_theta(), 0, h);
        std::vector<std::vector<double>> out(2, std::vector<double>(n));
        for (int j = 0; j < n; ++j) {
            const double t = grid_.theta(j);
            out[0][j] = -std::sin(t) * df[j];
            out[1][j] = std::cos(t) * df[j];
        }
        return out;
    }
    // grad_tau f = e_polar df/dpolar + e_azim (1/sin) df/dazim
    const auto dft = dpolar(field);
    const auto dfp = dazim(field);
    const int na = grid_.n_azim();
    std::vector<std::vector<double>> out(3, std::vector<double>(n));
    for (int idx = 0; idx < n; ++idx) {
        const int ip = idx / na, ia = idx % na;
        const double x = grid_.polar_x(ip);
        const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
        const double cphi = std::cos(grid_.azim(ia)), sphi = std::sin(grid_.azim(ia));
        // e_polar = (x cphi, x sphi, -s); e_azim = (-sphi, cphi, 0)
        const double dth = dft[idx];
        const double dph = dfp[idx] / s;
        out[0][idx] = x * cphi * dth - sphi * dph;
        out[1][idx] = x * sphi * dth + cphi * dph;
        out[2][idx] = -s * dth;
    }
    return out;
}

std::vector<double> TangentialOps::div_tau(const std::vector<std::vector<double>>& field) const {
    const int N = grid_.dim();
    if (int(field.size()) != N) throw std::invalid_argument("div_tau: expected N ambient components");
    std::vector<double> out(grid_.size(), 0.0);
    for (int c = 0; c < N; ++c) {
        auto g = grad_tau(field[c]);
        for (int idx = 0; idx < grid_.size(); ++idx) out[idx] += g[c][idx];
    }
    return out;
}

std::vector<double> TangentialOps::laplace_beltrami(const std::vector<double>& field) const {
    if (grid_.dim() == 2) {
        // second derivative in arclength: 4th-order periodic stencil
        const int n = grid_.n_theta();
        const double h = 2.0 * kPi / n;
        std::vector<double> out(n);
        auto at = [&](int j) { return field[std::size_t(((j % n) + n) % n)]; };
        for (int j = 0; j < n; ++j)
            out[j] = (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2)) /
                     (12.0 * h * h);
        return out;
    }
    return div_tau(grad_tau(field));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

} // namespace tptl
