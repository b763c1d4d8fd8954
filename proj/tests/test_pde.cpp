#include <doctest.h>

#include "tptl/pde.hpp"
#include "tptl/spectrum.hpp"

#include <cmath>
#include <numbers>

using namespace tptl;

namespace {
constexpr double kPi = std::numbers::pi;

VectorField warp_field(double eps) {
    return {[eps](const Vec& x) {
                return Vec{eps * std::sin(x[0] + 2 * x[1]), eps * x[1] * std::cos(3 * x[0]), 0};
            },
            [eps](const Vec& x) {
                std::array<double, 9> J{};
                J[0] = eps * std::cos(x[0] + 2 * x[1]);
                J[1] = 2 * eps * std::cos(x[0] + 2 * x[1]);
                J[3] = -3 * eps * x[1] * std::sin(3 * x[0]);
                J[4] = eps * std::cos(3 * x[0]);
                return J;
            }};
}

VectorField dilation_field(double eps) {
    return {[eps](const Vec& x) { return Vec{eps * x[0], eps * x[1], 0}; },
            [eps](const Vec&) {
                std::array<double, 9> J{};
                J[0] = J[4] = eps;
                return J;
            }};
}
} // namespace

TEST_CASE("assemble_pullback") {
    PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
    PdeOracle oracle(cfg, 32, 32);

    SUBCASE("identity map gives A = sigma I, J = 1") {
        const auto co = oracle.assemble_pullback(zero_field());
        for (int q = 0; q < co.n_qp; ++q) {
            const auto x = oracle.quadrature_point(q);
            const double sigma = std::hypot(x[0], x[1]) < cfg.R ? cfg.sigma_c : 1.0;
            CHECK(co.a11[q] == doctest::Approx(sigma).epsilon(1e-14));
            CHECK(co.a22[q] == doctest::Approx(sigma).epsilon(1e-14));
            CHECK(std::abs(co.a12[q]) < 1e-14);
            CHECK(co.jac[q] == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    SUBCASE("uniform dilation: J = (1+eps)^2, A = sigma I in two dimensions") {
        const double eps = 0.03;
        const auto co = oracle.assemble_pullback(dilation_field(eps));
        for (int q = 0; q < co.n_qp; q += 97) {
            CHECK(co.jac[q] == doctest::Approx(std::pow(1 + eps, 2)).epsilon(1e-13));
            const auto x = oracle.quadrature_point(q);
            const double sigma = std::hypot(x[0], x[1]) < cfg.R ? cfg.sigma_c : 1.0;
            CHECK(co.a11[q] == doctest::Approx(sigma).epsilon(1e-13));
        }
    }
    SUBCASE("warped map: J agrees with finite differences of the map") {
        const auto f = warp_field(0.05);
        const auto co = oracle.assemble_pullback(f);
        const double step = 1e-6;
        for (int q = 0; q < co.n_qp; q += 211) {
            const auto x = oracle.quadrature_point(q);
            double Jfd[4];
            for (int col = 0; col < 2; ++col) {
                Vec xp = x, xm = x;
                xp[col] += step;
                xm[col] -= step;
                const auto vp = f.value(xp), vm = f.value(xm);
                Jfd[0 * 2 + col] = (vp[0] - vm[0]) / (2 * step);
                Jfd[1 * 2 + col] = (vp[1] - vm[1]) / (2 * step);
            }
            const double detfd = (1 + Jfd[0]) * (1 + Jfd[3]) - Jfd[1] * Jfd[2];
            CHECK(co.jac[q] == doctest::Approx(detfd).epsilon(1e-8));
        }
        CHECK(co.min_jacobian > 0);
        CHECK(co.min_eigenvalue > 0);
    }
    SUBCASE("degenerate maps are rejected") {
        CHECK_THROWS_AS(oracle.assemble_pullback(dilation_field(-1.1)), std::invalid_argument);
    }
}

TEST_CASE("solve_pulled_back against the radial oracles") {
    SUBCASE("torsion state: nodal agreement with the closed form") {
        PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
        PdeOracle oracle(cfg, 1024, 32);
        const auto v = oracle.solve_pulled_back(zero_field());
        const auto exact = solve_radial_torsion(cfg);
        double err = 0;
        for (int i = 0; i <= oracle.grid().n_r; ++i)
            err = std::max(err, std::abs(v.at_node(i, 3) - exact.value(oracle.grid().radii[i])));
        CHECK(err <= 1e-6);
        // discrete maximum principle sanity
        for (double val : v.values) CHECK(val >= -1e-12);
    }
    SUBCASE("beta = 1 matches the radial finite-difference oracle") {
        PhaseConfig cfg{2, 0.5, 2.0, 1.0, 1.0};
        PdeOracle oracle(cfg, 512, 16);
        const auto v = oracle.solve_pulled_back(zero_field());
        const auto ref = radial_fd_oracle(cfg, 8192);
        double err = 0;
        for (int i = 0; i <= oracle.grid().n_r; ++i)
            err = std::max(err, std::abs(v.at_node(i, 1) - ref.value(oracle.grid().radii[i])));
        CHECK(err <= 5e-6);
    }
    SUBCASE("PCG and LDLT agree") {
        PhaseConfig cfg{2, 0.4, 0.5, 0, 1};
        PdeOracle a(cfg, 64, 48);
        PdeOracle b(cfg, 64, 48);
        b.set_solver(LinearSolver::pcg);
        const auto va = a.solve_pulled_back(zero_field());
        const auto vb = b.solve_pulled_back(zero_field());
        double err = 0;
        for (std::size_t i = 0; i < va.values.size(); ++i)
            err = std::max(err, std::abs(va.values[i] - vb.values[i]));
        CHECK(err < 1e-10);
    }
    SUBCASE("mode-k maps perturb the state in angular modes {0, k, 2k} only") {
        PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
        const int ntheta = 64;
        PdeOracle oracle(cfg, 96, ntheta);
        auto grid = SurfaceGrid::circle(ntheta);
        const int k = 3;
        auto y = eval_harmonic_grid(grid, Mode{k, 1});
        auto path = make_hadamard_path(cfg, grid, y, std::vector<double>(ntheta, 0.0));
        const auto v0 = oracle.solve_pulled_back(zero_field());
        const auto vt = oracle.solve_pulled_back(path_field(path, 1e-2));
        // angular energy of the difference on a mid-shell ring
        const int ring = (oracle.grid().interface_ring + oracle.grid().n_r) / 2;
        std::vector<double> diff(ntheta);
        for (int j = 0; j < ntheta; ++j) diff[j] = vt.at_node(ring, j) - v0.at_node(ring, j);
        const auto coef = expand_boundary_field(grid, diff, ntheta / 4);
        double total = 0, kept = 0;
        for (int kk = 0; kk <= coef.k_max; ++kk)
            for (int i = 1; i <= mode_dimension(2, kk); ++i) {
                const double c2 = coef.at(Mode{kk, i}) * coef.at(Mode{kk, i});
                total += c2;
                if (kk == 0 || kk == k || kk == 2 * k) kept += c2;
            }
        CHECK(kept / total > 0.99);
    }
}

TEST_CASE("energy") {
    SUBCASE("one-phase disk energy pi/8 and convergence order 2") {
        PhaseConfig cfg{2, 0.5, 1.0, 0, 1};
        double prev_err = 0;
        for (int nr : {128, 256, 512}) {
            PdeOracle oracle(cfg, nr, 16);
            const double err = std::abs(oracle.energy(zero_field()) - kPi / 8);
            if (prev_err > 0) {
                const double order = std::log2(prev_err / err);
                CHECK(order == doctest::Approx(2.0).epsilon(0.10));
            }
            prev_err = err;
        }
    }
    SUBCASE("general config matches radial quadrature of the closed form") {
        for (double sc : {0.5, 2.0}) {
            PhaseConfig cfg{2, 0.5, sc, 0, 1};
            PdeOracle oracle(cfg, 512, 16);
            CHECK(oracle.energy(zero_field()) ==
                  doctest::Approx(radial_energy(cfg)).epsilon(1e-5));
        }
        // harder core -> larger rigidity
        PdeOracle soft({2, 0.5, 0.5, 0, 1}, 128, 16), hard({2, 0.5, 2.0, 0, 1}, 128, 16);
        CHECK(soft.energy(zero_field()) > hard.energy(zero_field()));
    }
    SUBCASE("discrete energy identity: int sigma |grad u|^2 = int u") {
        PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
        PdeOracle oracle(cfg, 128, 32);
        const auto co = oracle.assemble_pullback(zero_field());
        const auto v = oracle.solve_pulled_back(co);
        CHECK(oracle.energy(co, v) ==
              doctest::Approx(oracle.state_integral(co, v)).epsilon(1e-12));
    }
}

TEST_CASE("fd and analytic shape derivatives") {
    PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
    const int ntheta = 64;
    auto grid = SurfaceGrid::circle(ntheta);
    const std::vector<double> zero(ntheta, 0.0);

    SUBCASE("uniform outer inflation: e'(0) matches the l1 form within 0.5%") {
        PdeOracle oracle(cfg, 256, 32);
        const std::vector<double> c(ntheta, 1.0);
        auto path = make_hadamard_path(cfg, grid, zero, c);
        const auto fd = oracle.fd_shape_derivatives(path);
        const double l1 = first_derivative_form(cfg, grid, zero, c);
        CHECK(fd.first == doctest::Approx(l1).epsilon(5e-3));
        CHECK(fd.richardson_monotone);
        // same check through the radial mapped-energy oracle, N = 2 and N = 3
        for (int N : {2, 3}) {
            PhaseConfig cfgN{N, 0.5, 2.0, 0, 1};
            const double h = 1e-3;
            auto e = [&](double t) { return radial_mapped_energy(cfgN, cfgN.R, 1 + t); };
            const double ep = (e(h) - e(-h)) / (2 * h);
            auto gN = N == 2 ? SurfaceGrid::circle(64) : SurfaceGrid::sphere(12, 24);
            const std::vector<double> zn(gN.size(), 0.0), cn(gN.size(), 1.0);
            CHECK(ep == doctest::Approx(first_derivative_form(cfgN, gN, zn, cn)).epsilon(5e-3));
        }
    }
    SUBCASE("analytic first derivative matches finite differences") {
        PdeOracle oracle(cfg, 128, 48);
        auto y = eval_harmonic_grid(grid, Mode{2, 1});
        auto path = make_hadamard_path(cfg, grid, y, y);
        const auto zeta = path_velocity(path);
        const auto an = oracle.analytic_phi_derivatives(zero_field(), zeta, zeta);
        const auto fd = oracle.fd_shape_derivatives(path);
        CHECK(an.first == doctest::Approx(fd.first).epsilon(5e-3).scale(1.0));
        CHECK(an.second == doctest::Approx(fd.second).epsilon(5e-3).scale(1.0));
    }
    SUBCASE("E'' is symmetric in its two directions") {
        PdeOracle oracle(cfg, 96, 48);
        auto y2 = eval_harmonic_grid(grid, Mode{2, 1});
        auto y3 = eval_harmonic_grid(grid, Mode{3, 2});
        auto p1 = make_hadamard_path(cfg, grid, y2, zero);
        auto p2 = make_hadamard_path(cfg, grid, zero, y3);
        const auto xi = path_velocity(p1);
        const auto zeta = path_velocity(p2);
        const auto phi = path_field(p1, 4e-3); // a non-trivial base map
        const auto a = oracle.analytic_phi_derivatives(phi, xi, zeta);
        const auto b = oracle.analytic_phi_derivatives(phi, zeta, xi);
        CHECK(a.second == doctest::Approx(b.second).epsilon(1e-9));
    }
    SUBCASE("A'(0)zeta matches finite differences of assemble_pullback entrywise") {
        PdeOracle oracle(cfg, 24, 24);
        auto y = eval_harmonic_grid(grid, Mode{2, 1});
        auto path = make_hadamard_path(cfg, grid, y, y);
        const auto zeta = path_velocity(path);
        const auto an = oracle.pullback_first_derivative(zero_field(), zeta);
        const double s = 1e-5;
        const auto cop = oracle.assemble_pullback(path_field(path, s));
        const auto com = oracle.assemble_pullback(path_field(path, -s));
        for (int q = 0; q < an.n_qp; q += 53) {
            CHECK(an.a11[q] ==
                  doctest::Approx((cop.a11[q] - com.a11[q]) / (2 * s)).epsilon(1e-6).scale(1.0));
            CHECK(an.a12[q] ==
                  doctest::Approx((cop.a12[q] - com.a12[q]) / (2 * s)).epsilon(1e-6).scale(1.0));
            CHECK(an.a22[q] ==
                  doctest::Approx((cop.a22[q] - com.a22[q]) / (2 * s)).epsilon(1e-6).scale(1.0));
            CHECK(an.jac[q] ==
                  doctest::Approx((cop.jac[q] - com.jac[q]) / (2 * s)).epsilon(1e-6).scale(1.0));
        }
    }
}
