#include <doctest.h>

#include "tptl/spectrum.hpp"

#include <cmath>
#include <numbers>

using namespace tptl;

namespace {
const PhaseConfig kBase{2, 0.5, 2.0, 0.0, 1.0};
}

TEST_CASE("first_derivative_form") {
    auto grid = SurfaceGrid::circle(128);
    const std::vector<double> zero(grid.size(), 0.0);

    SUBCASE("zero-mean harmonics are critical directions") {
        for (double sc : {0.5, 1.0, 2.0})
            for (int k = 1; k <= 8; ++k) {
                PhaseConfig cfg{2, 0.5, sc, 0, 1};
                auto y = eval_harmonic_grid(grid, Mode{k, 1});
                CHECK(std::abs(first_derivative_form(cfg, grid, y, zero)) < 1e-12);
                CHECK(std::abs(first_derivative_form(cfg, grid, zero, y)) < 1e-12);
            }
    }
    SUBCASE("constant outer field gives c Per / N^2") {
        PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
        const double c = 0.7;
        const std::vector<double> xo(grid.size(), c);
        CHECK(first_derivative_form(cfg, grid, zero, xo) ==
              doctest::Approx(c * 2 * std::numbers::pi / 4).epsilon(1e-12));
    }
    SUBCASE("sigma_c = 1 kills the inner form") {
        PhaseConfig cfg{2, 0.5, 1.0, 0, 1};
        std::vector<double> xi(grid.size());
        for (int j = 0; j < grid.size(); ++j) xi[j] = 1.0 + grid.point(j)[0]; // arbitrary
        CHECK(std::abs(first_derivative_form(cfg, grid, xi, zero)) < 1e-14);
    }
}

TEST_CASE("printed closed-form path: regression table and structural zeros") {
    // frozen from the first run of the verbatim displays (N=2, R=0.5, sigma_c=2);
    // guards against accidental edits of the printed formulas
    const double table[8][4] = {
        {1, -0.15340909090909091, 0.40909090909090912, 0.18181818181818182},
        {2, -0.1702127659574468, -0.042553191489361701, 0.1702127659574468},
        {3, -0.1888089005235602, -0.51570680628272247, 0.1256544502617801},
        {4, -0.20876792698826596, -1.0052151238591918, 0.08344198174706649},
        {5, -0.2293023445131879, -1.5016281341582547, 0.052100293064148484},
        {6, -0.25004069341580532, -2.000488320989664, 0.031252543338487836},
        {7, -0.27084520152184088, -2.5001424182620902, 0.018229537547557528},
        {8, -0.29167005752592734, -3.0000406903111281, 0.010416719648842615},
    };
    for (int k = 1; k <= 8; ++k) {
        const auto row = second_derivative_mode(kBase, k);
        CHECK(row.e_minus == doctest::Approx(table[k - 1][1]).epsilon(1e-14));
        CHECK(row.e_plus == doctest::Approx(table[k - 1][2]).epsilon(1e-14));
        CHECK(row.e_res == doctest::Approx(table[k - 1][3]).epsilon(1e-14));
    }
    // sigma_c = 1 zeroes the inner spectrum in both paths
    PhaseConfig one{2, 0.5, 1.0, 0, 1};
    for (int k : {1, 2, 5}) {
        CHECK(second_derivative_mode(one, k).e_minus == 0.0);
        CHECK(std::abs(second_derivative_mode_integral(one, k).e_minus) < 1e-15);
    }
}

TEST_CASE("boundary-integral path identities") {
    SUBCASE("k = 1: equal values, resonance -2x, translation null direction") {
        for (int N : {2, 3})
            for (double R : {0.2, 0.5, 0.8})
                for (double sc : {0.1, 0.5, 2.0, 10.0}) {
                    PhaseConfig cfg{N, R, sc, 0, 1};
                    const auto r = second_derivative_mode_integral(cfg, 1);
                    CHECK(r.e_minus == doctest::Approx(r.e_plus).epsilon(1e-10));
                    CHECK(r.e_res == doctest::Approx(-2 * r.e_minus).epsilon(1e-10));
                    CHECK(std::abs(r.e_minus + r.e_plus + r.e_res) <
                          1e-10 * std::max(1.0, std::abs(r.e_minus)));
                    const double claim = 2 * (1 - sc) / mode_coefficients(cfg, 1).F;
                    CHECK(r.e_minus == doctest::Approx(claim).epsilon(1e-10));
                }
    }
    SUBCASE("e_res agrees between the two paths even where e_minus/e_plus do not") {
        for (int k = 1; k <= 10; ++k) {
            const auto a = second_derivative_mode(kBase, k);
            const auto b = second_derivative_mode_integral(kBase, k);
            CHECK(a.e_res == doctest::Approx(b.e_res).epsilon(1e-12));
        }
    }
    SUBCASE("SpectrumRow discriminant is definitional") {
        for (int k : {1, 3, 7}) {
            const auto r = second_derivative_mode_integral(kBase, k);
            CHECK(r.discriminant ==
                  doctest::Approx(r.e_res * r.e_res - 4 * r.e_minus * r.e_plus).epsilon(1e-10));
        }
    }
}

TEST_CASE("quadratic_form") {
    auto amps = ModeAmplitudes::zero(2, 6);
    SUBCASE("zero amplitudes") { CHECK(quadratic_form(kBase, amps) == 0.0); }
    SUBCASE("outer-only single mode collapses the sum") {
        amps.plus_at(Mode{4, 2}) = 1.5;
        const auto row = second_derivative_mode_integral(kBase, 4);
        CHECK(quadratic_form(kBase, amps) == doctest::Approx(2.25 * row.e_plus).epsilon(1e-14));
    }
    SUBCASE("no cross term between distinct degrees") {
        amps.minus_at(Mode{3, 1}) = 1.0;
        amps.plus_at(Mode{5, 1}) = 1.0;
        const auto r3 = second_derivative_mode_integral(kBase, 3);
        const auto r5 = second_derivative_mode_integral(kBase, 5);
        CHECK(quadratic_form(kBase, amps) ==
              doctest::Approx(r3.e_minus + r5.e_plus).epsilon(1e-14));
    }
    SUBCASE("no cross term between distinct indices of one degree") {
        amps.minus_at(Mode{5, 1}) = 2.0;
        amps.plus_at(Mode{5, 2}) = 3.0;
        const auto r5 = second_derivative_mode_integral(kBase, 5);
        CHECK(quadratic_form(kBase, amps) ==
              doctest::Approx(4 * r5.e_minus + 9 * r5.e_plus).epsilon(1e-14));
    }
    SUBCASE("homogeneity of degree two") {
        amps.minus_at(Mode{2, 1}) = 0.3;
        amps.plus_at(Mode{2, 1}) = -0.8;
        const double q1 = quadratic_form(kBase, amps);
        for (double& v : amps.alpha_minus) v *= 5;
        for (double& v : amps.alpha_plus) v *= 5;
        CHECK(quadratic_form(kBase, amps) == doctest::Approx(25 * q1).epsilon(1e-13));
    }
    SUBCASE("barycenter admissibility flag") {
        auto a = ModeAmplitudes::zero(2, 3);
        CHECK(a.barycenter_admissible());
        a.plus_at(Mode{1, 2}) = 1e-3;
        CHECK(!a.barycenter_admissible());
        a.plus_at(Mode{1, 2}) = 0.0;
        a.minus_at(Mode{1, 1}) = 1.0; // inner translations stay admissible
        CHECK(a.barycenter_admissible());
    }
}

TEST_CASE("resonance_analysis") {
    SUBCASE("k = 1 is degenerate for sigma_c > 1") {
        for (double sc : {1.5, 2.0, 10.0}) {
            PhaseConfig cfg{2, 0.5, sc, 0, 1};
            const auto res = resonance_analysis(cfg, 1);
            CHECK(std::abs(res.delta_definitional) < 1e-12);
            CHECK(std::abs(res.delta_printed) < 1e-12);
        }
    }
    SUBCASE("k >= 2, sigma_c > 1: negative discriminant and negative-definite Q") {
        PhaseConfig cfg{2, 0.5, 2.0, 0, 1};
        for (int k = 2; k <= 12; ++k) {
            const auto res = resonance_analysis(cfg, k);
            CHECK(res.delta_definitional < 0);
            CHECK(res.q_plus < 0);
            for (double t : {-3.0, -1.0, 0.0, 0.5, 1.0, 4.0})
                CHECK(res.q_minus * t * t + res.q_res * t + res.q_plus < 0);
        }
    }
    SUBCASE("printed and definitional discriminants agree") {
        for (int N : {2, 3})
            for (double R : {0.2, 0.5, 0.8})
                for (double sc : {0.5, 2.0, 10.0})
                    for (int k : {1, 2, 3, 8, 16, 32}) {
                        PhaseConfig cfg{N, R, sc, 0, 1};
                        const auto res = resonance_analysis(cfg, k);
                        // natural magnitude of the quadratic's coefficients (the
                        // k=1 discriminant vanishes identically, so a raw relative
                        // comparison would be 0/0)
                        const double scale =
                            std::max({std::abs(res.delta_definitional), std::abs(res.delta_printed),
                                      res.q_res * res.q_res +
                                          4 * std::abs(res.q_minus * res.q_plus)});
                        CHECK(std::abs(res.delta_definitional - res.delta_printed) / scale < 1e-10);
                    }
    }
}

TEST_CASE("classify_configuration") {
    for (double R : {0.2, 0.5, 0.8}) {
        CHECK(classify_configuration({2, R, 2.0, 0, 1}, 16).verdict == Classification::LocalMax);
        CHECK(classify_configuration({3, R, 2.0, 0, 1}, 16).verdict == Classification::LocalMax);
        const auto saddle = classify_configuration({2, R, 0.5, 0, 1}, 16);
        CHECK(saddle.verdict == Classification::Saddle);
        CHECK(saddle.positive_witness_k == 1);
        CHECK(saddle.negative_witness_k >= 2);
        // the witnesses actually witness
        CHECK(second_derivative_mode_integral({2, R, 0.5, 0, 1}, 1).e_minus > 0);
        CHECK(second_derivative_mode_integral({2, R, 0.5, 0, 1}, saddle.negative_witness_k).e_plus <
              0);
        CHECK(classify_configuration({2, R, 1.0, 0, 1}, 16).verdict == Classification::OnePhase);
    }
    CHECK(to_string(Classification::Saddle) == "Saddle");
}

TEST_CASE("monotonicity_scan") {
    SUBCASE("sigma_c = 2: both spectra strictly decreasing, eventually negative") {
        const auto rep = monotonicity_scan({2, 0.5, 2.0, 0, 1}, 1, 32);
        CHECK(rep.minus_strictly_decreasing);
        CHECK(rep.plus_strictly_decreasing);
        CHECK(!rep.minus_identically_zero);
        CHECK(rep.first_nonpositive_minus >= 1);
        CHECK(rep.first_nonpositive_plus >= 1);
    }
    SUBCASE("sigma_c = 1: inner spectrum flat at zero") {
        const auto rep = monotonicity_scan({2, 0.5, 1.0, 0, 1}, 1, 32);
        CHECK(rep.minus_identically_zero);
        CHECK(rep.plus_strictly_decreasing);
    }
    SUBCASE("eventual negativity by k = 64 across the sample grid") {
        for (int N : {2, 3})
            for (double R : {0.2, 0.5, 0.8})
                for (double sc : {0.5, 2.0}) {
                    const auto rep = monotonicity_scan({N, R, sc, 0, 1}, 1, 64);
                    CHECK(rep.first_nonpositive_minus >= 1);
                    CHECK(rep.first_nonpositive_plus >= 1);
                    // and the tail is negative from there on
                    const auto tail = second_derivative_mode_integral({N, R, sc, 0, 1}, 64);
                    CHECK(tail.e_minus < 0);
                    CHECK(tail.e_plus < 0);
                }
    }
}

TEST_CASE("discrepancy_report verdicts") {
    const auto rep = discrepancy_report(kBase, 8);
    CHECK(!rep.printed_displays_match);       // the two corrupted displays
    CHECK(rep.max_rel_dev_res < 1e-12);       // the resonant display agrees
    CHECK(rep.k1_identity_confirmed);         // E''_pm(1) = 2(1-sigma_c)/F(1)
    CHECK(rep.sigma1_theorem_negative);       // local Polya maximality at sigma_c = 1
    CHECK(!rep.sigma1_prop_positive);         // Prop (ii)'s positivity claim fails
    CHECK(rep.notes.size() == 3);
}
