#include "tptl/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace tptl {

ModeAmplitudes ModeAmplitudes::zero(int N, int k_max) {
    ModeAmplitudes a;
    a.N = N;
    a.k_max = k_max;
    int total = 0;
    for (int k = 1; k <= k_max; ++k) total += int(mode_dimension(N, k));
    a.alpha_minus.assign(total, 0.0);
    a.alpha_plus.assign(total, 0.0);
    return a;
}

int ModeAmplitudes::offset(int k) const {
    if (k < 1 || k > k_max) throw std::invalid_argument("ModeAmplitudes: degree out of range");
    int off = 0;
    for (int kk = 1; kk < k; ++kk) off += int(mode_dimension(N, kk));
    return off;
}

double& ModeAmplitudes::minus_at(Mode m) { return alpha_minus[offset(m.k) + m.i - 1]; }
double& ModeAmplitudes::plus_at(Mode m) { return alpha_plus[offset(m.k) + m.i - 1]; }
double ModeAmplitudes::minus_at(Mode m) const { return alpha_minus[offset(m.k) + m.i - 1]; }
double ModeAmplitudes::plus_at(Mode m) const { return alpha_plus[offset(m.k) + m.i - 1]; }

bool ModeAmplitudes::barycenter_admissible(double tol) const {
    if (k_max < 1) return true;
    for (int i = 1; i <= mode_dimension(N, 1); ++i)
        if (std::abs(plus_at(Mode{1, i})) > tol) return false;
    return true;
}

double first_derivative_form(const PhaseConfig& cfg, const SurfaceGrid& grid,
                             const std::vector<double>& xi_inner,
                             const std::vector<double>& xi_outer) {
    cfg.validate();
    if (cfg.beta != 0.0 || cfg.gamma != 1.0)
        throw std::invalid_argument("first_derivative_form: torsion chapter requires beta=0, gamma=1");
    const int N = cfg.N;
    const double R = cfg.R, sc = cfg.sigma_c;
    // radial state: grad_tau u = 0, d_n u constant per sphere
    const double dnu_core = -R / (N * sc); // trace from inside the interface
    const double dnu_out = -1.0 / N;
    const double inner = (1 - sc) * sc * dnu_core * dnu_core * std::pow(R, N - 1) *
                         grid.integrate(xi_inner);
    const double outer = dnu_out * dnu_out * grid.integrate(xi_outer);
    return inner + outer;
}

namespace {

// the G factor of the printed discriminant
double g_factor(const PhaseConfig& cfg, int k) {
    const int N = cfg.N;
    const double Rp = std::pow(cfg.R, 2.0 - N - 2.0 * k);
    return (cfg.sigma_c - 1) * k * (N - 1 + k) * (Rp - 1) + (N - 2 + 2 * k) * Rp;
}

// boundary-integral assembly of the second-derivative theorem for one mode,
// amplitudes (am, ap) on the interface / outer sphere
double boundary_integral_value(const PhaseConfig& cfg, const ModeCoefficients& m, double am,
                               double ap) {
    const int N = cfg.N;
    const double R = cfg.R, sc = cfg.sigma_c;
    // radial state data at the two spheres
    const double flux = -R / N;                    // sigma d_n u, continuous across the interface
    const double jump_dnn = (sc - 1) / (N * sc);   // [d_nn u] at R
    const double dnu1 = -1.0 / N, dnnu1 = -1.0 / N;
    // consistency: sigma (d_nn u + H d_n u) = -1 on each side (Laplace decomposition)
    const double H_R = (N - 1.0) / R;
    const double lhs_core = sc * (-1.0 / (N * sc) + H_R * (-R / (N * sc)));
    const double lhs_shell = (-1.0 / N + H_R * (-R / N));
    const double lhs_outer = (-1.0 / N + (N - 1.0) * (-1.0 / N));
    if (std::abs(lhs_core + 1) > 1e-12 || std::abs(lhs_shell + 1) > 1e-12 ||
        std::abs(lhs_outer + 1) > 1e-12)
        throw std::logic_error("boundary_integral_value: Laplace decomposition check failed");

    const double scp = am * eval_mode_profile_deriv(m, Side::minus, R, true) +
                       ap * eval_mode_profile_deriv(m, Side::plus, R, true);
    const double ssp = am * eval_mode_profile_deriv(m, Side::minus, R, false) +
                       ap * eval_mode_profile_deriv(m, Side::plus, R, false);
    const double s1 = am * eval_mode_profile_deriv(m, Side::minus, 1.0, false) +
                      ap * eval_mode_profile_deriv(m, Side::plus, 1.0, false);
    const double RN1 = std::pow(R, N - 1.0);
    double val = 0.0;
    val += 2.0 * RN1 * flux * (scp - ssp) * am;        // [sigma d_n u d_n u'] term
    val += 2.0 * RN1 * flux * jump_dnn * am * am;      // sigma_c d_n u [d_nn u] term
    val += 2.0 * dnu1 * s1 * ap;                       // outer d_n u d_n u' term
    val += 2.0 * dnu1 * dnnu1 * ap * ap;               // outer d_n u d_nn u term
    return val;
}

} // namespace

SpectrumRow second_derivative_mode(const PhaseConfig& cfg, int k) {
    cfg.validate();
    if (k < 1) throw std::invalid_argument("second_derivative_mode: k must be >= 1");
    if (cfg.beta != 0.0 || cfg.gamma != 1.0)
        throw std::invalid_argument("second_derivative_mode: requires beta=0, gamma=1");
    const int N = cfg.N;
    const double R = cfg.R, sc = cfg.sigma_c;
    const double Rp = std::pow(R, 2.0 - N - 2.0 * k);
    const double F = N * (N - 2 + k + k * sc) * Rp + k * N * (1 - sc);
    SpectrumRow row;
    row.k = k;
    row.e_minus = 2.0 * std::pow(R, double(N)) / N * ((1 - sc) / sc) *
                  (F - k * (k * (1 - sc) + (N - 2 + k) * (1 - sc) * Rp)) / F;
    row.e_plus = 2.0 / N * (F - k * ((-N + 2 - k) * (1 - sc) + (N - 2 + k + k * sc) * Rp)) / F;
    row.e_res = 4.0 * (sc - 1) * std::pow(R, 1.0 - k) / N * ((N - 2.0) * k + 2.0 * k * k) / F;
    row.discriminant = row.e_res * row.e_res - 4 * row.e_minus * row.e_plus;
    row.g_term = g_factor(cfg, k);
    return row;
}

SpectrumRow second_derivative_mode_integral(const PhaseConfig& cfg, int k) {
    cfg.validate();
    if (k < 1) throw std::invalid_argument("second_derivative_mode_integral: k must be >= 1");
    if (cfg.beta != 0.0 || cfg.gamma != 1.0)
        throw std::invalid_argument("second_derivative_mode_integral: requires beta=0, gamma=1");
    const auto m = mode_coefficients(cfg, k);
    SpectrumRow row;
    row.k = k;
    row.e_minus = boundary_integral_value(cfg, m, 1.0, 0.0);
    row.e_plus = boundary_integral_value(cfg, m, 0.0, 1.0);
    row.e_res = boundary_integral_value(cfg, m, 1.0, 1.0) - row.e_minus - row.e_plus;
    row.discriminant = row.e_res * row.e_res - 4 * row.e_minus * row.e_plus;
    row.g_term = g_factor(cfg, k);
    return row;
}

double quadratic_form(const PhaseConfig& cfg, const ModeAmplitudes& amps) {
    double total = 0.0;
    for (int k = 1; k <= amps.k_max; ++k) {
        const auto row = second_derivative_mode_integral(cfg, k);
        for (int i = 1; i <= mode_dimension(amps.N, k); ++i) {
            const double am = amps.minus_at(Mode{k, i});
            const double ap = amps.plus_at(Mode{k, i});
            total += am * am * row.e_minus + ap * ap * row.e_plus + am * ap * row.e_res;
        }
    }
    return total;
}

ResonanceData resonance_analysis(const PhaseConfig& cfg, int k) {
    const auto row = second_derivative_mode_integral(cfg, k);
    const int N = cfg.N;
    const double R = cfg.R, sc = cfg.sigma_c;
    const double Rp = std::pow(R, 2.0 - N - 2.0 * k);
    const double Fden = mode_coefficients(cfg, k).F;
    ResonanceData res;
    res.q_minus = row.e_minus;
    res.q_res = row.e_res;
    res.q_plus = row.e_plus;
    res.delta_definitional = row.discriminant;
    res.g_term = row.g_term;
    res.delta_printed = -16.0 * (sc - 1) * (k - 1) * std::pow(R, double(N)) /
                        (sc * N * N * Fden * Fden) *
                        (sc * k * (Rp - 1) + (N - 2 + k) * Rp + k) * row.g_term;
    return res;
}

ClassificationResult classify_configuration(const PhaseConfig& cfg, int k_max) {
    cfg.validate();
    if (k_max < 2) throw std::invalid_argument("classify_configuration: k_max must be >= 2");
    std::vector<SpectrumRow> rows;
    for (int k = 1; k <= k_max; ++k) rows.push_back(second_derivative_mode_integral(cfg, k));
    ClassificationResult out;
    out.zero_tol = 1e-9 * std::max(1.0, std::abs(rows[0].e_plus));
    bool minus_all_zero = true;
    for (const auto& r : rows) minus_all_zero = minus_all_zero && std::abs(r.e_minus) <= out.zero_tol;
    if (minus_all_zero) {
        out.verdict = Classification::OnePhase;
        return out;
    }
    if (rows[0].e_minus > out.zero_tol) {
        out.verdict = Classification::Saddle;
        out.positive_witness_k = 1; // inner translation-type mode, admissible on its own
        for (int k = 2; k <= 64; ++k) {
            const auto r = k <= k_max ? rows[k - 1] : second_derivative_mode_integral(cfg, k);
            if (r.e_minus < -out.zero_tol && r.e_plus < -out.zero_tol) {
                out.negative_witness_k = k;
                break;
            }
        }
        return out;
    }
    out.verdict = Classification::LocalMax;
    return out;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::LocalMax: return "LocalMax";
        case Classification::Saddle: return "Saddle";
        case Classification::OnePhase: return "OnePhase";
    }
    return "?";
}

MonotonicityReport monotonicity_scan(const PhaseConfig& cfg, int k_lo, int k_hi) {
    cfg.validate();
    if (k_lo < 1 || k_hi <= k_lo) throw std::invalid_argument("monotonicity_scan: bad range");
    MonotonicityReport rep;
    rep.minus_strictly_decreasing = true;
    rep.plus_strictly_decreasing = true;
    rep.minus_identically_zero = true;
    SpectrumRow prev = second_derivative_mode_integral(cfg, k_lo);
    const double ztol = 1e-12 * std::max(1.0, std::abs(prev.e_plus));
    rep.minus_identically_zero = std::abs(prev.e_minus) <= ztol;
    if (prev.e_minus < -ztol) rep.first_nonpositive_minus = k_lo;
    if (prev.e_plus < -ztol) rep.first_nonpositive_plus = k_lo;
    for (int k = k_lo + 1; k <= k_hi; ++k) {
        const auto row = second_derivative_mode_integral(cfg, k);
        if (!(row.e_minus < prev.e_minus)) rep.minus_strictly_decreasing = false;
        if (!(row.e_plus < prev.e_plus)) rep.plus_strictly_decreasing = false;
        if (std::abs(row.e_minus) > ztol) rep.minus_identically_zero = false;
        if (rep.first_nonpositive_minus == 0 && row.e_minus < -ztol) rep.first_nonpositive_minus = k;
        if (rep.first_nonpositive_plus == 0 && row.e_plus < -ztol) rep.first_nonpositive_plus = k;
        prev = row;
    }
    if (rep.minus_identically_zero) rep.minus_strictly_decreasing = false;
    return rep;
}

DiscrepancyReport discrepancy_report(const PhaseConfig& cfg, int k_max) {
    DiscrepancyReport rep;
    auto rel = [](double a, double b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-14});
        return std::abs(a - b) / scale;
    };
    for (int k = 1; k <= k_max; ++k) {
        const auto printed = second_derivative_mode(cfg, k);
        const auto canon = second_derivative_mode_integral(cfg, k);
        rep.max_rel_dev_minus = std::max(rep.max_rel_dev_minus, rel(printed.e_minus, canon.e_minus));
        rep.max_rel_dev_plus = std::max(rep.max_rel_dev_plus, rel(printed.e_plus, canon.e_plus));
        rep.max_rel_dev_res = std::max(rep.max_rel_dev_res, rel(printed.e_res, canon.e_res));
    }
    rep.printed_displays_match = rep.max_rel_dev_minus < 1e-8 && rep.max_rel_dev_plus < 1e-8 &&
                                 rep.max_rel_dev_res < 1e-8;
    // claim: E''_pm(1) = 2(1-sigma_c)/F(1)
    const auto r1 = second_derivative_mode_integral(cfg, 1);
    const double claim = 2 * (1 - cfg.sigma_c) / mode_coefficients(cfg, 1).F;
    rep.k1_identity_confirmed = rel(r1.e_minus, claim) < 1e-10 && rel(r1.e_plus, claim) < 1e-10;
    // sigma_c = 1 sign claims for E''_+ at k >= 2 (evaluated on the canonical path)
    PhaseConfig one = cfg;
    one.sigma_c = 1.0;
    bool all_pos = true, all_neg = true;
    for (int k = 2; k <= k_max; ++k) {
        const double ep = second_derivative_mode_integral(one, k).e_plus;
        all_pos = all_pos && ep > 0;
        all_neg = all_neg && ep < 0;
    }
    rep.sigma1_prop_positive = all_pos;
    rep.sigma1_theorem_negative = all_neg;
    rep.notes.push_back(rep.printed_displays_match
                            ? "printed closed forms agree with the boundary-integral path"
                            : "printed e_minus/e_plus displays disagree with the boundary-integral "
                              "path; e_res agrees");
    rep.notes.push_back(rep.k1_identity_confirmed
                            ? "k=1 identity E''_pm(1)=2(1-sigma_c)/F(1) confirmed"
                            : "k=1 identity E''_pm(1)=2(1-sigma_c)/F(1) refuted");
    rep.notes.push_back(rep.sigma1_theorem_negative
                            ? "sigma_c=1: E''_+(k)<0 for k>=2 (local one-phase maximality) confirmed"
                            : "sigma_c=1: E''_+(k) not uniformly negative for k>=2");
    return rep;
}

} // namespace tptl
