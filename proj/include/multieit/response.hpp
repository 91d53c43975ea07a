#pragma once

#include <span>
#include <vector>

#include "multieit/steady.hpp"

namespace multieit {

// The lower-sideband atomic back-action factor B as re-derived from the
// conjugated coherence equations carries (gamma_1 + i Delta_1 - i delta) in
// its first denominator factor. The variant with (gamma_1 - i Delta_1 + i delta)
// is kept purely as a numerical control: it disagrees with the direct linear
// solve by >1e-3 near dbar = +-g2 and must never be used for physics.
enum class BranchBForm { corrected, uncorrected_control };

// A = g1^2 (gamma_2 - i Delta_2 - i delta) /
//     [(gamma_1 - i Delta_1 - i delta)(gamma_2 - i Delta_2 - i delta) + g2^2]
Complex branch_A(const SystemParams& p, double delta);

// B = g1^2 (gamma_2 + i Delta_2 - i delta) /
//     [(gamma_1 + i Delta_1 - i delta)(gamma_2 + i Delta_2 - i delta) + g2^2]
Complex branch_B(const SystemParams& p, double delta,
                 BranchBForm form = BranchBForm::corrected);

// d(delta) = (kappa - i(D+delta) + A)(kappa + i(D-delta) + B)(delta^2 - omega_m^2
//            + i delta gamma_m) - 2 i omega_m beta (2iD - A + B),  D = Delta_eff
Complex denom_d(const SystemParams& p, const SteadyState& s, double delta,
                BranchBForm form = BranchBForm::corrected);

// lower sideband per unit probe amplitude [s]:
// c_-/eps_p = [(kappa - i(D+delta) + A)(delta^2 - omega_m^2 + i delta gamma_m)
//              - 2 i omega_m beta] / d(delta)
Complex c_minus(const SystemParams& p, const SteadyState& s, double delta,
                BranchBForm form = BranchBForm::corrected);

// conjugated upper sideband per unit probe amplitude [s]:
// c_+*/eps_p = i g^2 omega_m (c_s*)^2 / d(delta)
Complex c_plus(const SystemParams& p, const SteadyState& s, double delta,
               BranchBForm form = BranchBForm::corrected);

// eps_out = 2 kappa c_-/eps_p = mu + i nu
Complex epsilon_out(const SystemParams& p, const SteadyState& s, double delta);

// t_p = 1 - 2 eta kappa c_-/eps_p; |t_p|^2 is the transmitted power fraction
Complex transmission(const SystemParams& p, const SteadyState& s, double delta);

struct SidebandResponse {
    double delta;         // probe-pump detuning [rad/s]
    double delta_bar;     // delta - omega_m [rad/s]
    Complex c_minus_norm; // per unit eps_p [s]
    Complex c_plus_norm;  // per unit eps_p [s]
    Complex eps_out;
    double mu;            // Re eps_out
    double nu;            // Im eps_out
    Complex t_p;
    double phase;         // arg t_p in (-pi, pi]
};

SidebandResponse probe_response(const SystemParams& p, const SteadyState& s,
                                double delta,
                                BranchBForm form = BranchBForm::corrected);

struct GroupDelayResult {
    double tau_g;            // d arg(t_p)/d delta [s]; >0 slow light, <0 fast
    bool richardson_warning; // h vs h/2 estimates differ by more than 0.1%
};

// central difference of arg t_p with step h = 1e-6 omega_m, checked at h/2
GroupDelayResult group_delay(const SystemParams& p, const SteadyState& s,
                             double delta);

// independent estimator Im[(dt_p/ddelta)/t_p] with 4th-order stencil
double group_delay_quotient(const SystemParams& p, const SteadyState& s,
                            double delta);

struct Spectrum {
    double omega_m; // for delta_bar normalization in outputs
    std::vector<SidebandResponse> points;
    std::vector<double> unwrapped_phase; // [rad]
    std::vector<double> tau_g;           // [s]
};

struct SpectrumOptions {
    int threads = 1; // >1 shards the grid; results are order-independent
    BranchBForm form = BranchBForm::corrected;
};

// delta = omega_m * (1 + x), x uniform over [lo, hi]
std::vector<double> default_grid(const SystemParams& p, int n = 2001,
                                 double lo = -0.2, double hi = 0.2);

// grid must be strictly increasing; steady state solved once internally
Spectrum spectrum(const SystemParams& p, std::span<const double> grid,
                  const SpectrumOptions& opts = {});

// cumulative 2pi-correction from the left edge
std::vector<double> unwrap_phase(std::span<const double> wrapped);

} // namespace multieit
