#pragma once

#include <complex>
#include <vector>

#include "multieit/params.hpp"

namespace multieit {

using Complex = std::complex<double>;

// pump-only operating point: probe off, P_s = 0 by construction
struct SteadyState {
    Complex c_s;      // cavity amplitude
    Complex a_s;      // |1>-|2> coherence
    Complex b_s;      // |1>-|3> coherence
    double Q_s;       // dimensionless displacement, g*n_cav/omega_m
    double Delta_eff; // Delta_c - g^2*n_cav/omega_m
    double beta;      // g^2*n_cav/2 [rad^2/s^2]
    double n_cav;     // |c_s|^2
};

// chi(delta_shift) = g1^2 / (gamma_1 + i(Delta_1 - delta_shift)
//                          + g2^2 / (gamma_2 + i(Delta_2 - delta_shift)));
// delta_shift = 0 gives the static atomic loading of the cavity line
Complex atomic_susceptibility(const SystemParams& p, double delta_shift = 0.0);

SteadyState solve_steady(const SystemParams& p);

// max |RHS| of the five pump-only mean-field equations at the fixed point,
// normalized by max(kappa, omega_m) * max(1, |c_s|)
double steady_residual(const SystemParams& p, const SteadyState& s);

// nonnegative real roots of the photon-number self-consistency cubic
// (g^2/omega_m)^2 n^3 - 2 D0 (g^2/omega_m) n^2 + (K^2 + D0^2) n = |Omega_l|^2,
// K = kappa + Re chi, D0 = Delta_c + Im chi; more than one root marks bistability
std::vector<double> steady_photon_roots(const SystemParams& p);

} // namespace multieit
