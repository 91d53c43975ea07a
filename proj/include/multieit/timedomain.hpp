#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "multieit/steady.hpp"

namespace multieit {

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t, std::size_t step)
        : std::runtime_error(what), t(t), step(step) {}
    double t;
    std::size_t step;
};

struct IntegrationConfig {
    double dt;           // [s]
    double t_transient;  // [s], settle time before recording
    int n_beat_periods;  // demodulation window in units of 2pi/delta
    double delta;        // [rad/s]
    double eps_p;        // [rad/s]
};

// dt divides the beat period 2pi/delta exactly (samples_per_beat steps) so
// demodulation windows align with samples; at delta = omega_m this is the
// plain (2pi/omega_m)/64 step. transient_factor multiplies 1/min(gamma).
IntegrationConfig default_config(const SystemParams& p, double delta,
                                 double eps_p, int samples_per_beat = 64,
                                 double transient_factor = 10.0,
                                 int n_beat_periods = 200);

struct MeanFieldState {
    double Q, P;
    Complex c, a, b;
};

// samples at t_begin + k*dt; recording starts at the first step >= t_transient
struct TimeSeries {
    double t_begin;
    double dt;
    std::vector<MeanFieldState> states;
};

// fixed-step RK4 from zero initial conditions; drive Omega_l + eps_p e^{-i delta t};
// throws IntegrationError on non-finite state or photon-number bound violation
TimeSeries integrate(const SystemParams& p, double delta, double eps_p,
                     const IntegrationConfig& cfg);

struct DemodResult {
    Complex c_s_est;
    Complex c_minus_est;
    Complex c_plus_est;
    double drift;    // relative change of c_minus_est between window halves
    bool stationary; // drift < 1e-3
};

// trapezoid projection onto {1, e^{+i delta t}, e^{-i delta t}} over
// n_periods * 2pi/delta starting at t_start; the window must be sample-aligned
DemodResult extract_sidebands(const TimeSeries& series, double delta,
                              double t_start, int n_periods);

// convenience: integrate with cfg and demodulate over the recorded window
DemodResult demodulate_run(const SystemParams& p, double delta, double eps_p,
                           const IntegrationConfig& cfg);

struct LinearizationReport {
    std::vector<double> eps_p;
    std::vector<Complex> ratio; // c_minus_est / eps_p per amplitude [s]
    double max_spread;          // max pairwise relative difference
    bool nonlinear_flag;        // spread > 0.5%
};

// ratios must agree across amplitudes if the response is linear in the probe
LinearizationReport verify_linearization(const SystemParams& p, double delta,
                                         std::span<const double> eps_p_list,
                                         int samples_per_beat = 64,
                                         double transient_factor = 10.0,
                                         int n_beat_periods = 200);

// columns t, Q, P, Re c, Im c, Re a, Im a, Re b, Im b
void dump_trajectory_csv(std::ostream& os, const TimeSeries& series,
                         int stride = 1);

} // namespace multieit
