#include "multieit/response.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace multieit {

namespace {

constexpr Complex I{0.0, 1.0};

// delta^2 - omega_m^2 + i delta gamma_m
Complex mech_factor(const SystemParams& p, double delta) {
    return {delta * delta - p.omega_m * p.omega_m, delta * p.gamma_m};
}

} // namespace

Complex branch_A(const SystemParams& p, double delta) {
    if (p.g1 == 0.0) return {};
    const Complex f1(p.gamma_1, -(p.Delta_1 + delta));
    const Complex f2(p.gamma_2, -(p.Delta_2 + delta));
    const Complex den = f1 * f2 + p.g2 * p.g2;
    if (den == Complex{})
        throw SingularityError("branch A: zero denominator", delta);
    return p.g1 * p.g1 * f2 / den;
}

Complex branch_B(const SystemParams& p, double delta, BranchBForm form) {
    if (p.g1 == 0.0) return {};
    const Complex f1 = form == BranchBForm::corrected
                           ? Complex(p.gamma_1, p.Delta_1 - delta)
                           : Complex(p.gamma_1, delta - p.Delta_1);
    const Complex f2(p.gamma_2, p.Delta_2 - delta);
    const Complex den = f1 * f2 + p.g2 * p.g2;
    if (den == Complex{})
        throw SingularityError("branch B: zero denominator", delta);
    return p.g1 * p.g1 * f2 / den;
}

Complex denom_d(const SystemParams& p, const SteadyState& s, double delta,
                BranchBForm form) {
    const Complex A = branch_A(p, delta);
    const Complex B = branch_B(p, delta, form);
    const double D = s.Delta_eff;
    const Complex d_plus = Complex(p.kappa, -(D + delta)) + A;
    const Complex d_minus = Complex(p.kappa, D - delta) + B;
    return d_plus * d_minus * mech_factor(p, delta) -
           2.0 * I * p.omega_m * s.beta * (2.0 * I * D - A + B);
}

Complex c_minus(const SystemParams& p, const SteadyState& s, double delta,
                BranchBForm form) {
    const Complex A = branch_A(p, delta);
    const Complex d_plus = Complex(p.kappa, -(s.Delta_eff + delta)) + A;
    const Complex num =
        d_plus * mech_factor(p, delta) - 2.0 * I * p.omega_m * s.beta;
    const Complex d = denom_d(p, s, delta, form);
    if (d == Complex{})
        throw SingularityError("response denominator vanishes", delta);
    return num / d;
}

Complex c_plus(const SystemParams& p, const SteadyState& s, double delta,
               BranchBForm form) {
    if (p.g == 0.0) return {};
    const Complex d = denom_d(p, s, delta, form);
    if (d == Complex{})
        throw SingularityError("response denominator vanishes", delta);
    const Complex cs_conj = std::conj(s.c_s);
    return I * p.g * p.g * p.omega_m * cs_conj * cs_conj / d;
}

Complex epsilon_out(const SystemParams& p, const SteadyState& s,
                    double delta) {
    return 2.0 * p.kappa * c_minus(p, s, delta);
}

Complex transmission(const SystemParams& p, const SteadyState& s,
                     double delta) {
    return 1.0 - 2.0 * p.eta * p.kappa * c_minus(p, s, delta);
}

SidebandResponse probe_response(const SystemParams& p, const SteadyState& s,
                                double delta, BranchBForm form) {
    SidebandResponse r{};
    r.delta = delta;
    r.delta_bar = delta - p.omega_m;
    r.c_minus_norm = c_minus(p, s, delta, form);
    r.c_plus_norm = c_plus(p, s, delta, form);
    r.eps_out = 2.0 * p.kappa * r.c_minus_norm;
    r.mu = r.eps_out.real();
    r.nu = r.eps_out.imag();
    r.t_p = 1.0 - 2.0 * p.eta * p.kappa * r.c_minus_norm;
    r.phase = std::arg(r.t_p);
    return r;
}

namespace {

Complex tp_checked(const SystemParams& p, const SteadyState& s, double delta,
                   double where) {
    const Complex t = transmission(p, s, delta);
    if (std::abs(t) < 1e-12)
        throw SingularityError(
            "group delay: transmission vanishes at stencil point", where);
    return t;
}

} // namespace

GroupDelayResult group_delay(const SystemParams& p, const SteadyState& s,
                             double delta) {
    const double h = 1e-6 * p.omega_m;
    const auto fd = [&](double step) {
        const Complex tp = tp_checked(p, s, delta + step, delta);
        const Complex tm = tp_checked(p, s, delta - step, delta);
        return std::arg(tp / tm) / (2.0 * step);
    };
    const double tau_h = fd(h);
    const double tau_h2 = fd(h / 2.0);
    GroupDelayResult r{};
    r.tau_g = tau_h;
    r.richardson_warning =
        std::abs(tau_h2 - tau_h) > 1e-3 * std::max(std::abs(tau_h2), 1e-300);
    return r;
}

double group_delay_quotient(const SystemParams& p, const SteadyState& s,
                            double delta) {
    const double h = 1e-6 * p.omega_m;
    const Complex t0 = tp_checked(p, s, delta, delta);
    const Complex tp1 = transmission(p, s, delta + h);
    const Complex tm1 = transmission(p, s, delta - h);
    const Complex tp2 = transmission(p, s, delta + 2.0 * h);
    const Complex tm2 = transmission(p, s, delta - 2.0 * h);
    const Complex dt = (8.0 * (tp1 - tm1) - (tp2 - tm2)) / (12.0 * h);
    return (dt / t0).imag();
}

std::vector<double> default_grid(const SystemParams& p, int n, double lo,
                                 double hi) {
    if (n < 1) throw ConfigError("grid needs at least one point");
    if (n > 1 && !(hi > lo)) throw ConfigError("grid range must be increasing");
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = p.omega_m * (1.0 + lo);
        return grid;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[i] = p.omega_m * (1.0 + lo + i * step);
    grid.back() = p.omega_m * (1.0 + hi);
    return grid;
}

namespace {

double wrap_to_pi(double d) {
    return d - two_pi * std::ceil((d - std::numbers::pi) / two_pi);
}

} // namespace

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    for (std::size_t i = 1; i < wrapped.size(); ++i)
        out[i] = out[i - 1] + wrap_to_pi(wrapped[i] - wrapped[i - 1]);
    return out;
}

Spectrum spectrum(const SystemParams& p, std::span<const double> grid,
                  const SpectrumOptions& opts) {
    if (grid.empty()) throw ConfigError("empty detuning grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("detuning grid must be strictly increasing");

    const SteadyState st = solve_steady(p);
    Spectrum spec;
    spec.omega_m = p.omega_m;
    spec.points.resize(grid.size());
    spec.tau_g.resize(grid.size());

    std::exception_ptr first_error;
    std::mutex error_mu;
    const auto eval_range = [&](std::size_t begin, std::size_t end) {
        try {
            for (std::size_t i = begin; i < end; ++i) {
                spec.points[i] = probe_response(p, st, grid[i], opts.form);
                spec.tau_g[i] = group_delay(p, st, grid[i]).tau_g;
            }
        } catch (...) {
            std::lock_guard lock(error_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };

    unsigned n_threads = opts.threads > 0
                             ? static_cast<unsigned>(opts.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, grid.size());
    if (n_threads <= 1) {
        eval_range(0, grid.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (grid.size() + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(grid.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(eval_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> phases(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) phases[i] = spec.points[i].phase;
    spec.unwrapped_phase = unwrap_phase(phases);
    return spec;
}

} // namespace multieit
