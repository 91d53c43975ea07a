#include "multieit/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multieit {

Complex atomic_susceptibility(const SystemParams& p, double delta_shift) {
    if (p.g1 == 0.0) return {0.0, 0.0};
    Complex den(p.gamma_1, p.Delta_1 - delta_shift);
    if (p.g2 != 0.0) {
        const Complex inner(p.gamma_2, p.Delta_2 - delta_shift);
        if (inner == Complex{})
            throw SingularityError(
                "atomic susceptibility: control branch resonant with zero "
                "linewidth",
                delta_shift);
        den += p.g2 * p.g2 / inner;
    }
    if (den == Complex{})
        throw SingularityError("atomic susceptibility: zero denominator",
                               delta_shift);
    return p.g1 * p.g1 / den;
}

namespace {

// real roots of x^3 + a x^2 + b x + c, Cardano/trigonometric form
std::vector<double> cubic_roots(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    std::vector<double> roots;
    if (disc > 0) {
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + s);
        const double v = std::cbrt(-q / 2.0 - s);
        roots.push_back(shift + u + v);
    } else if (disc == 0) {
        const double u = std::cbrt(-q / 2.0);
        roots.push_back(shift + 2.0 * u);
        roots.push_back(shift - u);
    } else {
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        const double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k)
            roots.push_back(shift + m * std::cos((phi + two_pi * k) / 3.0));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double photon_map(const SystemParams& p, const Complex& chi, double s,
                  double n) {
    const Complex den = Complex(p.kappa, p.Delta_c - s * n) + chi;
    return p.Omega_l * p.Omega_l / std::norm(den);
}

SteadyState assemble_state(const SystemParams& p, const Complex& chi,
                           double n) {
    SteadyState st{};
    st.n_cav = n;
    st.Delta_eff = p.Delta_c - p.g * p.g * n / p.omega_m;
    st.beta = p.g * p.g * n / 2.0;
    st.Q_s = p.g * n / p.omega_m;
    st.c_s = p.Omega_l / (Complex(p.kappa, st.Delta_eff) + chi);
    const Complex f2(p.gamma_2, p.Delta_2);
    const Complex den = Complex(p.gamma_1, p.Delta_1) * f2 + p.g2 * p.g2;
    st.a_s = p.g1 == 0.0
                 ? Complex{}
                 : Complex(0.0, -1.0) * p.g1 * st.c_s * f2 / den;
    st.b_s = p.g2 == 0.0 ? Complex{}
                         : Complex(0.0, -1.0) * p.g2 * st.a_s / f2;
    return st;
}

} // namespace

std::vector<double> steady_photon_roots(const SystemParams& p) {
    const Complex chi = atomic_susceptibility(p, 0.0);
    const double K = p.kappa + chi.real();
    const double D0 = p.Delta_c + chi.imag();
    const double s = p.g * p.g / p.omega_m;
    const double W2 = p.Omega_l * p.Omega_l;
    if (s == 0.0) return {W2 / (K * K + D0 * D0)};
    // s^2 n^3 - 2 D0 s n^2 + (K^2 + D0^2) n - W2 = 0, normalized monic
    const auto roots = cubic_roots(-2.0 * D0 / s, (K * K + D0 * D0) / (s * s),
                                   -W2 / (s * s));
    std::vector<double> nonneg;
    for (double r : roots)
        if (r >= 0.0) nonneg.push_back(r);
    return nonneg;
}

SteadyState solve_steady(const SystemParams& p) {
    validate(p);
    const Complex chi = atomic_susceptibility(p, 0.0);
    if (p.Omega_l == 0.0) return assemble_state(p, chi, 0.0);

    const double s = p.g * p.g / p.omega_m;
    const double tol = 1e-12;
    double n = 0.0;
    bool converged = false;
    // plain fixed point first (contraction factor ~ s*n/Delta_c, tiny for the
    // radiation-pressure shifts of interest), damped restart if it wanders
    for (double damping : {1.0, 0.5}) {
        n = 0.0;
        double prev_step = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            const double target = photon_map(p, chi, s, n);
            const double n_next = n + damping * (target - n);
            const double step = std::abs(n_next - n);
            n = n_next;
            if (step <= tol * std::max(n, 1e-300)) {
                converged = true;
                break;
            }
            if (it > 10 && step > 4.0 * prev_step) break; // diverging
            prev_step = step;
        }
        if (converged) break;
    }
    if (!converged) {
        // exact cubic fallback: take the root continuously connected to the
        // low-power branch (smallest n); several admissible roots = bistable
        auto roots = steady_photon_roots(p);
        std::vector<double> admissible;
        for (double r : roots)
            if (std::abs(photon_map(p, chi, s, r) - r) <=
                1e-9 * std::max(r, 1e-300))
                admissible.push_back(r);
        if (admissible.empty())
            throw SteadyStateError(
                "steady state: fixed point did not converge and no "
                "self-consistent photon number found",
                roots);
        if (admissible.size() > 1)
            throw SteadyStateError(
                "steady state: multiple self-consistent photon numbers "
                "(bistable regime)",
                admissible);
        n = admissible.front();
    }
    return assemble_state(p, chi, n);
}

double steady_residual(const SystemParams& p, const SteadyState& st) {
    const Complex i(0.0, 1.0);
    const double rQ = std::abs(p.omega_m * 0.0); // P_s = 0
    const double rP =
        std::abs(-p.omega_m * st.Q_s + p.g * std::norm(st.c_s));
    const Complex rc = -(Complex(p.kappa, p.Delta_c)) * st.c_s +
                       i * p.g * st.c_s * st.Q_s - i * p.g1 * st.a_s +
                       p.Omega_l;
    const Complex ra = -(Complex(p.gamma_1, p.Delta_1)) * st.a_s -
                       i * p.g1 * st.c_s - i * p.g2 * st.b_s;
    const Complex rb =
        -(Complex(p.gamma_2, p.Delta_2)) * st.b_s - i * p.g2 * st.a_s;
    const double scale =
        std::max(p.kappa, p.omega_m) * std::max(1.0, std::abs(st.c_s));
    const double worst = std::max({rQ, rP, std::abs(rc), std::abs(ra),
                                   std::abs(rb)});
    return worst / scale;
}

} // namespace multieit
