#include <doctest.h>

#include <cmath>
#include <complex>

#include "multieit/steady.hpp"

using namespace multieit;

namespace {
double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
double rel(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
} // namespace

// regression anchors cross-checked against an independent implementation of
// the cubic + fixed-point iteration; tolerances leave room for libm drift
TEST_CASE("operating point anchors") {
    const SystemParams p = preset(PresetId::fig2a);
    const SteadyState s = solve_steady(p);
    CHECK(rel(s.n_cav, 0.040456063718387045) < 1e-9);
    CHECK(rel(s.c_s, {0.0080913447154533, -0.20097411241023744}) < 1e-9);
    CHECK(rel(s.a_s, {-0.0006531160182606518, 0.01618142437820784}) < 1e-9);
    CHECK(rel(s.b_s, {5.237873233209047e-05, -0.0012945087123833938}) < 1e-9);
    CHECK(rel(s.Q_s, 0.0008091212743677408) < 1e-9);
    CHECK(rel(s.Delta_eff, mhz_to_rad(99.99838175745128)) < 1e-9);
    CHECK(rel(s.beta, 3194282756205.954) < 1e-9);
    CHECK(s.n_cav == std::norm(s.c_s));
    CHECK(rel(s.Q_s, p.g * s.n_cav / p.omega_m) < 1e-14);
    CHECK(rel(s.beta, 0.5 * p.g * p.g * s.n_cav) < 1e-14);

    CHECK(rel(atomic_susceptibility(p),
              {409.9277324671854, -4047140.252698058}) < 1e-9);
}

TEST_CASE("fixed point satisfies the equations of motion") {
    for (PresetId id : all_presets) {
        CAPTURE(to_string(id));
        const SystemParams p = preset(id);
        CHECK(steady_residual(p, solve_steady(p)) < 1e-12);
    }
}

// the atomic coherence locks to the cavity: i g1 a_s / c_s equals the
// susceptibility that loads the cavity line
TEST_CASE("coherence consistency") {
    for (PresetId id : {PresetId::fig2a, PresetId::fig2c, PresetId::fig2e,
                        PresetId::fig3a, PresetId::fig3b}) {
        CAPTURE(to_string(id));
        const SystemParams p = preset(id);
        const SteadyState s = solve_steady(p);
        const Complex chi = atomic_susceptibility(p);
        CHECK(rel(Complex(0, 1) * p.g1 * s.a_s / s.c_s, chi) < 1e-12);
    }
}

TEST_CASE("photon-number cubic") {
    for (PresetId id : all_presets) {
        CAPTURE(to_string(id));
        const SystemParams p = preset(id);
        const auto roots = steady_photon_roots(p);
        REQUIRE(roots.size() == 1); // none of the presets is bistable
        CHECK(rel(roots[0], solve_steady(p).n_cav) < 1e-9);
    }
}

TEST_CASE("decoupled-atom reductions") {
    const SystemParams p = preset(PresetId::fig3d);
    const SteadyState s = solve_steady(p);
    // g = g1 = 0: plain driven cavity, n = |Omega|^2 / (kappa^2 + Delta_c^2)
    const double n_ref = p.Omega_l * p.Omega_l /
                         (p.kappa * p.kappa + p.Delta_c * p.Delta_c);
    CHECK(rel(s.n_cav, n_ref) < 1e-12);
    CHECK(rel(s.c_s, p.Omega_l / Complex(p.kappa, p.Delta_c)) < 1e-12);
    CHECK(s.a_s == Complex(0, 0));
    CHECK(s.b_s == Complex(0, 0));
    CHECK(s.Q_s == 0.0);
    CHECK(atomic_susceptibility(p) == Complex(0, 0));

    // g2 = 0 leaves the second coherence dark
    const SystemParams p3b = preset(PresetId::fig3b);
    CHECK(solve_steady(p3b).b_s == Complex(0, 0));
}

TEST_CASE("no drive, no field") {
    SystemParams p = preset(PresetId::fig2a);
    p.Omega_l = 0.0;
    p.eps_p = 0.0;
    const SteadyState s = solve_steady(p);
    CHECK(s.c_s == Complex(0, 0));
    CHECK(s.a_s == Complex(0, 0));
    CHECK(s.b_s == Complex(0, 0));
    CHECK(s.Q_s == 0.0);
    CHECK(s.n_cav == 0.0);
}

TEST_CASE("photon number grows monotonically with the pump") {
    const SystemParams base = preset(PresetId::fig2a);
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
        SystemParams p = base;
        p.Omega_l = mhz_to_rad(2.0 + 38.0 * i / 9.0);
        p.eps_p = 1e-3 * p.Omega_l;
        const double n = solve_steady(p).n_cav;
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("degenerate susceptibility denominators") {
    SystemParams p = preset(PresetId::fig2a);
    p.gamma_1 = 0.0;
    p.gamma_2 = 0.0;
    p.g2 = 0.0;
    p.Delta_1 = 0.0; // inner denominator exactly zero, no control shunt
    CHECK_THROWS_AS(atomic_susceptibility(p), SingularityError);
}
