#include <doctest.h>

#include <cmath>
#include <complex>

#include "multieit/oracle.hpp"

using namespace multieit;

namespace {
double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
} // namespace

TEST_CASE("direct solve reproduces the closed-form anchors") {
    const SystemParams p = preset(PresetId::fig2a);
    const SteadyState s = solve_steady(p);
    const auto sys = assemble_system(p, s, p.omega_m);
    const auto x = solve_direct(sys);
    CHECK(rel(x[0], {1.0713709584148115e-08, -4.23582866674774e-10}) < 1e-9);
    CHECK(rel(x[1], {-4.982743680157811e-11, -5.797147940152293e-10}) < 1e-9);
    CHECK(solve_residual(sys, x) < 1e-12);
    // moderately ill-conditioned but far from breakdown
    CHECK(condition_number_inf(sys) ==
          doctest::Approx(1.889812070766e9).epsilon(1e-6));
}

TEST_CASE("closed form matches the direct solve everywhere") {
    for (PresetId id : {PresetId::fig2a, PresetId::fig2c, PresetId::fig2e,
                        PresetId::fig3a, PresetId::fig3b, PresetId::fig3c,
                        PresetId::fig3d}) {
        CAPTURE(to_string(id));
        const SystemParams p = preset(id);
        const auto rep = compare_closed_form(p, default_grid(p, 201));
        CHECK(rep.max_dev_minus < 1e-9);
        CHECK(rep.max_dev_plus < 1e-9);
        CHECK(rep.flagged == 0);
    }
}

TEST_CASE("deviation report bookkeeping") {
    const SystemParams p = preset(PresetId::fig2a);
    const auto rep =
        compare_closed_form(p, default_grid(p, 101), BranchBForm::corrected,
                            /*keep_points=*/true);
    REQUIRE(rep.points.size() == 101);
    double worst = 0.0;
    for (const auto& pt : rep.points)
        worst = std::max(worst, std::max(pt.dev_minus, pt.dev_plus));
    CHECK(worst == std::max(rep.max_dev_minus, rep.max_dev_plus));
}

// the control variant must fail loudly exactly where the control coupling
// splits the atomic line
TEST_CASE("uncorrected lower-sideband factor is rejected by the oracle") {
    const SystemParams p = preset(PresetId::fig2a);
    const auto rep = compare_closed_form(p, default_grid(p, 201),
                                         BranchBForm::uncorrected_control);
    CHECK(rep.max_dev_minus > 1e-3);
    CHECK(std::abs(std::abs(rep.argmax_delta - p.omega_m) - p.g2) <
          0.1 * p.g2);
    CHECK(rep.flagged > 0);
}

// solving with Q_+ as an eighth unknown instead of imposing Q_+ = Q_-^*:
// reality of the mechanical displacement must emerge on its own
TEST_CASE("mechanical reality emerges unconstrained") {
    const SystemParams p = preset(PresetId::fig2a);
    const SteadyState s = solve_steady(p);
    for (double x : {-0.1, -0.05, 0.0, 0.08, 0.16}) {
        const auto rc = solve_unconstrained_reality(p, s, p.omega_m * (1 + x));
        CHECK(rel(rc.Q_plus_conj, rc.Q_minus) < 1e-12);
    }
}

TEST_CASE("singular systems are reported, not propagated as garbage") {
    const SystemParams p = preset(PresetId::fig2a);
    const SteadyState s = solve_steady(p);
    SidebandSystem sys = assemble_system(p, s, p.omega_m);
    sys.m.fill(Complex(0, 0));
    CHECK_THROWS_AS(solve_direct(sys), SingularityError);
}
