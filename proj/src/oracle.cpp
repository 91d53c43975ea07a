#include "multieit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace multieit {

namespace {

constexpr Complex I{0.0, 1.0};

// in-place Gaussian elimination with partial pivoting on an n x n system
void solve_dense(std::vector<Complex>& m, std::vector<Complex>& rhs,
                 std::size_t n, double delta) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(m[r * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300)
            throw SingularityError("sideband system singular", delta);
        if (pivot != col) {
            for (std::size_t k = col; k < n; ++k)
                std::swap(m[col * n + k], m[pivot * n + k]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const Complex inv = 1.0 / m[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = m[r * n + col] * inv;
            if (f == Complex{}) continue;
            m[r * n + col] = {};
            for (std::size_t k = col + 1; k < n; ++k)
                m[r * n + k] -= f * m[col * n + k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t row = n; row-- > 0;) {
        Complex acc = rhs[row];
        for (std::size_t k = row + 1; k < n; ++k)
            acc -= m[row * n + k] * rhs[k];
        rhs[row] = acc / m[row * n + row];
    }
}

double norm_inf(const std::vector<Complex>& m, std::size_t n) {
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < n; ++c) row += std::abs(m[r * n + c]);
        worst = std::max(worst, row);
    }
    return worst;
}

} // namespace

SidebandSystem assemble_system(const SystemParams& p, const SteadyState& s,
                               double delta) {
    SidebandSystem sys{};
    sys.delta = delta;
    auto M = [&sys](int r, int c) -> Complex& { return sys.m[r * 7 + c]; };
    const Complex c_s = s.c_s;
    const double D = s.Delta_eff;

    // unknowns x = [c_-, c_+*, a_-, a_+*, b_-, b_+*, Q_-]
    // rows are the e^{-i delta t} projections of the five mean-field
    // equations linearized about the pump-only fixed point (and the
    // conjugated +delta projections for the starred unknowns)
    M(0, 0) = Complex(p.kappa, D - delta);
    M(0, 6) = -I * p.g * c_s;
    M(0, 2) = I * p.g1;
    sys.rhs[0] = 1.0; // probe drive, per unit eps_p

    M(1, 1) = Complex(p.kappa, -(D + delta));
    M(1, 6) = I * p.g * std::conj(c_s);
    M(1, 3) = -I * p.g1;

    M(2, 2) = Complex(p.gamma_1, p.Delta_1 - delta);
    M(2, 0) = I * p.g1;
    M(2, 4) = I * p.g2;

    M(3, 3) = Complex(p.gamma_1, -(p.Delta_1 + delta));
    M(3, 1) = -I * p.g1;
    M(3, 5) = -I * p.g2;

    M(4, 4) = Complex(p.gamma_2, p.Delta_2 - delta);
    M(4, 2) = I * p.g2;

    M(5, 5) = Complex(p.gamma_2, -(p.Delta_2 + delta));
    M(5, 3) = -I * p.g2;

    M(6, 6) = Complex(p.omega_m * p.omega_m - delta * delta,
                      -delta * p.gamma_m);
    M(6, 0) = -p.g * p.omega_m * std::conj(c_s);
    M(6, 1) = -p.g * p.omega_m * c_s;
    return sys;
}

std::array<Complex, 7> solve_direct(const SidebandSystem& sys) {
    std::vector<Complex> m(sys.m.begin(), sys.m.end());
    std::vector<Complex> rhs(sys.rhs.begin(), sys.rhs.end());
    solve_dense(m, rhs, 7, sys.delta);
    std::array<Complex, 7> x{};
    std::copy(rhs.begin(), rhs.end(), x.begin());
    return x;
}

double solve_residual(const SidebandSystem& sys,
                      std::span<const Complex, 7> x) {
    double worst = 0.0;
    double rhs_max = 0.0;
    for (int r = 0; r < 7; ++r) {
        Complex acc = -sys.rhs[r];
        for (int c = 0; c < 7; ++c) acc += sys.m[r * 7 + c] * x[c];
        worst = std::max(worst, std::abs(acc));
        rhs_max = std::max(rhs_max, std::abs(sys.rhs[r]));
    }
    return worst / rhs_max;
}

double condition_number_inf(const SidebandSystem& sys) {
    const std::vector<Complex> m(sys.m.begin(), sys.m.end());
    // columns of the inverse via 7 solves
    std::vector<Complex> inv(49);
    for (int col = 0; col < 7; ++col) {
        std::vector<Complex> mc = m;
        std::vector<Complex> e(7);
        e[col] = 1.0;
        solve_dense(mc, e, 7, sys.delta);
        for (int r = 0; r < 7; ++r) inv[r * 7 + col] = e[r];
    }
    return norm_inf(m, 7) * norm_inf(inv, 7);
}

RealityCheckResult solve_unconstrained_reality(const SystemParams& p,
                                               const SteadyState& s,
                                               double delta) {
    // unknowns [c_-, c_+*, a_-, a_+*, b_-, b_+*, Q_-, Q_+*]: the conjugated
    // +delta projections now couple to Q_+* (col 7) instead of Q_-, and the
    // mechanical projection of the conjugated equation forms row 7; position
    // reality Q_+ = Q_-^* must come out of the solve instead of being imposed
    const SidebandSystem base = assemble_system(p, s, delta);
    const std::size_t n = 8;
    std::vector<Complex> m(n * n);
    std::vector<Complex> rhs(n);
    for (int r = 0; r < 7; ++r) {
        for (int c = 0; c < 7; ++c) m[r * n + c] = base.m[r * 7 + c];
        rhs[r] = base.rhs[r];
    }
    m[1 * n + 7] = m[1 * n + 6]; // conjugated cavity row drives Q_+*
    m[1 * n + 6] = {};
    for (int c = 0; c < 7; ++c) m[7 * n + c] = base.m[6 * 7 + c];
    m[7 * n + 7] = m[7 * n + 6]; // same mechanical factor, acting on Q_+*
    m[7 * n + 6] = {};
    solve_dense(m, rhs, n, delta);
    return {rhs[6], rhs[7]};
}

DeviationReport compare_closed_form(const SystemParams& p,
                                    std::span<const double> grid,
                                    BranchBForm form, bool keep_points) {
    const SteadyState st = solve_steady(p);
    DeviationReport rep;
    if (keep_points) rep.points.reserve(grid.size());
    for (double delta : grid) {
        const auto x = solve_direct(assemble_system(p, st, delta));
        const Complex cm = c_minus(p, st, delta, form);
        const Complex cp = c_plus(p, st, delta, form);
        const double scale = std::max(std::abs(x[0]), std::abs(x[1]));
        const double dm = std::abs(cm - x[0]) / scale;
        const double dp = std::abs(cp - x[1]) / scale;
        if (dm > 1e-8 || dp > 1e-8) ++rep.flagged;
        if (std::max(dm, dp) > std::max(rep.max_dev_minus, rep.max_dev_plus))
            rep.argmax_delta = delta;
        rep.max_dev_minus = std::max(rep.max_dev_minus, dm);
        rep.max_dev_plus = std::max(rep.max_dev_plus, dp);
        if (keep_points) rep.points.push_back({delta, dm, dp});
    }
    return rep;
}

} // namespace multieit
