#pragma once

#include <array>
#include <span>

#include "multieit/response.hpp"

namespace multieit {

// first-order sideband system, unknowns [c_-, c_+*, a_-, a_+*, b_-, b_+*, Q_-],
// rhs normalized to unit probe amplitude (single nonzero entry in the c_- row)
struct SidebandSystem {
    std::array<Complex, 49> m; // row-major 7x7
    std::array<Complex, 7> rhs;
    double delta;
};

// direct linearization of the mean-field equations about the pump-only fixed
// point; no use of the closed-form algebra of the response module
SidebandSystem assemble_system(const SystemParams& p, const SteadyState& s,
                               double delta);

// Gaussian elimination with partial pivoting; throws SingularityError naming
// delta when a pivot falls below 1e-300
std::array<Complex, 7> solve_direct(const SidebandSystem& sys);

// max_i |M x - rhs|_i / max_i |rhs|_i
double solve_residual(const SidebandSystem& sys, std::span<const Complex, 7> x);

// ||M||_inf * ||M^-1||_inf
double condition_number_inf(const SidebandSystem& sys);

// variant with Q_+ kept as an unknown of its own instead of identifying it
// with Q_-^*; position reality must then emerge from the solve itself
struct RealityCheckResult {
    Complex Q_minus;
    Complex Q_plus_conj; // Q_+^* as solved independently
};
RealityCheckResult solve_unconstrained_reality(const SystemParams& p,
                                               const SteadyState& s,
                                               double delta);

struct DeviationPoint {
    double delta;
    double dev_minus; // |closed - direct| / max(|c_-|, |c_+*|), per point
    double dev_plus;
};

struct DeviationReport {
    double max_dev_minus = 0.0;
    double max_dev_plus = 0.0;
    double argmax_delta = 0.0; // where the worse of the two deviations peaks
    int flagged = 0;           // points with deviation > 1e-8
    std::vector<DeviationPoint> points;
};

DeviationReport compare_closed_form(const SystemParams& p,
                                    std::span<const double> grid,
                                    BranchBForm form = BranchBForm::corrected,
                                    bool keep_points = false);

} // namespace multieit
