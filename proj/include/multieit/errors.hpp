#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace multieit {

// invalid parameter set or malformed config input
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// response denominator (or the linear system) degenerate at a specific detuning
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double delta)
        : std::runtime_error(what), delta(delta) {}
    double delta; // [rad/s]
};

// steady-state fixed point failed to converge, or multiple physical roots found
class SteadyStateError : public std::runtime_error {
public:
    explicit SteadyStateError(const std::string& what,
                              std::vector<double> roots = {})
        : std::runtime_error(what), photon_roots(std::move(roots)) {}
    std::vector<double> photon_roots; // candidate |c_s|^2 values, if known
};

} // namespace multieit
