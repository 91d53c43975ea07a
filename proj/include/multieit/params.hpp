#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multieit/constants.hpp"
#include "multieit/errors.hpp"

namespace multieit {

// All frequencies/rates are angular [rad/s]. The mechanical position is
// dimensionless (zero-point scaled), so the optomechanical coupling g is a
// plain frequency and neither m nor L appears anywhere.
struct SystemParams {
    double omega_m;  // mechanical frequency
    double gamma_m;  // mechanical damping
    double kappa;    // total cavity amplitude decay
    double eta;      // kappa_ext / kappa, in [0,1]
    double Delta_c;  // cavity-pump detuning
    double Delta_1;  // atomic detuning of |1>-|2>
    double Delta_2;  // composite detuning of |1>-|3> incl. control frequency
    double g;        // optomechanical coupling
    double g1;       // cavity-atom coupling
    double g2;       // control-field coupling
    double gamma_1;  // coherence decay of |1>-|2>
    double gamma_2;  // coherence decay of |1>-|3>
    double Omega_l;  // pump amplitude
    double eps_p;    // probe amplitude
    double lambda_l; // pump wavelength [m], power conversions only

    bool operator==(const SystemParams&) const = default;
};

enum class PresetId { fig2a, fig2c, fig2e, fig3a, fig3b, fig3c, fig3d, fig4 };

inline constexpr std::array<PresetId, 8> all_presets{
    PresetId::fig2a, PresetId::fig2c, PresetId::fig2e, PresetId::fig3a,
    PresetId::fig3b, PresetId::fig3c, PresetId::fig3d, PresetId::fig4};

const char* to_string(PresetId id);
std::optional<PresetId> preset_from_name(std::string_view name);

SystemParams preset(PresetId id);

// throws ConfigError on invariant violation (negative rate, eta out of range, ...)
void validate(const SystemParams& p);

// non-fatal regime checks, e.g. probe not weak against the pump
std::vector<std::string> regime_warnings(const SystemParams& p);

// JSON document, top-level keys = field names, frequencies quoted as
// value/2pi in MHz; "Q" accepted in place of gamma_m; unknown keys rejected.
SystemParams load_params(const std::string& json_text);
SystemParams load_params_file(const std::string& path);
std::string serialize_params(const SystemParams& p);

// |Omega_l| = sqrt(2 kappa P / (hbar omega_l)), omega_l = 2 pi c / lambda
double power_to_rabi(double power_w, double kappa, double lambda_l);
double rabi_to_power(double omega, double kappa, double lambda_l);

} // namespace multieit
