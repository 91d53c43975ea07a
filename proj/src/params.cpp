#include "multieit/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace multieit {

namespace {

SystemParams base_fig2() {
    SystemParams p{};
    p.omega_m = mhz_to_rad(100.0);
    p.gamma_m = p.omega_m / 6700.0;
    p.kappa = mhz_to_rad(4.0);
    p.eta = 0.5;
    p.Delta_c = mhz_to_rad(100.0);
    p.Delta_1 = mhz_to_rad(100.0);
    p.Delta_2 = mhz_to_rad(100.0);
    p.g = mhz_to_rad(2.0);
    p.g1 = mhz_to_rad(8.0);
    p.g2 = mhz_to_rad(8.0);
    p.gamma_1 = mhz_to_rad(0.01);
    p.gamma_2 = mhz_to_rad(0.01);
    p.Omega_l = mhz_to_rad(20.0);
    p.eps_p = 1e-3 * p.Omega_l;
    p.lambda_l = 1.064e-6;
    return p;
}

} // namespace

const char* to_string(PresetId id) {
    switch (id) {
    case PresetId::fig2a: return "fig2a";
    case PresetId::fig2c: return "fig2c";
    case PresetId::fig2e: return "fig2e";
    case PresetId::fig3a: return "fig3a";
    case PresetId::fig3b: return "fig3b";
    case PresetId::fig3c: return "fig3c";
    case PresetId::fig3d: return "fig3d";
    case PresetId::fig4: return "fig4";
    }
    return "?";
}

std::optional<PresetId> preset_from_name(std::string_view name) {
    for (PresetId id : all_presets)
        if (name == to_string(id)) return id;
    return std::nullopt;
}

SystemParams preset(PresetId id) {
    SystemParams p = base_fig2();
    switch (id) {
    case PresetId::fig2a:
    case PresetId::fig4:
        break;
    case PresetId::fig2c:
        p.g1 = mhz_to_rad(4.0);
        break;
    case PresetId::fig2e:
        p.g2 = mhz_to_rad(4.0);
        break;
    case PresetId::fig3a:
        p.g = mhz_to_rad(1.0);
        p.g1 = mhz_to_rad(4.0);
        p.g2 = mhz_to_rad(4.0);
        break;
    case PresetId::fig3b:
        p.g = mhz_to_rad(1.0);
        p.g1 = mhz_to_rad(4.0);
        p.g2 = 0.0;
        break;
    case PresetId::fig3c:
        p.g = mhz_to_rad(1.0);
        p.g1 = 0.0;
        p.g2 = 0.0;
        break;
    case PresetId::fig3d:
        p.g = 0.0;
        p.g1 = 0.0;
        p.g2 = 0.0;
        break;
    }
    validate(p);
    return p;
}

void validate(const SystemParams& p) {
    auto bad = [](const std::string& what) { throw ConfigError(what); };
    if (!(p.omega_m > 0)) bad("omega_m must be > 0");
    if (!(p.kappa > 0)) bad("kappa must be > 0");
    if (p.gamma_m < 0) bad("negative rate: gamma_m");
    if (p.gamma_1 < 0) bad("negative rate: gamma_1");
    if (p.gamma_2 < 0) bad("negative rate: gamma_2");
    if (p.g < 0) bad("negative rate: g");
    if (p.g1 < 0) bad("negative rate: g1");
    if (p.g2 < 0) bad("negative rate: g2");
    if (p.Omega_l < 0) bad("negative rate: Omega_l");
    if (p.eps_p < 0) bad("negative rate: eps_p");
    if (!(p.eta >= 0.0 && p.eta <= 1.0)) bad("eta out of [0,1]");
    if (!(p.lambda_l > 0)) bad("lambda_l must be > 0");
    for (double v : {p.omega_m, p.gamma_m, p.kappa, p.eta, p.Delta_c, p.Delta_1,
                     p.Delta_2, p.g, p.g1, p.g2, p.gamma_1, p.gamma_2,
                     p.Omega_l, p.eps_p, p.lambda_l})
        if (!std::isfinite(v)) bad("non-finite parameter");
}

std::vector<std::string> regime_warnings(const SystemParams& p) {
    std::vector<std::string> w;
    if (p.eps_p > 0 && p.Omega_l > 0 && p.eps_p > 0.1 * p.Omega_l)
        w.push_back("probe not weak: eps_p > 0.1*Omega_l, first-order "
                    "sideband treatment may be inaccurate");
    if (p.omega_m < 4.0 * p.kappa)
        w.push_back("not sideband-resolved: omega_m < 4*kappa");
    return w;
}

namespace {

using nlohmann::json;

const std::vector<std::string> frequency_keys = {
    "omega_m", "gamma_m", "kappa", "Delta_c", "Delta_1", "Delta_2",
    "g",       "g1",      "g2",    "gamma_1", "gamma_2", "Omega_l",
    "eps_p"};

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing field: " + key);
    if (!j.at(key).is_number())
        throw ConfigError("field is not a number: " + key);
    return j.at(key).get<double>();
}

} // namespace

SystemParams load_params(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    for (const auto& [key, _] : j.items()) {
        bool known = key == "eta" || key == "lambda_l" || key == "Q";
        for (const auto& fk : frequency_keys) known = known || key == fk;
        if (!known) throw ConfigError("unknown key: " + key);
    }

    SystemParams p{};
    p.omega_m = mhz_to_rad(require_number(j, "omega_m"));
    if (j.contains("Q") && j.contains("gamma_m"))
        throw ConfigError("give either gamma_m or Q, not both");
    if (j.contains("Q")) {
        double q = require_number(j, "Q");
        if (!(q > 0)) throw ConfigError("Q must be > 0");
        p.gamma_m = p.omega_m / q;
    } else {
        p.gamma_m = mhz_to_rad(require_number(j, "gamma_m"));
    }
    p.kappa = mhz_to_rad(require_number(j, "kappa"));
    p.Delta_c = mhz_to_rad(require_number(j, "Delta_c"));
    p.Delta_1 = mhz_to_rad(require_number(j, "Delta_1"));
    p.Delta_2 = mhz_to_rad(require_number(j, "Delta_2"));
    p.g = mhz_to_rad(require_number(j, "g"));
    p.g1 = mhz_to_rad(require_number(j, "g1"));
    p.g2 = mhz_to_rad(require_number(j, "g2"));
    p.gamma_1 = mhz_to_rad(require_number(j, "gamma_1"));
    p.gamma_2 = mhz_to_rad(require_number(j, "gamma_2"));
    p.Omega_l = mhz_to_rad(require_number(j, "Omega_l"));
    p.eps_p = j.contains("eps_p") ? mhz_to_rad(require_number(j, "eps_p"))
                                  : 1e-3 * p.Omega_l;
    p.eta = j.contains("eta") ? require_number(j, "eta") : 0.5;
    p.lambda_l =
        j.contains("lambda_l") ? require_number(j, "lambda_l") : 1.064e-6;
    validate(p);
    return p;
}

SystemParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_params(ss.str());
}

std::string serialize_params(const SystemParams& p) {
    json j;
    j["omega_m"] = rad_to_mhz(p.omega_m);
    j["gamma_m"] = rad_to_mhz(p.gamma_m);
    j["kappa"] = rad_to_mhz(p.kappa);
    j["eta"] = p.eta;
    j["Delta_c"] = rad_to_mhz(p.Delta_c);
    j["Delta_1"] = rad_to_mhz(p.Delta_1);
    j["Delta_2"] = rad_to_mhz(p.Delta_2);
    j["g"] = rad_to_mhz(p.g);
    j["g1"] = rad_to_mhz(p.g1);
    j["g2"] = rad_to_mhz(p.g2);
    j["gamma_1"] = rad_to_mhz(p.gamma_1);
    j["gamma_2"] = rad_to_mhz(p.gamma_2);
    j["Omega_l"] = rad_to_mhz(p.Omega_l);
    j["eps_p"] = rad_to_mhz(p.eps_p);
    j["lambda_l"] = p.lambda_l;
    return j.dump(2);
}

double power_to_rabi(double power_w, double kappa, double lambda_l) {
    if (!(kappa > 0)) throw ConfigError("kappa must be > 0");
    if (!(lambda_l > 0)) throw ConfigError("lambda_l must be > 0");
    if (power_w < 0) throw ConfigError("power must be >= 0");
    const double omega_l = two_pi * speed_of_light / lambda_l;
    return std::sqrt(2.0 * kappa * power_w / (hbar * omega_l));
}

double rabi_to_power(double omega, double kappa, double lambda_l) {
    if (!(kappa > 0)) throw ConfigError("kappa must be > 0");
    if (!(lambda_l > 0)) throw ConfigError("lambda_l must be > 0");
    const double omega_l = two_pi * speed_of_light / lambda_l;
    return omega * omega * hbar * omega_l / (2.0 * kappa);
}

} // namespace multieit
