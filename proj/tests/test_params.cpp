#include <doctest.h>

#include <cmath>

#include "multieit/params.hpp"

using namespace multieit;

namespace {
bool close(double a, double b, double rel = 1e-14) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}
} // namespace

TEST_CASE("preset names round-trip") {
    for (PresetId id : all_presets) {
        const auto back = preset_from_name(to_string(id));
        REQUIRE(back.has_value());
        CHECK(*back == id);
    }
    CHECK(!preset_from_name("fig9z").has_value());
    CHECK(!preset_from_name("").has_value());
}

TEST_CASE("preset values") {
    const SystemParams p = preset(PresetId::fig2a);
    CHECK(close(p.omega_m, mhz_to_rad(100.0)));
    CHECK(p.gamma_m == p.omega_m / 6700.0);
    CHECK(close(p.kappa, mhz_to_rad(4.0)));
    CHECK(p.eta == 0.5);
    CHECK(p.Delta_c == p.omega_m);
    CHECK(p.Delta_1 == p.omega_m);
    CHECK(p.Delta_2 == p.omega_m);
    CHECK(close(p.g, mhz_to_rad(2.0)));
    CHECK(close(p.g1, mhz_to_rad(8.0)));
    CHECK(close(p.g2, mhz_to_rad(8.0)));
    CHECK(close(p.gamma_1, mhz_to_rad(0.01)));
    CHECK(p.Omega_l == mhz_to_rad(20.0));
    CHECK(p.eps_p == 1e-3 * p.Omega_l);
    CHECK(p.lambda_l == 1.064e-6);

    CHECK(preset(PresetId::fig4) == preset(PresetId::fig2a));
    CHECK(close(preset(PresetId::fig2c).g1, mhz_to_rad(4.0)));
    CHECK(close(preset(PresetId::fig2e).g2, mhz_to_rad(4.0)));
    const SystemParams p3b = preset(PresetId::fig3b);
    CHECK(close(p3b.g, mhz_to_rad(1.0)));
    CHECK(p3b.g2 == 0.0);
    const SystemParams p3d = preset(PresetId::fig3d);
    CHECK(p3d.g == 0.0);
    CHECK(p3d.g1 == 0.0);
    CHECK(p3d.g2 == 0.0);
}

TEST_CASE("validate rejects bad parameters") {
    SystemParams p = preset(PresetId::fig2a);
    CHECK_NOTHROW(validate(p));
    SystemParams q = p;
    q.eta = 1.5;
    CHECK_THROWS_AS(validate(q), ConfigError);
    q = p;
    q.kappa = 0.0;
    CHECK_THROWS_AS(validate(q), ConfigError);
    q = p;
    q.gamma_m = -1.0;
    CHECK_THROWS_AS(validate(q), ConfigError);
    q = p;
    q.Delta_c = std::nan("");
    CHECK_THROWS_AS(validate(q), ConfigError);
    q = p;
    q.omega_m = -p.omega_m;
    CHECK_THROWS_AS(validate(q), ConfigError);
}

TEST_CASE("regime warnings") {
    SystemParams p = preset(PresetId::fig2a);
    CHECK(regime_warnings(p).empty());
    SystemParams q = p;
    q.eps_p = 0.2 * q.Omega_l;
    CHECK(regime_warnings(q).size() == 1);
    q = p;
    q.kappa = p.omega_m; // deeply unresolved sidebands
    CHECK(regime_warnings(q).size() == 1);
}

TEST_CASE("serialize/load round trip") {
    const SystemParams p = preset(PresetId::fig2e);
    const SystemParams q = load_params(serialize_params(p));
    CHECK(close(q.omega_m, p.omega_m));
    CHECK(close(q.gamma_m, p.gamma_m));
    CHECK(close(q.kappa, p.kappa));
    CHECK(q.eta == p.eta);
    CHECK(close(q.Delta_c, p.Delta_c));
    CHECK(close(q.Delta_1, p.Delta_1));
    CHECK(close(q.Delta_2, p.Delta_2));
    CHECK(close(q.g, p.g));
    CHECK(close(q.g1, p.g1));
    CHECK(close(q.g2, p.g2));
    CHECK(close(q.gamma_1, p.gamma_1));
    CHECK(close(q.gamma_2, p.gamma_2));
    CHECK(close(q.Omega_l, p.Omega_l));
    CHECK(close(q.eps_p, p.eps_p));
    CHECK(q.lambda_l == p.lambda_l);
}

TEST_CASE("config parsing") {
    const char* base = R"({"omega_m":100,"Q":6700,"kappa":4,"Delta_c":100,
        "Delta_1":100,"Delta_2":100,"g":2,"g1":8,"g2":8,
        "gamma_1":0.01,"gamma_2":0.01,"Omega_l":20})";
    // mechanical quality factor in place of gamma_m, everything else defaulted
    CHECK(load_params(base) == preset(PresetId::fig2a));

    CHECK_THROWS_AS(load_params(R"({"omega_m":100})"), ConfigError);
    CHECK_THROWS_AS(load_params("not json"), ConfigError);
    CHECK_THROWS_AS(load_params("[1,2]"), ConfigError);
    CHECK_THROWS_AS(load_params(R"({"omega_m":"100"})"), ConfigError);

    std::string both(base);
    both.insert(both.size() - 1, R"(,"gamma_m":0.015)");
    CHECK_THROWS_AS(load_params(both), ConfigError);

    std::string unknown(base);
    unknown.insert(unknown.size() - 1, R"(,"coupling":3)");
    CHECK_THROWS_AS(load_params(unknown), ConfigError);

    std::string eta(base);
    eta.insert(eta.size() - 1, R"(,"eta":1.0)");
    CHECK(load_params(eta).eta == 1.0);
}

TEST_CASE("pump power conversions") {
    const double kappa = mhz_to_rad(4.0);
    const double lam = 1.064e-6;
    const double omega = mhz_to_rad(20.0);
    // P = Omega^2 hbar omega_l / (2 kappa) at 1064 nm
    CHECK(close(rabi_to_power(omega, kappa, lam), 5.865229048636482e-11, 1e-12));
    CHECK(close(power_to_rabi(rabi_to_power(omega, kappa, lam), kappa, lam),
                omega));
    CHECK(power_to_rabi(0.0, kappa, lam) == 0.0);
    CHECK_THROWS_AS(power_to_rabi(-1.0, kappa, lam), ConfigError);
    CHECK_THROWS_AS(power_to_rabi(1.0, 0.0, lam), ConfigError);
}
