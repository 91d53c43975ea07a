#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "multieit/scenarios.hpp"

using namespace multieit;
namespace fs = std::filesystem;

namespace {

// hand-built spectrum: only delta_bar and mu matter to the window detector
Spectrum synthetic(const std::vector<double>& x, const std::vector<double>& mu) {
    Spectrum s;
    s.omega_m = mhz_to_rad(100.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        SidebandResponse r{};
        r.delta = s.omega_m + x[i];
        r.delta_bar = x[i];
        r.mu = mu[i];
        r.t_p = Complex(1.0, 0.0);
        s.points.push_back(r);
        s.unwrapped_phase.push_back(0.0);
        s.tau_g.push_back(0.0);
    }
    return s;
}

} // namespace

TEST_CASE("csv digits env override") {
    unsetenv(csv_digits_env);
    CHECK(csv_digits() == 12);
    setenv(csv_digits_env, "15", 1);
    CHECK(csv_digits() == 15);
    setenv(csv_digits_env, "40", 1);
    CHECK(csv_digits() == 17);
    setenv(csv_digits_env, "3", 1);
    CHECK(csv_digits() == 12);
    setenv(csv_digits_env, "junk", 1);
    CHECK(csv_digits() == 12);
    unsetenv(csv_digits_env);
}

TEST_CASE("window detector on synthetic spectra") {
    std::vector<double> x, flat, two_dips;
    const double u = mhz_to_rad(1.0);
    for (int i = 0; i <= 400; ++i) {
        const double xi = (-20.0 + 0.1 * i) * u;
        x.push_back(xi);
        flat.push_back(1.0);
        const auto dip = [&](double at, double w) {
            return std::exp(-(xi - at) * (xi - at) / (2.0 * w * w));
        };
        two_dips.push_back(2.0 - 1.5 * dip(-8.0 * u, u) - 0.8 * dip(6.0 * u, u));
    }
    CHECK(detect_windows(synthetic(x, flat)).count == 0);

    const auto rep = detect_windows(synthetic(x, two_dips));
    REQUIRE(rep.count == 2);
    CHECK(rep.minima[0].delta_bar == doctest::Approx(-8.0 * u).epsilon(1e-2));
    CHECK(rep.minima[1].delta_bar == doctest::Approx(6.0 * u).epsilon(1e-2));
    CHECK(rep.minima[0].prominence == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(rep.minima[0].mu_min == doctest::Approx(0.5).epsilon(1e-3));
    // Gaussian dip: width at half prominence is 2 sqrt(2 ln 2) sigma
    REQUIRE(rep.peaks.size() >= 1);

    // a shallow dimple below the prominence cut is not a window
    std::vector<double> dimple = two_dips;
    for (std::size_t i = 0; i < x.size(); ++i)
        dimple[i] -= 0.05 * std::exp(-std::pow((x[i] / u - 15.0) / 1.0, 2));
    CHECK(detect_windows(synthetic(x, dimple)).count == 2);
    CHECK(detect_windows(synthetic(x, dimple), 0.01).count == 3);

    CHECK_THROWS_AS(detect_windows(synthetic({}, {})), ConfigError);
}

TEST_CASE("preset window structure") {
    const SystemParams p = preset(PresetId::fig2a);
    const auto rep = detect_windows(spectrum(p, default_grid(p)));
    REQUIRE(rep.count == 3);
    REQUIRE(rep.peaks.size() == 4);
    // flanking maxima alternate with the reported minima
    for (int i = 0; i < 3; ++i) {
        CHECK(rep.peaks[i].delta_bar < rep.minima[i].delta_bar);
        CHECK(rep.minima[i].delta_bar < rep.peaks[i + 1].delta_bar);
    }
    CHECK(std::abs(rep.minima.front().delta_bar + p.g2) < 0.05 * p.g2);
    CHECK(std::abs(rep.minima.back().delta_bar - p.g2) < 0.05 * p.g2);
}

TEST_CASE("spectrum csv format") {
    const SystemParams p = preset(PresetId::fig3d);
    const Spectrum spec = spectrum(p, default_grid(p, 11));
    std::ostringstream os;
    write_spectrum_csv(os, spec, 12);
    std::istringstream in(os.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "delta_bar_over_omega_m,mu,nu,re_t,im_t,T_power,phase_unwrapped,"
          "tau_g_s");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
        CHECK(line.find_first_of(";\t") == std::string::npos);
    }
    CHECK(rows == 11);

    // first column is the normalized grid
    std::istringstream again(os.str());
    std::getline(again, line);
    std::getline(again, line);
    CHECK(std::stod(line.substr(0, line.find(','))) ==
          doctest::Approx(-0.2).epsilon(1e-12));

    std::ostringstream wide;
    write_spectrum_csv(wide, spec, 17);
    CHECK(wide.str().size() > os.str().size());
}

TEST_CASE("delay csv format and default power grid") {
    const SystemParams p = preset(PresetId::fig4);
    const auto powers = default_power_grid(p);
    REQUIRE(powers.size() == 20);
    for (std::size_t i = 1; i < powers.size(); ++i)
        CHECK(powers[i] > powers[i - 1]);
    CHECK(power_to_rabi(powers.front(), p.kappa, p.lambda_l) ==
          doctest::Approx(mhz_to_rad(2.0)).epsilon(1e-12));
    CHECK(power_to_rabi(powers.back(), p.kappa, p.lambda_l) ==
          doctest::Approx(mhz_to_rad(40.0)).epsilon(1e-12));

    const std::vector<double> few = {powers.front(), powers.back()};
    const DelayCurve curve = delay_vs_power(p, few, p.omega_m);
    REQUIRE(curve.tau_g.size() == 2);
    // weakest pump: deep in the slow-light regime of the central window
    CHECK(curve.tau_g.front() == doctest::Approx(1.635e-5).epsilon(2e-3));
    CHECK(curve.tau_g.back() == doctest::Approx(1.799e-6).epsilon(2e-3));

    std::ostringstream os;
    write_delay_csv(os, curve, 12);
    std::istringstream in(os.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "power_w,omega_l_over_2pi_mhz,tau_g_s");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);

    CHECK(delay_vs_power(p, std::vector<double>{}, p.omega_m).tau_g.empty());
    CHECK_THROWS_AS(delay_vs_power(p, std::vector<double>{-1.0}, p.omega_m),
                    ConfigError);
}

TEST_CASE("window report and metadata json") {
    const SystemParams p = preset(PresetId::fig3c);
    const auto rep = detect_windows(spectrum(p, default_grid(p)));
    const auto j = nlohmann::json::parse(window_report_json(rep, p.omega_m));
    CHECK(j.at("count").get<int>() == 1);
    CHECK(j.at("minima").size() == 1);
    CHECK(j.at("peaks").size() == 2);
    CHECK(std::abs(j.at("minima")[0].at("delta_bar_mhz").get<double>()) <
          0.05);

    const auto meta =
        nlohmann::json::parse(run_metadata_json(p, "fig3c", 2001, 0.1));
    CHECK(meta.at("version").get<std::string>() == version_string);
    CHECK(meta.at("label").get<std::string>() == "fig3c");
    CHECK(meta.at("grid_points").get<std::size_t>() == 2001);
    // embedded parameters must load back to the preset
    const SystemParams q =
        load_params(meta.at("params_mhz_over_2pi").dump());
    CHECK(std::abs(q.g - p.g) <= 1e-12 * p.g);
    CHECK(q.eta == p.eta);
}

TEST_CASE("run_preset writes a reproducible bundle") {
    const fs::path dir =
        fs::temp_directory_path() / "multieit_test_run_preset";
    fs::remove_all(dir);
    const auto manifest = run_preset(PresetId::fig3c, dir);
    REQUIRE(manifest.size() == 3);
    CHECK(manifest[0].filename() == "fig3c_spectrum.csv");
    CHECK(manifest[1].filename() == "fig3c_windows.json");
    CHECK(manifest[2].filename() == "fig3c_meta.json");
    for (const auto& f : manifest) CHECK(fs::file_size(f) > 0);

    const auto read = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string first = read(manifest[0]);
    CHECK(first.rfind("delta_bar_over_omega_m,", 0) == 0);
    const auto again = run_preset(PresetId::fig3c, dir);
    CHECK(read(again[0]) == first);
    fs::remove_all(dir);
}

TEST_CASE("validation battery covers all criteria ids") {
    // criterion 4 alone: cheap, and its internals are pinned elsewhere
    const auto summary = run_validation({}, 4);
    REQUIRE(summary.criteria.size() == 1);
    CHECK(summary.criteria[0].id == 4);
    CHECK(summary.criteria[0].pass);
    CHECK(!summary.criteria[0].detail.empty());

    // an impossible tolerance must fail honestly and report the number
    ValidationOptions tight;
    tight.closed_form_tol = 1e-15;
    const auto strict = run_validation(tight, 1);
    REQUIRE(strict.criteria.size() == 1);
    CHECK(!strict.criteria[0].pass);
    CHECK(!strict.all_pass());
}
