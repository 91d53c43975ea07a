#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "multieit/oracle.hpp"
#include "multieit/response.hpp"
#include "multieit/timedomain.hpp"

namespace multieit {

inline constexpr const char* version_string = "0.1.0";

// env var overriding CSV significant digits, clamped to [12, 17]
inline constexpr const char* csv_digits_env = "MULTIEIT_CSV_DIGITS";
int csv_digits();

struct WindowReport {
    struct Minimum {
        double delta_bar; // [rad/s]
        double mu_min;
        double prominence;
    };
    struct Peak {
        double delta_bar; // [rad/s]
        double mu_max;
        double fwhm; // [rad/s], measured at half-prominence
    };
    int count = 0; // == minima.size()
    std::vector<Minimum> minima;
    std::vector<Peak> peaks; // flanking maxima of the reported windows
    double threshold = 0.0;  // absolute prominence cut applied
};

// local minima of mu with topographic prominence >= fraction*(max mu - min mu)
WindowReport detect_windows(const Spectrum& spec,
                            double prominence_fraction = 0.1);

struct DelayCurve {
    std::vector<double> power_w;
    std::vector<double> omega_l;  // [rad/s], via power_to_rabi
    std::vector<double> tau_g;    // [s]
    double eval_delta = 0.0;      // [rad/s]
};

// steady state re-solved at every power
DelayCurve delay_vs_power(const SystemParams& p,
                          std::span<const double> power_grid,
                          double eval_delta);

// 20 log-spaced powers spanning Omega_l/2pi = 2..40 MHz at params' kappa/lambda
std::vector<double> default_power_grid(const SystemParams& p);

void write_spectrum_csv(std::ostream& os, const Spectrum& spec, int digits);
void write_delay_csv(std::ostream& os, const DelayCurve& curve, int digits);
std::string window_report_json(const WindowReport& report, double omega_m);
std::string run_metadata_json(const SystemParams& p, const std::string& label,
                              std::size_t grid_points,
                              double prominence_fraction);

// writes <name>_spectrum.csv, <name>_windows.json, <name>_meta.json
std::vector<std::filesystem::path> run_preset(
    PresetId id, const std::filesystem::path& output_dir);

struct ValidationOptions {
    double closed_form_tol = 1e-9;
    int threads = 0;   // 0: hardware concurrency
    bool verbose = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured numbers
};

struct ValidationSummary {
    std::vector<CriterionResult> criteria;
    bool all_pass() const;
};

// runs the full acceptance battery (criteria 1-7); criterion 0 = all
ValidationSummary run_validation(const ValidationOptions& opts = {},
                                 int only_criterion = 0);

} // namespace multieit
