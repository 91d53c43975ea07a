#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multieit/scenarios.hpp"

using namespace multieit;

namespace {

struct Source {
    std::string preset_name;
    std::string config_path;
};

void add_source_opts(CLI::App* cmd, Source& src) {
    auto* a = cmd->add_option("--preset", src.preset_name,
                              "built-in parameter set (see `preset --list`)");
    auto* b = cmd->add_option("--config", src.config_path,
                              "JSON parameter file, frequencies as value/2pi in MHz");
    a->excludes(b);
}

SystemParams resolve_params(const Source& src) {
    if (!src.preset_name.empty()) {
        const auto id = preset_from_name(src.preset_name);
        if (!id) throw ConfigError("unknown preset '" + src.preset_name + "'");
        return preset(*id);
    }
    if (!src.config_path.empty()) return load_params_file(src.config_path);
    throw ConfigError("one of --preset / --config is required");
}

// "-" or empty means stdout
int with_output(const std::string& path, auto&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return std::cout ? 0 : 2;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "error: cannot open " << path << "\n";
        return 2;
    }
    fn(os);
    if (!os) {
        std::cerr << "error: write failed for " << path << "\n";
        return 2;
    }
    return 0;
}

void warn_regime(const SystemParams& p) {
    for (const auto& w : regime_warnings(p))
        std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak-probe response of a hybrid atom-optomechanics cavity"};
    app.require_subcommand(1);

    Source spec_src;
    int spec_points = 2001;
    std::vector<double> spec_range{-0.2, 0.2};
    std::string spec_out = "-";
    int spec_threads = 0;
    auto* cmd_spectrum =
        app.add_subcommand("spectrum", "probe response sweep as CSV");
    add_source_opts(cmd_spectrum, spec_src);
    cmd_spectrum->add_option("--points", spec_points, "grid size")
        ->check(CLI::Range(2, 2000000));
    cmd_spectrum
        ->add_option("--range", spec_range,
                     "delta_bar/omega_m window, two values")
        ->expected(2);
    cmd_spectrum->add_option("--out", spec_out, "output file, '-' = stdout");
    cmd_spectrum->add_option("--threads", spec_threads,
                             "worker threads, 0 = hardware");

    Source win_src;
    int win_points = 2001;
    std::vector<double> win_range{-0.2, 0.2};
    double win_prominence = 0.1;
    std::string win_out = "-";
    auto* cmd_windows = app.add_subcommand(
        "windows", "transparency-window report (JSON) from the mu spectrum");
    add_source_opts(cmd_windows, win_src);
    cmd_windows->add_option("--points", win_points, "grid size")
        ->check(CLI::Range(8, 2000000));
    cmd_windows
        ->add_option("--range", win_range, "delta_bar/omega_m window, two values")
        ->expected(2);
    cmd_windows->add_option("--prominence", win_prominence,
                            "prominence cut as a fraction of the mu range")
        ->check(CLI::Range(0.0, 1.0));
    cmd_windows->add_option("--out", win_out, "output file, '-' = stdout");

    Source delay_src;
    std::vector<double> delay_powers;
    double delay_dbar_mhz = 0.0;
    bool delay_two_omega_m = false;
    std::string delay_out = "-";
    auto* cmd_delay = app.add_subcommand(
        "delay", "group delay vs pump power as CSV, steady state re-solved "
                 "at every power");
    add_source_opts(cmd_delay, delay_src);
    cmd_delay->add_option("--powers", delay_powers,
                          "pump powers [W]; default: 20 log-spaced points "
                          "spanning Omega_l/2pi = 2..40 MHz");
    auto* eval_opt = cmd_delay->add_option(
        "--eval-delta-bar", delay_dbar_mhz,
        "evaluation detuning delta_bar/2pi [MHz] off the sideband center");
    cmd_delay
        ->add_flag("--eval-two-omega-m", delay_two_omega_m,
                   "evaluate at delta = 2*omega_m instead of delta = omega_m")
        ->excludes(eval_opt);
    cmd_delay->add_option("--out", delay_out, "output file, '-' = stdout");

    double val_tol = 1e-9;
    int val_criterion = 0;
    auto* cmd_validate = app.add_subcommand(
        "validate", "run the full self-check battery, nonzero exit on failure");
    cmd_validate->add_option("--tolerance", val_tol,
                             "closed-form vs direct-solve tolerance");
    cmd_validate->add_option("--criterion", val_criterion,
                             "run a single criterion (1-7), 0 = all")
        ->check(CLI::Range(0, 7));

    bool preset_list = false;
    std::string preset_show;
    auto* cmd_preset = app.add_subcommand("preset", "built-in parameter sets");
    cmd_preset->add_flag("--list", preset_list, "list preset names");
    cmd_preset->add_option("--show", preset_show,
                           "print one preset as a JSON parameter file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_spectrum->parsed()) {
            const SystemParams p = resolve_params(spec_src);
            warn_regime(p);
            const auto grid =
                default_grid(p, spec_points, spec_range[0], spec_range[1]);
            const Spectrum spec =
                spectrum(p, grid, {.threads = spec_threads});
            return with_output(spec_out, [&](std::ostream& os) {
                write_spectrum_csv(os, spec, csv_digits());
            });
        }
        if (cmd_windows->parsed()) {
            const SystemParams p = resolve_params(win_src);
            warn_regime(p);
            const auto grid =
                default_grid(p, win_points, win_range[0], win_range[1]);
            const WindowReport rep =
                detect_windows(spectrum(p, grid), win_prominence);
            return with_output(win_out, [&](std::ostream& os) {
                os << window_report_json(rep, p.omega_m);
            });
        }
        if (cmd_delay->parsed()) {
            const SystemParams p = resolve_params(delay_src);
            if (delay_powers.empty()) delay_powers = default_power_grid(p);
            const double eval_delta =
                delay_two_omega_m ? 2.0 * p.omega_m
                                  : p.omega_m + mhz_to_rad(delay_dbar_mhz);
            const DelayCurve curve =
                delay_vs_power(p, delay_powers, eval_delta);
            return with_output(delay_out, [&](std::ostream& os) {
                write_delay_csv(os, curve, csv_digits());
            });
        }
        if (cmd_validate->parsed()) {
            ValidationOptions opts;
            opts.closed_form_tol = val_tol;
            const ValidationSummary summary =
                run_validation(opts, val_criterion);
            for (const auto& c : summary.criteria)
                std::printf("criterion %d (%s): %s -- %s\n", c.id,
                            c.name.c_str(), c.pass ? "PASS" : "FAIL",
                            c.detail.c_str());
            return summary.all_pass() ? 0 : 1;
        }
        if (cmd_preset->parsed()) {
            if (preset_list) {
                for (PresetId id : all_presets)
                    std::printf("%s\n", to_string(id));
                return 0;
            }
            if (!preset_show.empty()) {
                const auto id = preset_from_name(preset_show);
                if (!id)
                    throw ConfigError("unknown preset '" + preset_show + "'");
                std::printf("%s\n", serialize_params(preset(*id)).c_str());
                return 0;
            }
            std::cerr << "preset: use --list or --show NAME\n";
            return 2;
        }
    } catch (const SingularityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SteadyStateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IntegrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
