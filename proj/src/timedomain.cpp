#include "multieit/timedomain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <ostream>

#include "csv_util.hpp"

namespace multieit {

namespace {

constexpr Complex I{0.0, 1.0};

double min_positive_rate(std::initializer_list<double> rates) {
    double m = 0.0;
    for (double r : rates)
        if (r > 0.0 && (m == 0.0 || r < m)) m = r;
    return m;
}

struct Derivative {
    double dQ, dP;
    Complex dc, da, db;
};

// Q'' + gamma_m Q' + omega_m^2 Q = g omega_m |c|^2 in first-order form,
// plus the cavity/atom equations in the pump rotating frame
inline Derivative rhs(const SystemParams& p, const MeanFieldState& s,
                      const Complex& drive) {
    Derivative d;
    d.dQ = p.omega_m * s.P;
    d.dP = -p.omega_m * s.Q - p.gamma_m * s.P + p.g * std::norm(s.c);
    d.dc = -Complex(p.kappa, p.Delta_c) * s.c + I * p.g * s.c * s.Q -
           I * p.g1 * s.a + drive;
    d.da = -Complex(p.gamma_1, p.Delta_1) * s.a - I * p.g1 * s.c -
           I * p.g2 * s.b;
    d.db = -Complex(p.gamma_2, p.Delta_2) * s.b - I * p.g2 * s.a;
    return d;
}

inline MeanFieldState advance(const MeanFieldState& s, const Derivative& d,
                              double h) {
    return {s.Q + h * d.dQ, s.P + h * d.dP, s.c + h * d.dc, s.a + h * d.da,
            s.b + h * d.db};
}

} // namespace

IntegrationConfig default_config(const SystemParams& p, double delta,
                                 double eps_p, int samples_per_beat,
                                 double transient_factor,
                                 int n_beat_periods) {
    if (!(delta > 0))
        throw ConfigError("time-domain runs need delta > 0 (beat period)");
    if (samples_per_beat < 4) throw ConfigError("samples_per_beat too small");
    if (n_beat_periods < 50)
        throw ConfigError("n_beat_periods must be >= 50");
    const double gmin = min_positive_rate({p.gamma_m, p.gamma_1, p.gamma_2});
    if (gmin == 0.0)
        throw ConfigError("no damping rate set, trajectory cannot settle");
    const double omega_fast =
        std::max({p.omega_m, std::abs(p.Delta_c), delta});
    // keep dt an exact divisor of the beat period so demodulation windows
    // align with samples; bump the sample count if the fast scale needs it
    int spb = samples_per_beat;
    const double needed = 40.0 * omega_fast / delta;
    if (spb < needed) spb = static_cast<int>(std::ceil(needed));
    IntegrationConfig cfg{};
    cfg.dt = (two_pi / delta) / spb;
    cfg.t_transient = transient_factor / gmin;
    cfg.n_beat_periods = n_beat_periods;
    cfg.delta = delta;
    cfg.eps_p = eps_p;
    return cfg;
}

TimeSeries integrate(const SystemParams& p, double delta, double eps_p,
                     const IntegrationConfig& cfg) {
    validate(p);
    if (!(cfg.dt > 0)) throw ConfigError("dt must be > 0");
    const double omega_fast =
        std::max({p.omega_m, std::abs(p.Delta_c), std::abs(delta)});
    if (omega_fast > 0 && cfg.dt > (two_pi / omega_fast) / 40.0 * (1 + 1e-9))
        throw ConfigError("dt too coarse for the fastest scale");
    const double rate_floor =
        min_positive_rate({p.gamma_m, p.gamma_1, p.gamma_2, p.kappa});
    if (cfg.t_transient < 8.0 / rate_floor * (1 - 1e-9))
        throw ConfigError("t_transient shorter than 8/min(rates)");
    if (cfg.n_beat_periods < 50)
        throw ConfigError("n_beat_periods must be >= 50");

    const std::size_t rec_start =
        static_cast<std::size_t>(std::ceil(cfg.t_transient / cfg.dt - 1e-9));
    const double t_window =
        delta > 0 ? cfg.n_beat_periods * (two_pi / delta) : 0.0;
    const std::size_t n_rec =
        static_cast<std::size_t>(std::ceil(t_window / cfg.dt - 1e-9)) + 1;
    const std::size_t n_steps = rec_start + n_rec - 1;

    const double amp = p.Omega_l + std::abs(eps_p);
    const double n_bound = 4.0 * amp * amp / (p.kappa * p.kappa) + 1e-300;

    TimeSeries series;
    series.dt = cfg.dt;
    series.t_begin = static_cast<double>(rec_start) * cfg.dt;
    series.states.reserve(n_rec);

    MeanFieldState s{};
    const Complex rot_half = std::polar(1.0, -delta * cfg.dt / 2.0);
    const Complex rot_full = std::polar(1.0, -delta * cfg.dt);
    for (std::size_t i = 0;; ++i) {
        if (!(std::norm(s.c) <= n_bound) || !std::isfinite(s.Q) ||
            !std::isfinite(s.P))
            throw IntegrationError("trajectory left the physical bound",
                                   static_cast<double>(i) * cfg.dt, i);
        if (i >= rec_start) series.states.push_back(s);
        if (i == n_steps) break;

        const double t = static_cast<double>(i) * cfg.dt;
        const Complex e0 = eps_p != 0.0 ? std::polar(eps_p, -delta * t)
                                        : Complex{};
        const Complex drive0 = p.Omega_l + e0;
        const Complex drive_h = p.Omega_l + e0 * rot_half;
        const Complex drive_f = p.Omega_l + e0 * rot_full;

        const Derivative k1 = rhs(p, s, drive0);
        const Derivative k2 = rhs(p, advance(s, k1, cfg.dt / 2), drive_h);
        const Derivative k3 = rhs(p, advance(s, k2, cfg.dt / 2), drive_h);
        const Derivative k4 = rhs(p, advance(s, k3, cfg.dt), drive_f);
        const double w = cfg.dt / 6.0;
        s.Q += w * (k1.dQ + 2 * k2.dQ + 2 * k3.dQ + k4.dQ);
        s.P += w * (k1.dP + 2 * k2.dP + 2 * k3.dP + k4.dP);
        s.c += w * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
        s.a += w * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
        s.b += w * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
    }
    return series;
}

DemodResult extract_sidebands(const TimeSeries& series, double delta,
                              double t_start, int n_periods) {
    if (!(delta > 0)) throw ConfigError("demodulation needs delta > 0");
    if (n_periods < 1) throw ConfigError("n_periods must be >= 1");
    if (series.states.size() < 2) throw ConfigError("time series too short");
    const double beat = two_pi / delta;
    const double spb_real = beat / series.dt;
    const long spb = std::lround(spb_real);
    if (spb < 2 || std::abs(spb_real - static_cast<double>(spb)) > 1e-6)
        throw ConfigError(
            "demodulation window is not an integer number of samples per "
            "beat period");
    const double k0_real = (t_start - series.t_begin) / series.dt;
    const long k0 = std::lround(k0_real);
    if (k0 < 0 || std::abs(k0_real - static_cast<double>(k0)) > 1e-6)
        throw ConfigError("t_start does not lie on a sample");
    const long N = static_cast<long>(n_periods) * spb;
    if (k0 + N >= static_cast<long>(series.states.size()))
        throw ConfigError("demodulation window exceeds the series");

    const auto project = [&](long begin, long count) {
        Complex sum_s{}, sum_m{}, sum_p{};
        for (long k = 0; k <= count; ++k) {
            const double t =
                series.t_begin + static_cast<double>(begin + k) * series.dt;
            const Complex c = series.states[begin + k].c;
            const double w = (k == 0 || k == count) ? 0.5 : 1.0;
            const Complex e = std::polar(w, delta * t); // w * e^{+i delta t}
            sum_s += w * c;
            sum_m += c * e;
            sum_p += c * std::conj(e);
        }
        const double inv = 1.0 / static_cast<double>(count);
        return std::array<Complex, 3>{sum_s * inv, sum_m * inv, sum_p * inv};
    };

    DemodResult res{};
    const auto full = project(k0, N);
    res.c_s_est = full[0];
    res.c_minus_est = full[1];
    res.c_plus_est = full[2];
    const int half = n_periods / 2;
    if (half >= 1) {
        const auto first = project(k0, half * spb);
        const auto second = project(k0 + half * spb, half * spb);
        res.drift = std::abs(second[1] - first[1]) /
                    std::max(std::abs(res.c_minus_est), 1e-300);
    }
    res.stationary = res.drift < 1e-3;
    return res;
}

DemodResult demodulate_run(const SystemParams& p, double delta, double eps_p,
                           const IntegrationConfig& cfg) {
    const TimeSeries series = integrate(p, delta, eps_p, cfg);
    return extract_sidebands(series, delta, series.t_begin,
                             cfg.n_beat_periods);
}

LinearizationReport verify_linearization(const SystemParams& p, double delta,
                                         std::span<const double> eps_p_list,
                                         int samples_per_beat,
                                         double transient_factor,
                                         int n_beat_periods) {
    if (eps_p_list.size() < 2)
        throw ConfigError("need at least two probe amplitudes");
    for (double e : eps_p_list)
        if (!(e > 0)) throw ConfigError("probe amplitudes must be > 0");

    LinearizationReport rep{};
    for (double eps : eps_p_list) {
        const auto cfg = default_config(p, delta, eps, samples_per_beat,
                                        transient_factor, n_beat_periods);
        const DemodResult dm = demodulate_run(p, delta, eps, cfg);
        rep.eps_p.push_back(eps);
        rep.ratio.push_back(dm.c_minus_est / eps);
    }
    for (std::size_t i = 0; i < rep.ratio.size(); ++i)
        for (std::size_t j = i + 1; j < rep.ratio.size(); ++j) {
            const double scale =
                std::max(std::abs(rep.ratio[i]), std::abs(rep.ratio[j]));
            if (scale > 0)
                rep.max_spread =
                    std::max(rep.max_spread,
                             std::abs(rep.ratio[i] - rep.ratio[j]) / scale);
        }
    rep.nonlinear_flag = rep.max_spread > 5e-3;
    return rep;
}

void dump_trajectory_csv(std::ostream& os, const TimeSeries& series,
                         int stride) {
    if (stride < 1) throw ConfigError("stride must be >= 1");
    std::string out = "t,Q,P,re_c,im_c,re_a,im_a,re_b,im_b\n";
    for (std::size_t k = 0; k < series.states.size();
         k += static_cast<std::size_t>(stride)) {
        const auto& s = series.states[k];
        detail::append_sig(out, series.t_begin + k * series.dt, 12);
        for (double v : {s.Q, s.P, s.c.real(), s.c.imag(), s.a.real(),
                         s.a.imag(), s.b.real(), s.b.imag()}) {
            out += ',';
            detail::append_sig(out, v, 12);
        }
        out += '\n';
        if (out.size() > (1u << 20)) {
            os << out;
            out.clear();
        }
    }
    os << out;
}

} // namespace multieit
