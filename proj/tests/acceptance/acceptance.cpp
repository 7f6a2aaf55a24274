// One line per acceptance criterion; exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <hegsim/heg_optimizer.hpp>
#include <hegsim/link_sim.hpp>
#include <hegsim/mux_model.hpp>
#include <hegsim/params.hpp>
#include <hegsim/photon_source.hpp>
#include <hegsim/waveguide.hpp>
#include <hegsim_app/commands.hpp>
#include <hegsim_app/config.hpp>

using namespace hegsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "ok   " : "BAD  ") + what);
    }
};

std::string fmt(double x, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

MuxScenario scenario(double t_move, int zones = 1, std::size_t n = 200) {
    return MuxScenario{n, 0.2, 1e-6, 20e-6, t_move, zones};
}

// Round-by-round bookkeeping over every M.
double exhaustive_fraction(const MuxScenario& s) {
    const double n = s.zones == 2 ? std::floor(s.n_atoms / 2.0) : static_cast<double>(s.n_atoms);
    double best = 0.0;
    for (int m = 1; m <= 200; ++m) {
        double pool = n, pairs = 0.0, trials = 0.0;
        for (int i = 0; i < m; ++i) {
            trials += pool;
            pairs += pool * s.p_trial;
            pool *= 1.0 - s.p_trial;
        }
        const double busy = m * s.t_init + 2 * s.dt * trials;
        const double t = s.zones == 2 ? std::max(s.t_move, busy) : s.t_move + busy;
        best = std::max(best, pairs / t);
    }
    return best / (s.p_trial / (2 * s.dt));
}

std::size_t atoms_for_90pct(MuxScenario s) {
    for (std::size_t n = s.zones == 2 ? 2 : 1; n <= 100000; ++n) {
        s.n_atoms = n;
        if (optimize_m(s).rate_fraction >= 0.9) return n;
    }
    return 0;
}

Outcome cooperativity_check() {
    Outcome o;
    const double a = cooperativity(CavityParams::from_mhz(5, 0.25, 0, 0.25));
    const double b = cooperativity(CavityParams::from_mhz(5, 5, 0, 0.25));
    o.require(std::abs(a - 200) <= 1e-12 * 200, "C_in(5, 0.25, 0.25) = " + fmt(a, 17));
    o.require(std::abs(b - 10) <= 1e-12 * 10, "C_in(5, 0.25, 5) = " + fmt(b, 17));
    return o;
}

Outcome fast_case() {
    Outcome o;
    const MuxResult r = optimize_m(scenario(100e-6));
    const double oracle = exhaustive_fraction(scenario(100e-6));
    o.require(std::abs(r.rate_fraction - 0.8705) <= 1e-4, "rate_fraction " + fmt(r.rate_fraction) + " vs 0.8705 +- 1e-4");
    o.require(std::abs(r.rate_fraction - oracle) <= 1e-12, "exhaustive oracle " + fmt(oracle, 12));
    o.require(std::abs(r.rate_fraction - 0.9) <= 0.05, "within 0.05 of 0.9");
    return o;
}

Outcome slow_case() {
    Outcome o;
    const MuxResult r = optimize_m(scenario(1000e-6));
    o.require(r.rate_fraction >= 0.55 && r.rate_fraction <= 0.70,
              "rate_fraction " + fmt(r.rate_fraction) + " in [0.55, 0.70]");
    o.require(std::abs(r.rate_fraction - exhaustive_fraction(scenario(1000e-6))) <= 1e-12, "exhaustive oracle");
    return o;
}

Outcome zoned_case() {
    Outcome o;
    const MuxResult single = optimize_m(scenario(1000e-6));
    const MuxResult zoned = optimize_m(scenario(1000e-6, 2));
    o.require(zoned.rate_fraction >= 0.80, "zoned rate_fraction " + fmt(zoned.rate_fraction) + " >= 0.80");
    const double improvement = zoned.rate / single.rate - 1.0;
    o.require(improvement >= 0.30, "improvement " + fmt(improvement) + " >= 0.30");
    const std::size_t n1 = atoms_for_90pct(scenario(1000e-6));
    const std::size_t n2 = atoms_for_90pct(scenario(1000e-6, 2));
    o.require(n1 > 0 && n2 > 0 && static_cast<double>(n1) / static_cast<double>(n2) >= 3.0,
              "N for 90%: single " + std::to_string(n1) + ", zoned " + std::to_string(n2));
    return o;
}

Outcome photon_oracle() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int draws = 0;
    double worst_mismatch = 0.0, worst_pe = 0.0, worst_closure = 0.0;
    for (int attempt = 0; attempt < 500 && draws < 25; ++attempt) {
        CavityParams c = CavityParams::from_mhz(2 + 8 * u(rng), 0.05 + 5 * u(rng), 1 + 30 * u(rng), 0.1 + 0.9 * u(rng));
        const PulseSpec spec{(10 + 30 * u(rng)) * critical_pulse_width(c), 5.0, 4096};
        const PulseSolution s = solve_pulse(c, spec);
        if (!s.feasible) continue;
        ++draws;
        const ForwardResult f = forward_oracle(c, s.omega, spec);
        worst_mismatch = std::max(worst_mismatch, wavepacket_mismatch(f, s.p_e, spec));
        worst_pe = std::max(worst_pe, std::abs(f.p_e - s.p_e));
        worst_closure = std::max(worst_closure, std::abs(s.closure_residual()));
    }
    o.require(draws >= 20, std::to_string(draws) + " feasible draws");
    o.require(worst_mismatch < 1e-3, "max L2 mismatch " + fmt(worst_mismatch));
    o.require(worst_pe < 1e-4, "max |p_e forward - p_e| " + fmt(worst_pe));
    o.require(worst_closure < 1e-6, "max closure residual " + fmt(worst_closure));

    struct Limit {
        double kappa_in, kappa_ex;
    };
    for (const Limit& l : {Limit{0.0, 5.0}, Limit{0.25, 5.0}, Limit{0.25, 1.0}, Limit{1.0, 20.0}}) {
        const CavityParams c = CavityParams::from_mhz(5, l.kappa_in, l.kappa_ex, 0.25);
        const double coop = c.g * c.g / (c.kappa() * c.gamma);
        const double expect = c.kappa_ex / c.kappa() * 2 * coop / (2 * coop + 1);
        const PulseSpec spec{1e3 / c.g, 5.0, 65536};
        const PulseSolution s = solve_pulse(c, spec);
        const ForwardResult f = forward_oracle(c, s.omega, spec);
        const std::string tag = "(kin, kex) = (" + fmt(l.kappa_in) + ", " + fmt(l.kappa_ex) + ") MHz: ";
        o.require(s.feasible && std::abs(s.p_e - expect) < 1e-6,
                  tag + "p_e " + fmt(s.p_e, 10) + " vs " + fmt(expect, 10));
        o.require(std::abs(f.p_e - expect) < 1e-6, tag + "forward p_e " + fmt(f.p_e, 10));
    }
    return o;
}

Outcome optimizer_scalings() {
    Outcome o;
    const double g = mhz_over_2pi(5), gamma = mhz_over_2pi(0.25);
    const auto ratios = log_space(1e-2, 1e1, 13);
    const auto rows = scaling_scan(ratios, g, gamma);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double kin = ratios[i] * g;
        const std::string tag = "kappa_in/g=" + fmt(ratios[i], 4) + ": ";
        if (!rows[i].optimum) {
            o.require(false, tag + rows[i].error);
            continue;
        }
        const HegOptimum& h = *rows[i].optimum;
        const double k_ratio = h.kappa_ex_star / (g + kin);
        o.require(k_ratio >= 0.5 && k_ratio <= 2.0, tag + "kappa_ex*/(g+kappa_in) = " + fmt(k_ratio, 4));
        if (kin < g) {
            const double t_rad = h.tau_star * g;
            const double t_cyc = h.tau_star * g / kTwoPi;
            const bool in_band = (t_rad >= 1.0 / 3 && t_rad <= 3) || (t_cyc >= 1.0 / 3 && t_cyc <= 3);
            o.require(in_band, tag + "tau* g = " + fmt(t_rad, 4));
        }
        const double c_in = g * g / (2 * gamma * kin);
        if (c_in >= 100) {
            o.require(h.rate_bound >= 1e6 && h.rate_bound <= 20e6, tag + "rate_bound = " + fmt(h.rate_bound / 1e6, 4) + " MHz");
        }
    }
    return o;
}

Outcome length_scan_check() {
    Outcome o;
    const app::RunConfig cfg = app::RunConfig::defaults();
    const app::Table t = app::run_point("length-scan", cfg, 1).main;
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin());
    };
    auto num = [](const app::Cell& c) {
        if (const auto* d = std::get_if<double>(&c)) return *d;
        return static_cast<double>(std::get<std::int64_t>(c));
    };
    const std::size_t c_label = col("L_m_label"), c_alpha = col("alpha_db_per_m"), c_len = col("L_m_"),
                      c_rate = col("rate_hz"), c_bound = col("bound_hz"), c_g = col("g_rad_s"),
                      c_kin = col("kappa_in_rad_s");
    const double gamma = cfg.cavity_params().gamma;

    struct Key {
        std::string label;
        double length;
        bool operator<(const Key& k) const { return label != k.label ? label < k.label : length < k.length; }
    };
    std::map<Key, std::map<double, double>> rate_by_alpha;
    std::map<std::string, std::vector<std::pair<double, double>>> lossless;  // (rate, bound) per label
    std::vector<double> lossless_coop;
    bool all_finite = true;
    for (const auto& row : t.rows) {
        const std::string label = std::get<std::string>(row[c_label]);
        const double alpha = num(row[c_alpha]), len = num(row[c_len]), rate = num(row[c_rate]);
        all_finite = all_finite && std::isfinite(rate);
        rate_by_alpha[{label, len}][alpha] = rate;
        if (alpha == 0.0) {
            lossless[label].emplace_back(rate, num(row[c_bound]));
            const double g = num(row[c_g]), kin = num(row[c_kin]);
            lossless_coop.push_back(g * g / (2 * gamma * kin));
        }
    }
    o.require(all_finite, "every row has a finite rate");

    bool ordered = true;
    for (const auto& [key, by_alpha] : rate_by_alpha) {
        double prev = INFINITY;
        for (const auto& [alpha, rate] : by_alpha) {
            if (rate > prev) ordered = false;
            prev = rate;
        }
    }
    o.require(ordered, "rates ordered 0 >= 20 >= 80 dB/m at every L");

    const double c0 = lossless_coop.front();
    double spread = 0.0;
    for (double c : lossless_coop) spread = std::max(spread, std::abs(c / c0 - 1));
    o.require(spread <= 1e-12, "lossless cooperativity relative spread " + fmt(spread));

    WaveguideSpec w;
    w.length = 2e-3;
    w.mirror_overhead = cfg.waveguide.L_m_mm.front() * 1e-3;
    w.wavelength = cfg.waveguide.wavelength_nm * 1e-9;
    w.n_eff = cfg.waveguide.n_eff;
    const std::size_t cap = atom_capacity(w);
    o.require(cap == 256, "capacity at L = 2 mm: " + std::to_string(cap));

    for (const auto& [label, pts] : lossless) {
        bool rising = true;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i].first / pts[i].second < pts[i - 1].first / pts[i - 1].second) rising = false;
        }
        const double last = pts.back().first / pts.back().second;
        o.require(rising, label + ": lossless rate/bound rises monotonically to " + fmt(last, 4));
    }
    return o;
}

Outcome simulator_validation() {
    Outcome o;
    for (const auto& named : transport_grid_suite(1, 200)) {
        const ValidationCase v = validate_against_analytic(named.config, named.name);
        o.require(v.pass, named.name + ": analytic " + fmt(v.analytic, 8) + " Hz, empirical " + fmt(v.empirical, 8) +
                              " +- " + fmt(v.stderr_, 3) + " (" + fmt(v.margin, 3) + " sigma)");
    }
    return o;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "hegsim_acceptance";
    fs::create_directories(dir);
    const std::vector<std::string> commands{
        "pe-curve", "heg-opt", "mux-rate", "zone-compare", "length-scan", "budget", "simulate", "validate",
        "validate --suite grid", "mux-rate --sweep mux.n_atoms=50,100,200 --sweep mux.t_move_us=100,1000 --sweep mux.zones=1,2",
        "simulate --format csv --sweep mux.n_atoms=50,200 --sweep sim.seed=1,2,3"};
    int id = 0;
    for (const auto& cmd : commands) {
        ++id;
        std::vector<std::string> outputs;
        std::vector<int> codes;
        for (const char* jobs : {"1", "1", "2", "4"}) {
            const fs::path out = dir / ("run" + std::to_string(id) + "_" + std::to_string(outputs.size()) + ".out");
            const std::string line = std::string("\"") + HEGSIM_CLI_PATH + "\" " + cmd + " --jobs " + jobs + " > \"" +
                                     out.string() + "\" 2> /dev/null";
            const int status = std::system(line.c_str());
            codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
            outputs.push_back(read_file(out));
        }
        bool same = !outputs[0].empty();
        for (std::size_t i = 1; i < outputs.size(); ++i) same = same && outputs[i] == outputs[0] && codes[i] == codes[0];
        const bool ran = codes[0] == 0 || codes[0] == 4;
        o.require(same && ran, cmd + " (exit " + std::to_string(codes[0]) + ", " +
                                   std::to_string(outputs[0].size()) + " bytes)");
    }
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {"cooperativity", cooperativity_check},
        {"mux fast transport", fast_case},
        {"mux slow transport", slow_case},
        {"mux zoned slow transport", zoned_case},
        {"photon source oracle", photon_oracle},
        {"optimizer scalings", optimizer_scalings},
        {"length scan", length_scan_check},
        {"simulator validation", simulator_validation},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(secs, 3) << " s)\n";
        for (const auto& n : o.notes) std::cout << "       " << n << "\n";
        std::cout.flush();
        if (!o.pass) ++failed;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
