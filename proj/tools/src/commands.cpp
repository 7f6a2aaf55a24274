#include "hegsim_app/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <hegsim/errors.hpp>
#include <hegsim/parallel.hpp>

#include "hegsim_app/sweep.hpp"
#include "hegsim_app/version.hpp"

namespace hegsim::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxAtomsSearched = 100'000;

Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

Table pe_curve(const RunConfig& cfg, unsigned jobs) {
    CavityParams cavity = cfg.cavity_params();
    const auto taus = default_grid(cavity.g, cavity.kappa_in, cfg.heg_options(jobs)).tau;
    const auto& kexs = cfg.pulse.kappa_ex_mhz;
    std::vector<PulseProbe> probes(kexs.size() * taus.size());
    parallel_for(probes.size(), jobs, [&](std::size_t i) {
        CavityParams c = cavity;
        c.kappa_ex = mhz_over_2pi(kexs[i / taus.size()]);
        probes[i] = probe_pulse(c, cfg.pulse_spec(taus[i % taus.size()]));
    });
    Table t;
    t.columns = {"tau_s", "kappa_ex_rad_s", "p_e", "feasible", "loss_cavity", "loss_atom"};
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const PulseProbe& p = probes[i];
        t.add_row({taus[i % taus.size()], mhz_over_2pi(kexs[i / taus.size()]), p.p_e, p.feasible, p.loss_cavity,
                   p.loss_atom});
    }
    return t;
}

Table heg_opt(const RunConfig& cfg, unsigned jobs) {
    const CavityParams cavity = cfg.cavity_params();
    const auto rows = scaling_scan(cfg.heg.kappa_in_over_g, cavity.g, cavity.gamma, cfg.heg_options(jobs));
    Table t;
    t.columns = {"kappa_in_over_g", "tau_star_s", "kappa_ex_star_rad_s", "p_e_star", "rate_bound_hz", "boundary_flag"};
    for (const auto& r : rows) {
        if (r.optimum) {
            const HegOptimum& o = *r.optimum;
            t.add_row({r.kappa_in_over_g, o.tau_star, o.kappa_ex_star, o.p_e_star, o.rate_bound, o.boundary_flag});
        } else {
            t.add_row({r.kappa_in_over_g, kNaN, kNaN, kNaN, kNaN, false});
        }
    }
    return t;
}

Table mux_rate(const RunConfig& cfg, double p_trial) {
    std::vector<std::size_t> ns;
    for (double n : cfg.mux.n_list) ns.push_back(static_cast<std::size_t>(n));
    if (ns.empty()) ns.push_back(static_cast<std::size_t>(cfg.mux.n_atoms));
    const auto rows = mux_curve(cfg.mux_scenario(p_trial), ns, static_cast<int>(cfg.mux.m_max));
    Table t;
    t.columns = {"n_atoms", "zones", "m_star", "pairs_per_cycle", "cycle_time_s", "rate_hz", "rate_fraction"};
    for (const auto& r : rows) {
        t.add_row({count(r.n_atoms), std::int64_t{r.zones}, std::int64_t{r.result.m_star}, r.result.pairs_per_cycle,
                   r.result.cycle_time, r.result.rate, r.result.rate_fraction});
    }
    return t;
}

// Smallest N whose optimized rate reaches `fraction` of the bound; 0 if none
// up to kMaxAtomsSearched.
std::size_t atoms_for_fraction(MuxScenario s, int m_max, double fraction) {
    for (std::size_t n = s.zones == 2 ? 2 : 1; n <= kMaxAtomsSearched; ++n) {
        s.n_atoms = n;
        if (optimize_m(s, m_max).rate_fraction >= fraction) return n;
    }
    return 0;
}

Table zone_compare(const RunConfig& cfg, double p_trial) {
    Table t;
    t.columns = {"n_atoms", "zones", "m_star", "cycle_time_s", "rate_hz", "rate_fraction", "improvement", "n_for_90pct"};
    const int m_max = static_cast<int>(cfg.mux.m_max);
    double single_rate = 0.0;
    for (int zones : {1, 2}) {
        MuxScenario s = cfg.mux_scenario(p_trial);
        s.zones = zones;
        const MuxResult r = optimize_m(s, m_max);
        if (zones == 1) single_rate = r.rate;
        t.add_row({count(s.n_atoms), std::int64_t{zones}, std::int64_t{r.m_star}, r.cycle_time, r.rate,
                   r.rate_fraction, r.rate / single_rate - 1.0, count(atoms_for_fraction(s, m_max, 0.9))});
    }
    return t;
}

Table length_scan_table(const RunConfig& cfg, double p_trial, unsigned jobs) {
    LengthScanRequest req;
    req.templ = cfg.waveguide_spec();
    for (double mm : cfg.waveguide.L_mm) req.lengths.push_back(mm * 1e-3);
    req.losses_db_per_m = cfg.waveguide.loss_db_per_m;
    for (double mm : cfg.waveguide.L_m_mm) req.mirror_overheads.push_back(mm * 1e-3);
    req.gamma = cfg.cavity_params().gamma;
    req.mux = cfg.mux_scenario(p_trial);
    req.m_max = static_cast<int>(cfg.mux.m_max);
    req.heg = cfg.heg_options(1);
    req.jobs = jobs;
    Table t;
    t.columns = {"L_m_label", "alpha_db_per_m", "L_m_", "n_atoms", "g_rad_s", "kappa_in_rad_s",
                 "tau_star_s", "p_e_star", "rate_hz", "bound_hz"};
    for (const auto& r : length_scan(req)) {
        const bool ok = r.error.empty();
        t.add_row({r.mirror_label, r.alpha_db_per_m, r.length, count(r.n_atoms), r.g, r.kappa_in,
                   ok ? r.tau_star : kNaN, ok ? r.p_e_star : kNaN, ok ? r.rate : kNaN, ok ? r.bound : kNaN});
    }
    return t;
}

Table budget(const RunConfig& cfg) {
    const auto rows = budget_curves(cfg.budget.n, cfg.budget.bell_rate_hz, cfg.budget.transport_coeff_us * 1e-6,
                                    cfg.budget.t_meas_us * 1e-6);
    Table t;
    t.columns = {"n", "t_entangle_s", "t_transport_s", "t_measure_s"};
    for (const auto& r : rows) t.add_row({r.n, r.t_entangle, r.t_transport, r.t_measure});
    return t;
}

PointOutput simulate(const RunConfig& cfg, double p_trial, unsigned jobs) {
    const SimConfig sim = cfg.sim_config(p_trial, jobs);
    const SimReport rep = run(sim);
    PointOutput out;
    out.main.columns = {"empirical_rate_hz", "rate_stderr_hz", "analytic_rate_hz", "pair_latency_p50_s",
                        "pair_latency_p90_s", "pair_latency_p99_s", "channel_utilization", "trials_per_pair",
                        "pairs_total", "trials_total", "replications", "m_used", "p_trial", "capped"};
    out.main.add_row({rep.empirical_rate, rep.rate_stderr, analytic_rate(sim), rep.pair_latency_p50,
                      rep.pair_latency_p90, rep.pair_latency_p99, rep.channel_utilization, rep.trials_per_pair,
                      static_cast<std::int64_t>(rep.pairs_total), static_cast<std::int64_t>(rep.trials_total),
                      count(rep.replications), std::int64_t{rep.m_used}, rep.p_trial, rep.capped});

    out.per_replication.columns = {"replication", "pairs_total", "sim_time_s", "rate_hz", "p50_latency_s"};
    for (const auto& r : rep.per_replication) {
        out.per_replication.add_row({count(r.replication), static_cast<std::int64_t>(r.pairs_total), r.sim_time,
                                     r.rate, r.p50_latency});
    }

    out.latency.columns = {"k", "reached", "p50_s", "p90_s", "p99_s", "mean_s", "stddev_s", "p50_cycles"};
    if (!cfg.sim.latency_k.empty()) {
        std::vector<std::uint64_t> ks;
        for (double k : cfg.sim.latency_k) ks.push_back(static_cast<std::uint64_t>(k));
        for (const auto& r : latency_profile(sim, ks)) {
            out.latency.add_row({static_cast<std::int64_t>(r.k), count(r.reached), r.p50, r.p90, r.p99, r.mean,
                                 r.stddev, static_cast<std::int64_t>(r.p50_cycles)});
        }
    }
    return out;
}

PointOutput validate(const RunConfig& cfg, unsigned jobs, const std::string& suite_name) {
    const std::size_t reps = static_cast<std::size_t>(cfg.sim.replications);
    std::vector<NamedConfig> suite;
    if (suite_name.empty() || suite_name == "standard") {
        suite = standard_validation_suite(cfg.sim.seed, reps);
    } else if (suite_name == "grid") {
        suite = transport_grid_suite(cfg.sim.seed, reps);
    } else {
        throw ConfigError("unknown validation suite '" + suite_name + "'");
    }
    PointOutput out;
    out.main.columns = {"case", "analytic_hz", "empirical_hz", "stderr_hz", "margin_sigma", "pass"};
    for (auto& named : suite) {
        named.config.jobs = jobs;
        const ValidationCase c = validate_against_analytic(named.config, named.name);
        out.main.add_row({c.name, c.analytic, c.empirical, c.stderr_, c.margin, c.pass});
        out.failed = out.failed || !c.pass;
    }
    return out;
}

void write_table(const Table& table, const std::string& format, const std::string& path, std::ostream& fallback) {
    std::ostringstream buf;
    if (format == "json") {
        write_json(buf, table);
    } else {
        write_csv(buf, table);
    }
    if (path.empty() || path == "-") {
        fallback << buf.str();
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::ios_base::failure("cannot open output file " + path);
    file << buf.str();
    file.flush();
    if (!file) throw std::ios_base::failure("write failed for " + path);
}

Cell axis_cell(const ConfigValue& v) {
    if (const auto* d = std::get_if<double>(&v.data)) {
        if (v.integer) return static_cast<std::int64_t>(*d);
        return *d;
    }
    if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
    if (const auto* b = std::get_if<bool>(&v.data)) return *b;
    return std::string("list");
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"pe-curve", "heg-opt",  "mux-rate", "zone-compare",
                                                "length-scan", "budget", "simulate", "validate"};
    return names;
}

double resolve_p_trial(const RunConfig& cfg, unsigned jobs) {
    if (cfg.mux.p_trial) return *cfg.mux.p_trial;
    const CavityParams c = cfg.cavity_params();
    const HegOptimum o = optimize(c.g, c.kappa_in, c.gamma, cfg.heg_options(jobs));
    return o.p_e_star * o.p_e_star / 2.0;
}

PointOutput run_point(const std::string& name, const RunConfig& cfg, unsigned jobs, const std::string& option) {
    PointOutput out;
    if (name == "pe-curve") {
        out.main = pe_curve(cfg, jobs);
    } else if (name == "heg-opt") {
        out.main = heg_opt(cfg, jobs);
    } else if (name == "mux-rate") {
        out.main = mux_rate(cfg, resolve_p_trial(cfg, jobs));
    } else if (name == "zone-compare") {
        out.main = zone_compare(cfg, resolve_p_trial(cfg, jobs));
    } else if (name == "length-scan") {
        // Per-row p_trial comes from each row's own optimum.
        out.main = length_scan_table(cfg, cfg.mux.p_trial.value_or(0.2), jobs);
    } else if (name == "budget") {
        out.main = budget(cfg);
    } else if (name == "simulate") {
        out = simulate(cfg, resolve_p_trial(cfg, jobs), jobs);
    } else if (name == "validate") {
        out = validate(cfg, jobs, option);
    } else {
        throw ConfigError("unknown subcommand '" + name + "'");
    }
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heralded entanglement generation rate models and link simulator", "hegsim"};
    std::string subcommand;
    std::string config_path;
    std::string out_path = "-";
    std::string format;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::vector<std::string> sweeps;
    std::string per_replication_path;
    std::string latency_path;
    std::string suite = "standard";

    app.add_option("subcommand", subcommand, "One of " + [] {
        std::string s;
        for (const auto& n : subcommand_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }())->required()->check(CLI::IsMember(subcommand_names()));
    app.add_option("--config", config_path, "TOML config file");
    app.add_option("--out", out_path, "Output path, '-' for stdout");
    app.add_option("--format", format, "csv or json (simulate defaults to json)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "Overrides sim.seed");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--sweep", sweeps, "section.key=v1,v2,... (repeatable; first axis slowest)");
    app.add_option("--per-replication", per_replication_path, "simulate: per-replication CSV path");
    app.add_option("--latency-out", latency_path, "simulate: latency profile CSV path (uses sim.latency_k)");
    app.add_option("--suite", suite, "validate: standard or grid")->check(CLI::IsMember({"standard", "grid"}));
    app.set_version_flag("--version", std::string(kVersion));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "hegsim: " << e.what() << "\n";
        return kExitConfig;
    }
    if (format.empty()) format = subcommand == "simulate" ? "json" : "csv";

    try {
        RunConfig base = config_path.empty() ? RunConfig::defaults() : load_config(config_path);
        if (seed) {
            ConfigValue v;
            v.data = static_cast<double>(*seed);
            v.integer = true;
            if (*seed > (std::uint64_t{1} << 53)) throw ConfigError("--seed: value above 2^53");
            base.set("sim.seed", v, "--seed");
        }
        std::vector<SweepAxis> axes;
        for (const auto& s : sweeps) axes.push_back(parse_sweep_axis(s));
        const Sweep sweep(base, axes);

        std::vector<PointOutput> results(sweep.size());
        const unsigned outer = sweep.size() > 1 ? jobs : 1;
        const unsigned inner = sweep.size() > 1 ? 1 : jobs;
        parallel_for(sweep.size(), outer, [&](std::size_t i) {
            results[i] = run_point(subcommand, sweep.point(i).config, inner, suite);
        });

        std::vector<std::string> axis_names;
        for (const auto& a : axes) axis_names.push_back(a.key);
        PointOutput merged;
        bool failed = false;
        for (std::size_t i = 0; i < results.size(); ++i) {
            PointOutput& r = results[i];
            if (!axes.empty()) {
                std::vector<Cell> values;
                for (const auto& v : sweep.point(i).values) values.push_back(axis_cell(v));
                r.main.prepend_columns(axis_names, values);
                r.per_replication.prepend_columns(axis_names, values);
                r.latency.prepend_columns(axis_names, values);
            }
            if (i == 0) {
                merged = std::move(r);
            } else {
                merged.main.append(r.main);
                merged.per_replication.append(r.per_replication);
                merged.latency.append(r.latency);
            }
            failed = failed || results[i].failed || merged.failed;
        }

        std::vector<std::pair<std::string, std::string>> meta{{"hegsim_version", std::string(kVersion)},
                                                             {"subcommand", subcommand}};
        if (subcommand == "validate") meta.emplace_back("suite", suite);
        for (const auto& a : axes) {
            std::string values;
            for (const auto& v : a.values) values += (values.empty() ? "" : ",") + v;
            meta.emplace_back("sweep." + a.key, values);
        }
        for (auto& kv : base.dump()) meta.push_back(std::move(kv));
        merged.main.metadata = meta;
        merged.per_replication.metadata = meta;
        merged.latency.metadata = meta;

        write_table(merged.main, format, out_path, out);
        if (!per_replication_path.empty()) write_table(merged.per_replication, "csv", per_replication_path, out);
        if (!latency_path.empty()) write_table(merged.latency, "csv", latency_path, out);
        if (failed) {
            err << "hegsim: validation failed for at least one case\n";
            return kExitValidationFailed;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "hegsim: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "hegsim: invalid parameters: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        err << "hegsim: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "hegsim: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace hegsim::app
