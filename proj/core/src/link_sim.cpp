#include "hegsim/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "hegsim/errors.hpp"
#include "hegsim/parallel.hpp"

namespace hegsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

MuxScenario analytic_scenario(const SimConfig& cfg) {
    MuxScenario s = cfg.mux;
    s.p_trial = cfg.effective_p_trial();
    return s;
}

}  // namespace

std::string to_string(HeraldPolicy policy) {
    return policy == HeraldPolicy::blocking ? "blocking" : "pipelined";
}

HeraldPolicy herald_policy_from_string(const std::string& name) {
    if (name == "pipelined") return HeraldPolicy::pipelined;
    if (name == "blocking") return HeraldPolicy::blocking;
    throw DomainError("unknown herald policy '" + name + "' (expected pipelined or blocking)");
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t channel)
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (channel * 0xD1B54A32D192ED03ull))) {}

std::uint64_t CounterRng::next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SimConfig::effective_p_trial() const {
    if (p_trial_override) return *p_trial_override;
    const double amplitude = eta_link * eta_det * p_e;
    return amplitude * amplitude / 2.0;
}

int SimConfig::resolved_m() const {
    if (fixed_m) return *fixed_m;
    return optimize_m(analytic_scenario(*this), m_max).m_star;
}

std::size_t SimConfig::channel_atoms(std::size_t channel) const {
    const std::size_t base = mux.n_atoms / n_channels;
    return base + (channel < mux.n_atoms % n_channels ? 1 : 0);
}

void SimConfig::validate() const {
    if (!(p_e >= 0.0 && p_e <= 1.0)) throw DomainError("sim: p_e must lie in [0, 1]");
    if (!(eta_link >= 0.0 && eta_link <= 1.0) || !(eta_det >= 0.0 && eta_det <= 1.0)) {
        throw DomainError("sim: efficiencies must lie in [0, 1]");
    }
    analytic_scenario(*this).validate();
    if (n_channels < 1) throw DomainError("sim: n_channels must be >= 1");
    const std::size_t per_channel_min = mux.zones == 2 ? 2 : 1;
    if (mux.n_atoms < per_channel_min * n_channels) {
        throw DomainError("sim: every channel needs at least one atom per zone");
    }
    if (!(t_herald >= 0.0) || !std::isfinite(t_herald)) throw DomainError("sim: t_herald must be >= 0");
    if (fixed_m && *fixed_m < 1) throw DomainError("sim: fixed M must be >= 1");
    if (m_max < 1) throw DomainError("sim: M_max must be >= 1");
    if (stop.max_cycles < 1) throw DomainError("sim: max_cycles must be >= 1");
}

double analytic_rate(const SimConfig& cfg) {
    cfg.validate();
    const int m = cfg.resolved_m();
    const double p = cfg.effective_p_trial();
    const MuxScenario& s = cfg.mux;
    double total = 0.0;
    for (std::size_t c = 0; c < cfg.n_channels; ++c) {
        const std::size_t atoms = cfg.channel_atoms(c);
        const double n = s.zones == 2 ? static_cast<double>(atoms / 2) : static_cast<double>(atoms);
        const double trials = trials_per_cycle(n, p, m);
        double busy = m * s.t_init + 2.0 * s.dt * trials;
        if (cfg.policy == HeraldPolicy::blocking) {
            busy += cfg.t_herald * trials;
        } else {
            busy += cfg.t_herald * m;
        }
        const double period = s.zones == 2 ? std::max(s.t_move, busy) : s.t_move + busy;
        total += bell_yield(n, p, m) / period;
    }
    return total;
}

ChannelTrace simulate_channel(const SimConfig& cfg, std::size_t replication, std::size_t channel,
                              std::size_t keep_heralds, const CycleObserver& observer) {
    cfg.validate();
    const int m = cfg.resolved_m();
    const double p = cfg.effective_p_trial();
    const MuxScenario& s = cfg.mux;
    const double trial_cost = 2.0 * s.dt;
    const bool blocking = cfg.policy == HeraldPolicy::blocking;
    const std::size_t atoms = cfg.channel_atoms(channel);
    const std::uint64_t pool_size = s.zones == 2 ? atoms / 2 : atoms;

    CounterRng rng(cfg.seed, replication, channel);
    ChannelTrace trace;
    double now = 0.0;

    // M rounds starting at heg_start; returns (pairs, survivors, busy time).
    auto run_heg = [&](double heg_start, std::uint64_t cycle) {
        double t = heg_start;
        std::uint64_t pool = pool_size;
        std::uint64_t pairs = 0;
        for (int round = 0; round < m; ++round) {
            t += s.t_init;
            std::uint64_t successes = 0;
            for (std::uint64_t a = 0; a < pool; ++a) {
                t += trial_cost;
                ++trace.trials;
                trace.trial_time += trial_cost;
                if (rng.uniform() < p) {
                    ++successes;
                    const double herald = t + cfg.t_herald;
                    if (trace.herald_times.size() < keep_heralds) {
                        trace.herald_times.push_back(herald);
                        trace.herald_cycles.push_back(cycle);
                    }
                    if (cfg.collect_latency) trace.latencies.push_back(herald - (heg_start - s.t_move));
                }
                if (blocking) t += cfg.t_herald;
            }
            if (!blocking && pool > 0) t += cfg.t_herald;
            pool -= successes;
            pairs += successes;
        }
        return std::tuple{pairs, pool, t - heg_start};
    };

    for (;;) {
        CycleRecord rec;
        rec.cycle = trace.cycles + 1;
        rec.start = now;
        rec.pool_start = pool_size;
        if (s.zones == 2) {
            rec.zone = static_cast<int>(trace.cycles % 2);
            const auto [pairs, survivors, busy] = run_heg(now, rec.cycle);
            rec.pairs = pairs;
            rec.survivors = survivors;
            rec.duration = std::max(s.t_move, busy);
        } else {
            const auto [pairs, survivors, busy] = run_heg(now + s.t_move, rec.cycle);
            rec.pairs = pairs;
            rec.survivors = survivors;
            rec.duration = s.t_move + busy;
        }
        now += rec.duration;
        trace.pairs += rec.pairs;
        ++trace.cycles;
        if (observer) observer(rec);

        if (cfg.stop.target_pairs > 0 && trace.pairs >= cfg.stop.target_pairs) break;
        if (cfg.stop.max_time > 0.0 && now >= cfg.stop.max_time) break;
        if (trace.cycles >= cfg.stop.max_cycles) {
            trace.capped = true;
            break;
        }
    }
    trace.elapsed = now;
    return trace;
}

double percentile(std::vector<double> sample, double q) {
    if (sample.empty()) return kNaN;
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("percentile requires q in (0, 1]");
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sample.size())));
    const std::size_t idx = std::max<std::size_t>(rank, 1) - 1;
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(idx), sample.end());
    return sample[idx];
}

SimReport run(const SimConfig& cfg) {
    cfg.validate();
    if (cfg.replications < 2) throw DomainError("standard errors need at least 2 replications");
    if (cfg.stop.max_time <= 0.0 && cfg.stop.target_pairs == 0) {
        throw DomainError("simulation needs a max_time or a target pair count");
    }

    SimConfig resolved = cfg;
    resolved.fixed_m = cfg.resolved_m();
    const std::size_t reps = cfg.replications;
    const std::size_t channels = cfg.n_channels;

    std::vector<ChannelTrace> traces(reps * channels);
    parallel_for(reps, cfg.jobs, [&](std::size_t r) {
        for (std::size_t c = 0; c < channels; ++c) traces[r * channels + c] = simulate_channel(resolved, r, c);
    });

    SimReport rep;
    rep.replications = reps;
    rep.m_used = *resolved.fixed_m;
    rep.p_trial = cfg.effective_p_trial();

    // Pooled ratio estimator per channel; channels are independent.
    double variance = 0.0;
    double elapsed_total = 0.0;
    double trial_time_total = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
        double pairs = 0.0, elapsed = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            pairs += static_cast<double>(traces[r * channels + c].pairs);
            elapsed += traces[r * channels + c].elapsed;
        }
        const double rate = pairs / elapsed;
        double ss = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const ChannelTrace& t = traces[r * channels + c];
            const double resid = static_cast<double>(t.pairs) - rate * t.elapsed;
            ss += resid * resid;
        }
        const double n = static_cast<double>(reps);
        const double mean_elapsed = elapsed / n;
        variance += ss / (n * (n - 1.0)) / (mean_elapsed * mean_elapsed);
        rep.empirical_rate += rate;
        elapsed_total += elapsed;
    }
    rep.rate_stderr = std::sqrt(variance);

    std::vector<double> latencies;
    rep.per_replication.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        ReplicationRow& row = rep.per_replication[r];
        row.replication = r;
        std::vector<double> rep_latency;
        for (std::size_t c = 0; c < channels; ++c) {
            const ChannelTrace& t = traces[r * channels + c];
            row.pairs_total += t.pairs;
            row.sim_time = std::max(row.sim_time, t.elapsed);
            row.rate += static_cast<double>(t.pairs) / t.elapsed;
            rep.trials_total += t.trials;
            trial_time_total += t.trial_time;
            rep.capped = rep.capped || t.capped;
            rep_latency.insert(rep_latency.end(), t.latencies.begin(), t.latencies.end());
        }
        rep.pairs_total += row.pairs_total;
        row.p50_latency = cfg.collect_latency ? percentile(rep_latency, 0.5) : kNaN;
        latencies.insert(latencies.end(), rep_latency.begin(), rep_latency.end());
    }
    rep.channel_utilization = trial_time_total / elapsed_total;
    rep.trials_per_pair = rep.pairs_total > 0
                              ? static_cast<double>(rep.trials_total) / static_cast<double>(rep.pairs_total)
                              : kNaN;
    if (cfg.collect_latency && !latencies.empty()) {
        std::sort(latencies.begin(), latencies.end());
        auto at = [&](double q) {
            const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(latencies.size())));
            return latencies[std::max<std::size_t>(rank, 1) - 1];
        };
        rep.pair_latency_p50 = at(0.5);
        rep.pair_latency_p90 = at(0.9);
        rep.pair_latency_p99 = at(0.99);
    } else {
        rep.pair_latency_p50 = rep.pair_latency_p90 = rep.pair_latency_p99 = kNaN;
    }
    return rep;
}

std::vector<LatencyRow> latency_profile(const SimConfig& cfg, const std::vector<std::uint64_t>& k_list) {
    cfg.validate();
    const std::uint64_t k_max = k_list.empty() ? 0 : *std::max_element(k_list.begin(), k_list.end());

    SimConfig run_cfg = cfg;
    run_cfg.fixed_m = cfg.resolved_m();
    run_cfg.collect_latency = false;
    run_cfg.stop.max_time = 0.0;
    run_cfg.stop.target_pairs = std::max<std::uint64_t>(k_max, 1);

    struct Arrivals {
        std::vector<std::pair<double, std::uint64_t>> heralds;  // merged, sorted
        double horizon = std::numeric_limits<double>::infinity();  // trusted up to here
    };
    std::vector<Arrivals> per_rep(cfg.replications);
    if (k_max > 0) {
        parallel_for(cfg.replications, cfg.jobs, [&](std::size_t r) {
            Arrivals& a = per_rep[r];
            for (std::size_t c = 0; c < cfg.n_channels; ++c) {
                const ChannelTrace t = simulate_channel(run_cfg, r, c, k_max);
                for (std::size_t i = 0; i < t.herald_times.size(); ++i) {
                    a.heralds.emplace_back(t.herald_times[i], t.herald_cycles[i]);
                }
                if (t.capped) a.horizon = std::min(a.horizon, t.elapsed);
            }
            std::sort(a.heralds.begin(), a.heralds.end());
        });
    }

    std::vector<LatencyRow> rows;
    rows.reserve(k_list.size());
    for (std::uint64_t k : k_list) {
        LatencyRow row;
        row.k = k;
        if (k == 0) {
            row.reached = cfg.replications;
            rows.push_back(row);
            continue;
        }
        std::vector<double> times;
        std::vector<double> cycles;
        for (const Arrivals& a : per_rep) {
            if (a.heralds.size() >= k && a.heralds[k - 1].first <= a.horizon) {
                times.push_back(a.heralds[k - 1].first);
                cycles.push_back(static_cast<double>(a.heralds[k - 1].second));
            }
        }
        row.reached = times.size();
        if (row.reached == cfg.replications) {
            row.p50 = percentile(times, 0.5);
            row.p90 = percentile(times, 0.9);
            row.p99 = percentile(times, 0.99);
            row.p50_cycles = static_cast<std::uint64_t>(percentile(cycles, 0.5));
            const double n = static_cast<double>(times.size());
            row.mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
            double ss = 0.0;
            for (double t : times) ss += (t - row.mean) * (t - row.mean);
            row.stddev = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        } else {
            row.p50 = row.p90 = row.p99 = row.mean = row.stddev = kNaN;
        }
        rows.push_back(row);
    }
    return rows;
}

ValidationCase validate_against_analytic(const SimConfig& cfg, std::string name) {
    if (cfg.t_herald != 0.0 || cfg.eta_link != 1.0 || cfg.eta_det != 1.0) {
        throw DomainError("analytic validation requires t_herald = 0 and unit efficiencies");
    }
    SimConfig run_cfg = cfg;
    run_cfg.collect_latency = false;
    const SimReport rep = run(run_cfg);

    ValidationCase vc;
    vc.name = std::move(name);
    vc.analytic = analytic_rate(cfg);
    vc.empirical = rep.empirical_rate;
    vc.stderr_ = rep.rate_stderr;
    const double diff = std::abs(vc.empirical - vc.analytic);
    // A deterministic schedule leaves only rounding noise in the standard error.
    const double exact_tol = 1e-9 * vc.analytic;
    if (vc.stderr_ > exact_tol) {
        vc.margin = diff / vc.stderr_;
        vc.pass = vc.margin < 3.0;
    } else {
        vc.margin = diff == 0.0 ? 0.0 : diff / std::max(vc.stderr_, exact_tol);
        vc.pass = diff <= exact_tol;
    }
    return vc;
}

namespace {

SimConfig transport_case(std::size_t n, double t_move, int zones, std::uint64_t seed, std::size_t reps) {
    SimConfig cfg;
    cfg.mux = MuxScenario{n, 0.2, 1e-6, 20e-6, t_move, zones};
    cfg.p_trial_override = 0.2;
    cfg.seed = seed;
    cfg.replications = reps;
    cfg.stop.max_time = 0.2;
    cfg.collect_latency = false;
    return cfg;
}

}  // namespace

std::vector<NamedConfig> standard_validation_suite(std::uint64_t seed, std::size_t replications) {
    std::vector<NamedConfig> suite;
    for (std::size_t n : {50, 100, 200}) {
        suite.push_back({"fast_1zone_N" + std::to_string(n), transport_case(n, 100e-6, 1, seed, replications)});
    }
    suite.push_back({"slow_2zone_N200", transport_case(200, 1000e-6, 2, seed, replications)});
    SimConfig certain = transport_case(50, 100e-6, 1, seed, replications);
    certain.p_trial_override = 1.0;
    certain.stop.max_time = 0.02;
    suite.push_back({"certain_herald_N50", certain});
    return suite;
}

std::vector<NamedConfig> transport_grid_suite(std::uint64_t seed, std::size_t replications) {
    std::vector<NamedConfig> suite;
    for (std::size_t n : {50, 100, 200}) {
        for (const auto& [label, t_move] : {std::pair{"fast", 100e-6}, std::pair{"slow", 1000e-6}}) {
            for (int zones : {1, 2}) {
                suite.push_back({std::string(label) + "_" + std::to_string(zones) + "zone_N" + std::to_string(n),
                                 transport_case(n, t_move, zones, seed, replications)});
            }
        }
    }
    return suite;
}

}  // namespace hegsim
