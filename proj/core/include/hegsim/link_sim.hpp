#pragma once

// Monte Carlo event simulation of a two-module HEG link.
//
// Each replication is an independent timeline per wavelength channel:
// batch transport, M rounds of {initialize, sequential time-bin trials},
// Bernoulli heralds. Failed atoms stay in the pool for the next round. With
// two zones the channel runs lock-step slots of length max(t_move, busy):
// one zone runs its HEG rounds while the other is transported. A two-zone
// timeline starts in steady state with the first zone already loaded.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hegsim/mux_model.hpp"

namespace hegsim {

enum class HeraldPolicy {
    pipelined,  // trials continue during the herald wait; the next round waits for the last herald
    blocking,   // every trial waits for its own herald
};

std::string to_string(HeraldPolicy policy);
HeraldPolicy herald_policy_from_string(const std::string& name);

struct StopRule {
    double max_time = 0.05;             // s per channel timeline; 0 disables
    std::uint64_t target_pairs = 0;     // 0 disables
    std::uint64_t max_cycles = 1'000'000;
};

struct SimConfig {
    MuxScenario mux;  // mux.p_trial is ignored; see effective_p_trial()
    double p_e = 0.6324555320336759;  // sqrt(0.4), i.e. p_trial = 0.2
    double eta_link = 1.0;
    double eta_det = 1.0;
    std::optional<double> p_trial_override;
    std::size_t n_channels = 1;
    double t_herald = 0.0;  // s
    HeraldPolicy policy = HeraldPolicy::pipelined;
    std::optional<int> fixed_m;  // empty: the mux-model optimum
    int m_max = 200;
    std::uint64_t seed = 1;
    std::size_t replications = 200;
    StopRule stop;
    bool collect_latency = true;
    unsigned jobs = 1;

    // (eta_link eta_det p_e)^2 / 2 unless overridden.
    double effective_p_trial() const;
    int resolved_m() const;
    // Atoms on channel c; the remainder goes to the lowest channels.
    std::size_t channel_atoms(std::size_t channel) const;
    void validate() const;
};

// Counter-based stream keyed by (seed, replication, channel).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t channel);
    std::uint64_t next();
    double uniform();  // [0, 1)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct CycleRecord {
    std::uint64_t cycle = 0;
    int zone = 0;
    std::uint64_t pool_start = 0;
    std::uint64_t pairs = 0;
    std::uint64_t survivors = 0;
    double start = 0.0;
    double duration = 0.0;
};

struct ChannelTrace {
    std::uint64_t pairs = 0;
    std::uint64_t trials = 0;
    std::uint64_t cycles = 0;
    double elapsed = 0.0;
    double trial_time = 0.0;
    bool capped = false;                 // stopped by max_cycles
    std::vector<double> herald_times;    // capped at `keep_heralds` entries
    std::vector<std::uint64_t> herald_cycles;
    std::vector<double> latencies;       // only when collect_latency
};

using CycleObserver = std::function<void(const CycleRecord&)>;

// One channel of one replication. keep_heralds bounds herald_times.
ChannelTrace simulate_channel(const SimConfig& cfg, std::size_t replication, std::size_t channel,
                              std::size_t keep_heralds = 0, const CycleObserver& observer = {});

struct ReplicationRow {
    std::size_t replication = 0;
    std::uint64_t pairs_total = 0;
    double sim_time = 0.0;  // longest channel timeline
    double rate = 0.0;      // sum over channels of pairs / elapsed
    double p50_latency = 0.0;
};

struct SimReport {
    double empirical_rate = 0.0;
    double rate_stderr = 0.0;
    double pair_latency_p50 = 0.0;
    double pair_latency_p90 = 0.0;
    double pair_latency_p99 = 0.0;
    double channel_utilization = 0.0;
    double trials_per_pair = 0.0;
    std::uint64_t pairs_total = 0;
    std::uint64_t trials_total = 0;
    std::size_t replications = 0;
    int m_used = 0;
    double p_trial = 0.0;
    bool capped = false;
    std::vector<ReplicationRow> per_replication;
};

SimReport run(const SimConfig& cfg);

struct LatencyRow {
    std::uint64_t k = 0;
    std::size_t reached = 0;  // replications that accumulated k pairs
    double p50 = 0.0;         // s; NaN unless every replication reached k
    double p90 = 0.0;
    double p99 = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::uint64_t p50_cycles = 0;
};

// Time to accumulate k pairs, per k, across replications. cfg.stop.max_cycles
// caps each timeline; cfg.stop.max_time is ignored.
std::vector<LatencyRow> latency_profile(const SimConfig& cfg, const std::vector<std::uint64_t>& k_list);

// Nearest-rank percentile of an unsorted sample, q in (0, 1].
double percentile(std::vector<double> sample, double q);

// Expected rate under the mux model for the same schedule, summed over channels.
double analytic_rate(const SimConfig& cfg);

struct ValidationCase {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    double margin = 0.0;  // |empirical - analytic| / stderr
    bool pass = false;
};

// Requires t_herald == 0 and unit efficiencies. Passes when the difference is
// under 3 standard errors, or exact to 1e-9 relative when the standard error
// is itself below that level.
ValidationCase validate_against_analytic(const SimConfig& cfg, std::string name = {});

struct NamedConfig {
    std::string name;
    SimConfig config;
};

// Fast N in {50, 100, 200}, zoned slow N = 200 and a p_trial = 1 case.
std::vector<NamedConfig> standard_validation_suite(std::uint64_t seed, std::size_t replications);
// N in {50, 100, 200} x {fast, slow transport} x {1, 2 zones}.
std::vector<NamedConfig> transport_grid_suite(std::uint64_t seed, std::size_t replications);

}  // namespace hegsim
