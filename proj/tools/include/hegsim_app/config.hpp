#pragma once

// Run configuration: a strict TOML-syntax subset.
//
//   [section]
//   key = 1.5            # numbers, "strings", true/false, [1, 2, 3]
//
// Frequencies are MHz-over-2pi, times are microseconds (or ms where the key
// says so), lengths carry their unit in the key name. Unknown sections or
// keys are errors.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <hegsim/heg_optimizer.hpp>
#include <hegsim/link_sim.hpp>
#include <hegsim/mux_model.hpp>
#include <hegsim/params.hpp>
#include <hegsim/photon_source.hpp>
#include <hegsim/waveguide.hpp>

namespace hegsim::app {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigValue {
    std::variant<double, std::string, bool, std::vector<double>> data;
    bool integer = false;  // scalar number written without fraction or exponent
};

// Parses one TOML value: number, "string", true/false or a one-line list of
// numbers. A bare word is accepted as a string when allow_bare is set.
ConfigValue parse_value(const std::string& text, bool allow_bare = false);

struct CavitySection {
    std::string preset;
    double g_mhz = 5.0;
    double gamma_mhz = 0.25;
    double kappa_in_mhz = 0.25;
};

struct PulseSection {
    double xi_trunc = 5.0;
    double xi_sep = 10.0;
    std::int64_t grid_points = 4096;
    std::vector<double> kappa_ex_mhz{1.0, 5.0, 25.0};  // pe-curve only
};

struct MuxSection {
    std::int64_t n_atoms = 200;
    std::vector<double> n_list;  // mux-rate curve; empty means n_atoms alone
    std::optional<double> p_trial = 0.2;  // empty: p_e*^2 / 2 from the HEG optimum
    double dt_us = 1.0;
    double t_init_us = 20.0;
    double t_move_us = 100.0;
    std::int64_t zones = 1;
    std::int64_t m_max = 200;
};

struct WaveguideSection {
    std::vector<double> L_mm;
    std::vector<double> L_m_mm{1.0, 0.1};
    double wavelength_nm = 1389.0;
    double n_eff = 1.07;
    std::vector<double> loss_db_per_m{0.0, 20.0, 80.0};
    double g0_mhz = 5.0;
    double kappa_fbg0_mhz = 0.25;
    double L0_mm = 1.0;
};

struct SimSection {
    std::uint64_t seed = 1;
    std::int64_t replications = 200;
    double eta_link = 1.0;
    double eta_det = 1.0;
    std::int64_t n_channels = 1;
    double t_herald_us = 0.0;
    std::string policy = "pipelined";
    std::string m = "auto";  // "auto" or a fixed repetition count
    double max_time_ms = 50.0;
    std::int64_t target_pairs = 0;
    std::vector<double> latency_k;
};

struct HegSection {
    std::vector<double> kappa_in_over_g;
    std::int64_t tau_points = 120;
    std::int64_t kappa_ex_points = 120;
};

struct BudgetSection {
    std::vector<double> n{25, 49, 100, 225, 400, 625, 1000};
    double bell_rate_hz = 1e5;
    double transport_coeff_us = 20.0;
    double t_meas_us = 500.0;
};

struct RunConfig {
    CavitySection cavity;
    PulseSection pulse;
    MuxSection mux;
    WaveguideSection waveguide;
    SimSection sim;
    HegSection heg;
    BudgetSection budget;

    std::set<std::string> explicit_keys;  // "section.key" set by file or sweep

    static RunConfig defaults();

    // Assigns one "section.key"; `where` prefixes error messages.
    void set(const std::string& dotted_key, const ConfigValue& value, const std::string& where);
    // Checks cross-key requirements of a file-based config.
    void finalize_file_config(const std::string& path);

    // Resolved model inputs (SI units, rad/s).
    CavityParams cavity_params() const;  // kappa_ex left zero
    PulseSpec pulse_spec(double tau) const;
    MuxScenario mux_scenario(double p_trial) const;
    HegOptions heg_options(unsigned jobs) const;
    WaveguideSpec waveguide_spec() const;
    SimConfig sim_config(double p_trial, unsigned jobs) const;

    // Every key in canonical order with its current value, for metadata.
    std::vector<std::pair<std::string, std::string>> dump() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source_name);

bool is_known_key(const std::string& dotted_key);

}  // namespace hegsim::app
