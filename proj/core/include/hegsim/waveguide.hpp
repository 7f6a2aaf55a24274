#pragma once

// Length scaling of a waveguide (nanofiber FBG) cavity and the resulting
// time-multiplexed rate curves.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hegsim/heg_optimizer.hpp"
#include "hegsim/mux_model.hpp"
#include "hegsim/params.hpp"

namespace hegsim {

// Reference point for g ~ 1/sqrt(L) and kappa_fbg ~ 1/L.
struct LengthAnchor {
    double length = 1e-3;                    // m
    double g = mhz_over_2pi(5.0);            // rad/s at `length`
    double kappa_fbg = mhz_over_2pi(0.25);   // rad/s at `length`
};

struct WaveguideSpec {
    double length = 2e-3;            // m
    double mirror_overhead = 1e-3;   // m
    double wavelength = 1.389e-6;    // m
    double n_eff = 1.07;
    double alpha_db_per_m = 0.0;
    double fbg_loss = 3e-4;          // per mirror bounce
    LengthAnchor anchor;

    void validate() const;
    // Tweezer separation 3 lambda / n_eff.
    double tweezer_pitch() const { return 3.0 * wavelength / n_eff; }
};

// floor((L - L_m) / dL), 0 when L <= L_m.
std::size_t atom_capacity(const WaveguideSpec& w);

// Length-independent distributed loss rate (c / n_eff) * alpha.
double propagation_kappa(const WaveguideSpec& w);

// Mirror loss rate from a per-bounce loss at cavity length L: two bounces per
// round trip of duration 2 n_eff L / c.
double fbg_kappa(double fbg_loss, double length, double n_eff);

// g(L) = g0 sqrt(L0 / L), kappa_in(L) = kappa_fbg0 (L0 / L) + kappa_prop.
// kappa_ex is left zero for the optimizer; gamma is passed through.
CavityParams params_at_length(const WaveguideSpec& w, double gamma);

struct LengthScanRow {
    std::string mirror_label;
    double alpha_db_per_m = 0.0;
    double length = 0.0;
    std::size_t n_atoms = 0;
    double g = 0.0;
    double kappa_in = 0.0;
    double tau_star = 0.0;
    double p_e_star = 0.0;
    double rate = 0.0;   // optimized multiplexed rate
    double bound = 0.0;  // p_e^2 / (4 dt)
    int m_star = 0;
    std::string error;   // non-empty when the row's optimizer failed
};

struct LengthScanRequest {
    WaveguideSpec templ;
    std::vector<double> lengths;          // m
    std::vector<double> losses_db_per_m;
    std::vector<double> mirror_overheads; // m; empty means templ.mirror_overhead
    double gamma = mhz_over_2pi(0.25);
    MuxScenario mux;                      // n_atoms, p_trial, dt are overwritten per row
    int m_max = 200;
    HegOptions heg;
    unsigned jobs = 1;
};

// Rows ordered by mirror overhead, then loss, then length.
std::vector<LengthScanRow> length_scan(const LengthScanRequest& request);

// n independent wavelength channels.
double channel_multiplier(std::size_t n_channels, double base_rate);

// "1mm", "100um", ... for a length in metres.
std::string length_label(double metres);

}  // namespace hegsim
