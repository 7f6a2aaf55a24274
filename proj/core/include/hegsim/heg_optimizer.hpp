#pragma once

// Maximizes the HEG rate bound p_e^2 / (2 tau) over pulse width tau and
// external coupling kappa_ex for fixed (g, kappa_in, gamma), restricted to
// pulses that solve_pulse can realize.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hegsim {

struct HegOptions {
    std::size_t tau_points = 120;
    std::size_t kappa_ex_points = 120;
    double xi_sep = 10.0;    // pulse separation dt = xi_sep * tau
    double trunc_xi = 5.0;   // pulse truncation window
    std::size_t search_grid_points = 1024;
    std::size_t final_grid_points = 4096;
    bool refine = true;
    unsigned jobs = 1;
};

struct SearchGrid {
    std::vector<double> tau;       // s, ascending
    std::vector<double> kappa_ex;  // rad/s, ascending
};

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

// tau in [1e-2, 1e3] / (kappa_in + g), kappa_ex in [1e-2, 1e2] * g.
SearchGrid default_grid(double g, double kappa_in, const HegOptions& options = {});
// For kappa_in >> g: with k = kappa_in + g, tau from 1e-2 / k up to
// 1e3 max(1/k, k / g^2) and kappa_ex in [1e-2, 1e2] k. Same point counts.
SearchGrid covering_grid(double g, double kappa_in, const HegOptions& options = {});

struct HegOptimum {
    double tau_star = 0.0;
    double kappa_ex_star = 0.0;
    double p_e_star = 0.0;
    double rate_bound = 0.0;  // p_e^2 / (2 tau)
    double trial_rate = 0.0;  // p_e^2 / (4 dt), dt = xi_sep * tau
    std::size_t tau_index = 0;       // grid argmax before refinement
    std::size_t kappa_ex_index = 0;
    bool boundary_flag = false;      // grid argmax sits on an edge of the grid
};

// Exhaustive grid search (index-ordered tie-break: smallest tau, then
// smallest kappa_ex), then a golden-section pass over log kappa_ex in which
// every candidate is scored at its best tau near the grid argmax.
// Throws NoFeasiblePointError when no grid point is realizable.
HegOptimum optimize(double g, double kappa_in, double gamma, const SearchGrid& grid,
                    const HegOptions& options = {});
HegOptimum optimize(double g, double kappa_in, double gamma, const HegOptions& options = {});

struct ScalingRow {
    double kappa_in_over_g = 0.0;
    std::optional<HegOptimum> optimum;
    std::string error;  // set when optimum is empty
};

std::vector<ScalingRow> scaling_scan(std::span<const double> kappa_in_over_g, double g,
                                     double gamma, const HegOptions& options = {});

}  // namespace hegsim
