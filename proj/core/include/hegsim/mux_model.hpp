#pragma once

// Expected-value model of time-multiplexed heralded entanglement.
//
// A batch of N atoms is transported (t_move) and then runs M rounds of
// {initialize all (t_init), one time-bin trial per remaining atom (2 dt)}.
// Each trial heralds a Bell pair with probability p. Atom counts stay
// fractional. With two zones, each zone holds N/2 atoms and transport of one
// zone overlaps the trials of the other.

#include <cstddef>
#include <span>
#include <vector>

namespace hegsim {

struct MuxScenario {
    std::size_t n_atoms = 200;
    double p_trial = 0.2;
    double dt = 1e-6;       // s
    double t_init = 20e-6;  // s
    double t_move = 100e-6; // s
    int zones = 1;

    void validate() const;
    // Atoms taking part in one HEG cycle: N, or floor(N/2) with two zones.
    double atoms_per_cycle() const;
    // The p / (2 dt) ceiling on any schedule.
    double rate_bound() const { return p_trial / (2.0 * dt); }
};

struct MuxResult {
    int m_star = 0;
    double pairs_per_cycle = 0.0;
    double cycle_time = 0.0;  // s
    double rate = 0.0;        // 1/s
    double rate_fraction = 0.0;
};

// N (1 - p)^(i - 1), i >= 1.
double surviving_atoms(double n, double p, int round);
// Sum over i = 1..M of N_i p = N (1 - (1 - p)^M).
double bell_yield(double n, double p, int m);
// Sum over i = 1..M of N_i.
double trials_per_cycle(double n, double p, int m);

// t_move + M t_init + 2 dt sum N_i (single zone).
double cycle_time(const MuxScenario& s, int m);
// max{t_move, M t_init + 2 dt sum N_i} with N/2 atoms per zone.
double zoned_cycle_time(const MuxScenario& s, int m);

// N_M / t_M for the scenario's zone count.
double mux_rate(const MuxScenario& s, int m);
MuxResult evaluate_m(const MuxScenario& s, int m);

// Exhaustive M in [1, m_max]; ties go to the smallest M.
MuxResult optimize_m(const MuxScenario& s, int m_max = 200);

struct MuxCurveRow {
    std::size_t n_atoms = 0;
    int zones = 1;
    MuxResult result;
};

// optimize_m for each N, other fields from the template. Throws on empty N list.
std::vector<MuxCurveRow> mux_curve(const MuxScenario& templ, std::span<const std::size_t> n_list,
                                   int m_max = 200);

struct BudgetRow {
    double n = 0.0;
    double t_entangle = 0.0;
    double t_transport = 0.0;
    double t_measure = 0.0;
};

// Per code-block size n: n / bell_rate, transport_coeff sqrt(n), t_meas.
std::vector<BudgetRow> budget_curves(std::span<const double> n_list, double bell_rate,
                                     double transport_coeff, double t_meas);

}  // namespace hegsim
