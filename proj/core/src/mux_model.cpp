#include "hegsim/mux_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hegsim/errors.hpp"

namespace hegsim {

namespace {

void require_positive_time(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string("mux scenario: ") + name + " must be > 0");
    }
}

void require_round_count(int m) {
    if (m < 1) throw DomainError("repetition count M must be >= 1");
}

}  // namespace

void MuxScenario::validate() const {
    if (n_atoms < 1) throw DomainError("mux scenario: n_atoms must be >= 1");
    if (!(p_trial > 0.0) || !(p_trial <= 1.0)) {
        throw DomainError("mux scenario: p_trial must lie in (0, 1]");
    }
    require_positive_time(dt, "dt");
    require_positive_time(t_init, "t_init");
    require_positive_time(t_move, "t_move");
    if (zones != 1 && zones != 2) throw DomainError("mux scenario: zones must be 1 or 2");
    if (zones == 2 && n_atoms < 2) throw DomainError("mux scenario: two zones need n_atoms >= 2");
}

double MuxScenario::atoms_per_cycle() const {
    return zones == 2 ? static_cast<double>(n_atoms / 2) : static_cast<double>(n_atoms);
}

double surviving_atoms(double n, double p, int round) {
    if (round < 1) throw DomainError("round index must be >= 1");
    return n * std::pow(1.0 - p, round - 1);
}

double bell_yield(double n, double p, int m) {
    require_round_count(m);
    return n * (1.0 - std::pow(1.0 - p, m));
}

double trials_per_cycle(double n, double p, int m) {
    require_round_count(m);
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    return n * (1.0 - std::pow(1.0 - p, m)) / p;
}

double cycle_time(const MuxScenario& s, int m) {
    s.validate();
    const double n = static_cast<double>(s.n_atoms);
    return s.t_move + m * s.t_init + 2.0 * s.dt * trials_per_cycle(n, s.p_trial, m);
}

double zoned_cycle_time(const MuxScenario& s, int m) {
    s.validate();
    const double n = static_cast<double>(s.n_atoms / 2);
    const double busy = m * s.t_init + 2.0 * s.dt * trials_per_cycle(n, s.p_trial, m);
    return std::max(s.t_move, busy);
}

MuxResult evaluate_m(const MuxScenario& s, int m) {
    s.validate();
    require_round_count(m);
    MuxResult r;
    r.m_star = m;
    r.pairs_per_cycle = bell_yield(s.atoms_per_cycle(), s.p_trial, m);
    r.cycle_time = s.zones == 2 ? zoned_cycle_time(s, m) : cycle_time(s, m);
    r.rate = r.pairs_per_cycle / r.cycle_time;
    r.rate_fraction = r.rate / s.rate_bound();
    return r;
}

double mux_rate(const MuxScenario& s, int m) { return evaluate_m(s, m).rate; }

MuxResult optimize_m(const MuxScenario& s, int m_max) {
    s.validate();
    if (m_max < 1) throw DomainError("M_max must be >= 1");
    MuxResult best = evaluate_m(s, 1);
    for (int m = 2; m <= m_max; ++m) {
        const MuxResult r = evaluate_m(s, m);
        if (r.rate > best.rate) best = r;
    }
    return best;
}

std::vector<MuxCurveRow> mux_curve(const MuxScenario& templ, std::span<const std::size_t> n_list,
                                   int m_max) {
    if (n_list.empty()) throw DomainError("empty grid");
    std::vector<MuxCurveRow> rows;
    rows.reserve(n_list.size());
    for (std::size_t n : n_list) {
        MuxScenario s = templ;
        s.n_atoms = n;
        rows.push_back(MuxCurveRow{n, s.zones, optimize_m(s, m_max)});
    }
    return rows;
}

std::vector<BudgetRow> budget_curves(std::span<const double> n_list, double bell_rate,
                                     double transport_coeff, double t_meas) {
    if (!(bell_rate > 0.0) || !(transport_coeff > 0.0) || !(t_meas > 0.0)) {
        throw DomainError("budget curves require positive rate, transport coefficient, t_meas");
    }
    std::vector<BudgetRow> rows;
    rows.reserve(n_list.size());
    for (double n : n_list) {
        if (!(n >= 0.0)) throw DomainError("code-block size must be >= 0");
        rows.push_back(BudgetRow{n, n / bell_rate, transport_coeff * std::sqrt(n), t_meas});
    }
    return rows;
}

}  // namespace hegsim
