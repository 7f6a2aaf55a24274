#include "hegsim/heg_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hegsim/errors.hpp"
#include "hegsim/parallel.hpp"
#include "hegsim/params.hpp"
#include "hegsim/photon_source.hpp"

namespace hegsim {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
constexpr int kGoldenIterations = 40;
constexpr int kBisectIterations = 30;

struct Evaluator {
    double g, kappa_in, gamma, trunc_xi;

    // p_e^2 / (2 tau), or -inf when the pulse cannot be realized.
    double rate(double tau, double kappa_ex, std::size_t grid_points, double* p_e = nullptr) const {
        const CavityParams cavity{g, kappa_in, kappa_ex, gamma};
        const PulseProbe probe = probe_pulse(cavity, PulseSpec{tau, trunc_xi, grid_points});
        if (p_e) *p_e = probe.p_e;
        if (!probe.feasible) return kInfeasible;
        return probe.p_e * probe.p_e / (2.0 * tau);
    }
};

struct Point {
    double log_tau, log_kex, rate;
};

// Golden-section search along one log axis; keeps the best feasible point seen.
template <typename Fn>
Point golden_axis(double lo, double hi, Point best, Fn&& at) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    Point pc = at(c), pd = at(d);
    for (int it = 0; it < kGoldenIterations; ++it) {
        if (pc.rate > best.rate) best = pc;
        if (pd.rate > best.rate) best = pd;
        if (pc.rate >= pd.rate) {
            b = d;
            d = c;
            pd = pc;
            c = b - inv_phi * (b - a);
            pc = at(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + inv_phi * (b - a);
            pd = at(d);
        }
    }
    if (pc.rate > best.rate) best = pc;
    if (pd.rate > best.rate) best = pd;
    return best;
}

}  // namespace

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_space requires 0 < lo <= hi");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

SearchGrid default_grid(double g, double kappa_in, const HegOptions& options) {
    if (!(g > 0.0)) throw DomainError("HEG optimization requires g > 0");
    const double inv_kappa = 1.0 / (kappa_in + g);
    return SearchGrid{log_space(1e-2 * inv_kappa, 1e3 * inv_kappa, options.tau_points),
                      log_space(1e-2 * g, 1e2 * g, options.kappa_ex_points)};
}

SearchGrid covering_grid(double g, double kappa_in, const HegOptions& options) {
    if (!(g > 0.0)) throw DomainError("HEG optimization requires g > 0");
    const double scale = kappa_in + g;
    const double tau_hi = std::max(1.0 / scale, scale / (g * g));
    return SearchGrid{log_space(1e-2 / scale, 1e3 * tau_hi, options.tau_points),
                      log_space(1e-2 * scale, 1e2 * scale, options.kappa_ex_points)};
}

HegOptimum optimize(double g, double kappa_in, double gamma, const HegOptions& options) {
    return optimize(g, kappa_in, gamma, default_grid(g, kappa_in, options), options);
}

HegOptimum optimize(double g, double kappa_in, double gamma, const SearchGrid& grid,
                    const HegOptions& options) {
    if (!(g > 0.0)) throw DomainError("HEG optimization requires g > 0");
    if (grid.tau.empty() || grid.kappa_ex.empty()) throw DomainError("empty optimizer grid");
    CavityParams{g, kappa_in, 0.0, gamma}.validate();

    const Evaluator eval{g, kappa_in, gamma, options.trunc_xi};
    const std::size_t nt = grid.tau.size();
    const std::size_t nk = grid.kappa_ex.size();

    std::vector<double> rates(nt * nk, kInfeasible);
    parallel_for(nt, options.jobs, [&](std::size_t i) {
        for (std::size_t j = 0; j < nk; ++j) {
            rates[i * nk + j] = eval.rate(grid.tau[i], grid.kappa_ex[j], options.search_grid_points);
        }
    });

    // Rank feasible cells by rate, ties by (tau index, kappa_ex index).
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < rates.size(); ++c) {
        if (rates[c] != kInfeasible) order.push_back(c);
    }
    if (order.empty()) throw NoFeasiblePointError("no feasible point on the HEG search grid");
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });

    // The search runs on a coarse pulse grid; re-check at full resolution.
    std::size_t cell = order.size();
    Point best{0.0, 0.0, kInfeasible};
    for (std::size_t c : order) {
        const double tau = grid.tau[c / nk];
        const double kex = grid.kappa_ex[c % nk];
        const double r = eval.rate(tau, kex, options.final_grid_points);
        if (r != kInfeasible) {
            cell = c;
            best = Point{std::log(tau), std::log(kex), r};
            break;
        }
    }
    if (cell == order.size()) {
        throw NoFeasiblePointError("no HEG grid point is feasible at full pulse resolution");
    }
    const std::size_t ti = cell / nk;
    const std::size_t kj = cell % nk;

    if (options.refine) {
        auto bracket = [](const std::vector<double>& axis, std::size_t idx, std::size_t width) {
            const std::size_t lo = idx < width ? 0 : idx - width;
            const std::size_t hi = std::min(idx + width, axis.size() - 1);
            return std::pair{std::log(axis[lo]), std::log(axis[hi])};
        };
        const auto [tlo, thi] = bracket(grid.tau, ti, 2);
        // The optimum usually sits on the short-pulse feasibility edge, which
        // runs diagonally through the grid; each kappa_ex is therefore scored
        // by its own best tau.
        auto best_tau = [&](double lk) {
            const double kex = std::exp(lk);
            auto at = [&](double lt) {
                return Point{lt, lk, eval.rate(std::exp(lt), kex, options.final_grid_points)};
            };
            if (nt == 1) return at(tlo);
            const Point top = at(thi);
            if (top.rate == kInfeasible) return top;
            double a = tlo;
            if (at(a).rate == kInfeasible) {
                double b = thi;
                for (int it = 0; it < kBisectIterations; ++it) {
                    const double m = 0.5 * (a + b);
                    (at(m).rate == kInfeasible ? a : b) = m;
                }
                a = b;
            }
            return golden_axis(a, thi, top, at);
        };
        if (nk > 1) {
            const auto [klo, khi] = bracket(grid.kappa_ex, kj, 1);
            best = golden_axis(klo, khi, best, best_tau);
        } else {
            const Point p = best_tau(best.log_kex);
            if (p.rate > best.rate) best = p;
        }
    }

    HegOptimum out;
    // Reuse the exact grid values when refinement did not move the point.
    out.tau_star = best.log_tau == std::log(grid.tau[ti]) ? grid.tau[ti] : std::exp(best.log_tau);
    out.kappa_ex_star =
        best.log_kex == std::log(grid.kappa_ex[kj]) ? grid.kappa_ex[kj] : std::exp(best.log_kex);
    double p_e = 0.0;
    out.rate_bound = eval.rate(out.tau_star, out.kappa_ex_star, options.final_grid_points, &p_e);
    out.p_e_star = p_e;
    out.trial_rate = p_e * p_e / (4.0 * options.xi_sep * out.tau_star);
    out.tau_index = ti;
    out.kappa_ex_index = kj;
    out.boundary_flag = ti == 0 || ti + 1 == nt || kj == 0 || kj + 1 == nk;
    return out;
}

std::vector<ScalingRow> scaling_scan(std::span<const double> kappa_in_over_g, double g,
                                     double gamma, const HegOptions& options) {
    std::vector<ScalingRow> rows;
    rows.reserve(kappa_in_over_g.size());
    for (double ratio : kappa_in_over_g) {
        ScalingRow row;
        row.kappa_in_over_g = ratio;
        try {
            if (!(ratio > 0.0)) throw DomainError("kappa_in / g must be > 0");
            row.optimum = optimize(g, ratio * g, gamma, options);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hegsim
