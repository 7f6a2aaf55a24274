#include "hegsim/photon_source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hegsim/errors.hpp"

namespace hegsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Centered differences inside, second-order one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
    return s * h;
}

struct Inversion {
    std::vector<double> time;
    std::vector<double> c_u2;
    std::vector<double> c_e;
    std::vector<double> c_c;
    PulseProbe summary;
};

Inversion invert(const CavityParams& cavity, const PulseSpec& spec) {
    cavity.validate();
    spec.validate();
    if (cavity.g == 0.0) throw DomainError("solve_pulse requires g > 0");

    const std::size_t n = spec.grid_points;
    const double h = spec.step();
    const double kappa = cavity.kappa();

    Inversion out;
    out.time.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.time[k] = spec.t_start() + static_cast<double>(k) * h;

    if (cavity.kappa_ex == 0.0) {
        out.c_u2.assign(n, 1.0);
        out.c_e.assign(n, 0.0);
        out.c_c.assign(n, 0.0);
        return out;
    }

    // Unscaled shapes: c_c = A v, c_e = A (v' + kappa v / 2) / g.
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = target_mode(out.time[k], spec.tau);
    const std::vector<double> dv = derivative(v, h);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = (dv[k] + 0.5 * kappa * v[k]) / cavity.g;

    std::vector<double> cum(n, 0.0);
    auto density = [&](std::size_t k) {
        return kappa * v[k] * v[k] + 2.0 * cavity.gamma * w[k] * w[k];
    };
    for (std::size_t k = 1; k < n; ++k) cum[k] = cum[k - 1] + 0.5 * h * (density(k - 1) + density(k));

    // Full transfer out of |u> at the window end fixes the scale.
    const double stored_end = v[n - 1] * v[n - 1] + w[n - 1] * w[n - 1];
    const double scale2 = 1.0 / (cum[n - 1] + stored_end);
    const double scale = std::sqrt(scale2);

    std::vector<double> v2(n), w2(n);
    for (std::size_t k = 0; k < n; ++k) {
        v2[k] = v[k] * v[k];
        w2[k] = w[k] * w[k];
    }
    const double int_v2 = trapezoid(v2, h);
    const double int_w2 = trapezoid(w2, h);

    out.c_u2.resize(n);
    out.c_e.resize(n);
    out.c_c.resize(n);
    double min_cu2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        out.c_c[k] = scale * v[k];
        out.c_e[k] = scale * w[k];
        out.c_u2[k] = 1.0 - scale2 * (v2[k] + w2[k] + cum[k]);
        min_cu2 = std::min(min_cu2, out.c_u2[k]);
    }

    PulseProbe& s = out.summary;
    s.p_e = cavity.kappa_ex * scale2 * int_v2;
    s.loss_cavity = cavity.kappa_in * scale2 * int_v2;
    s.loss_atom = 2.0 * cavity.gamma * scale2 * int_w2;
    s.min_cu2 = min_cu2;
    s.feasible = min_cu2 >= -kFeasibilityTolerance;
    if (!std::isfinite(s.p_e) || !std::isfinite(min_cu2)) {
        throw NumericalError("pulse inversion produced non-finite values");
    }
    return out;
}

}  // namespace

void PulseSpec::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("pulse width tau must be > 0");
    if (!(trunc_xi >= 2.0)) throw DomainError("truncation half-window must be >= 2 tau");
    if (grid_points < 256) throw DomainError("pulse grid needs at least 256 points");
}

double PulseSpec::step() const {
    return 2.0 * trunc_xi * tau / static_cast<double>(grid_points - 1);
}

double PulseSolution::closure_residual() const {
    const double cu = c_u.empty() ? 0.0 : c_u.back();
    const double ce = c_e.empty() ? 0.0 : c_e.back();
    const double cc = c_c.empty() ? 0.0 : c_c.back();
    return p_e + loss_cavity + loss_atom + cu * cu + ce * ce + cc * cc - 1.0;
}

double target_mode(double t, double tau) {
    const double norm = std::pow(std::numbers::pi * tau * tau, -0.25);
    return norm * std::exp(-t * t / (2.0 * tau * tau));
}

double emission_probability(const CavityParams& cavity, double tau) {
    cavity.validate();
    if (cavity.g == 0.0) throw DomainError("emission probability requires g > 0");
    if (!(tau > 0.0)) throw DomainError("pulse width tau must be > 0");
    const double kappa = cavity.kappa();
    const double g2 = cavity.g * cavity.g;
    const double denom =
        kappa + (2.0 * cavity.gamma / g2) * (1.0 / (2.0 * tau * tau) + 0.25 * kappa * kappa);
    return denom > 0.0 ? cavity.kappa_ex / denom : 0.0;
}

PulseProbe probe_pulse(const CavityParams& cavity, const PulseSpec& spec) {
    return invert(cavity, spec).summary;
}

PulseSolution solve_pulse(const CavityParams& cavity, const PulseSpec& spec) {
    Inversion inv = invert(cavity, spec);
    const std::size_t n = inv.time.size();
    const double h = spec.step();

    PulseSolution sol;
    sol.p_e = inv.summary.p_e;
    sol.loss_cavity = inv.summary.loss_cavity;
    sol.loss_atom = inv.summary.loss_atom;
    sol.min_cu2 = inv.summary.min_cu2;
    sol.feasible = inv.summary.feasible;
    sol.time = std::move(inv.time);
    sol.c_e = std::move(inv.c_e);
    sol.c_c = std::move(inv.c_c);
    sol.c_u.resize(n);
    for (std::size_t k = 0; k < n; ++k) sol.c_u[k] = std::sqrt(std::max(inv.c_u2[k], 0.0));
    // The inversion pins |c_u(t_end)|^2 to zero; keep the array consistent with it.
    if (cavity.kappa_ex > 0.0) sol.c_u[n - 1] = 0.0;

    sol.omega.assign(n, 0.0);
    if (cavity.kappa_ex > 0.0) {
        const std::vector<double> de = derivative(sol.c_e, h);
        for (std::size_t k = 0; k < n; ++k) {
            const double cu = sol.c_u[k];
            sol.omega[k] = cu > kOmegaCutoff
                               ? 2.0 * (de[k] + cavity.gamma * sol.c_e[k] + cavity.g * sol.c_c[k]) / cu
                               : kNaN;
        }
    }
    return sol;
}

ForwardResult forward_oracle(const CavityParams& cavity, std::span<const double> omega,
                             const PulseSpec& spec) {
    cavity.validate();
    spec.validate();
    const std::size_t n = spec.grid_points;
    if (omega.size() != n) {
        throw DomainError("drive waveform has " + std::to_string(omega.size()) +
                          " samples, grid has " + std::to_string(n));
    }
    const double h = spec.step();
    const double g = cavity.g;
    const double gamma = cavity.gamma;
    const double half_kappa = 0.5 * cavity.kappa();

    struct State {
        double u, e, c;
    };
    auto rhs = [&](const State& y, double drive) {
        return State{-0.5 * drive * y.e, 0.5 * drive * y.u - gamma * y.e - g * y.c,
                     g * y.e - half_kappa * y.c};
    };
    auto axpy = [](const State& y, double a, const State& k) {
        return State{y.u + a * k.u, y.e + a * k.e, y.c + a * k.c};
    };
    auto drive_at = [&](std::size_t k) { return std::isnan(omega[k]) ? 0.0 : omega[k]; };

    ForwardResult out;
    out.time.resize(n);
    out.c_u.resize(n);
    out.c_e.resize(n);
    out.c_c.resize(n);
    out.emitted.resize(n);

    // Intervals are split when h exceeds the Gershgorin bound on the stiffness.
    auto substeps = [&](double d0, double d1) {
        const double drive = 0.5 * std::max(std::abs(d0), std::abs(d1));
        const double lambda = std::max(drive + gamma + g, g + half_kappa);
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(h * lambda)));
    };
    auto rk4 = [&](const State& y, double d0, double dm, double d1, double step) {
        const State k1 = rhs(y, d0);
        const State k2 = rhs(axpy(y, 0.5 * step, k1), dm);
        const State k3 = rhs(axpy(y, 0.5 * step, k2), dm);
        const State k4 = rhs(axpy(y, step, k3), d1);
        return State{y.u + step / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
                     y.e + step / 6.0 * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e),
                     y.c + step / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c)};
    };

    State y{1.0, 0.0, 0.0};
    for (std::size_t k = 0;; ++k) {
        out.time[k] = spec.t_start() + static_cast<double>(k) * h;
        out.c_u[k] = y.u;
        out.c_e[k] = y.e;
        out.c_c[k] = y.c;
        if (!std::isfinite(y.u) || !std::isfinite(y.e) || !std::isfinite(y.c)) {
            throw NumericalError("forward integration diverged at step " + std::to_string(k) +
                                 "; use a finer grid");
        }
        if (k + 1 == n) break;
        const double d0 = drive_at(k);
        const double d1 = drive_at(k + 1);
        const std::size_t parts = substeps(d0, d1);
        if (parts == 1) {
            y = rk4(y, d0, 0.5 * (d0 + d1), d1, h);
            continue;
        }
        const double sub = h / static_cast<double>(parts);
        auto drive_frac = [&](double f) { return d0 + (d1 - d0) * f; };
        for (std::size_t j = 0; j < parts; ++j) {
            const double f0 = static_cast<double>(j) / static_cast<double>(parts);
            const double f1 = static_cast<double>(j + 1) / static_cast<double>(parts);
            y = rk4(y, drive_frac(f0), drive_frac(0.5 * (f0 + f1)), drive_frac(f1), sub);
        }
    }

    const double root_kex = std::sqrt(cavity.kappa_ex);
    std::vector<double> flux(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.emitted[k] = root_kex * out.c_c[k];
        flux[k] = out.emitted[k] * out.emitted[k];
    }
    out.p_e = trapezoid(flux, h);
    return out;
}

double wavepacket_mismatch(const ForwardResult& forward, double p_e, const PulseSpec& spec) {
    const double root_pe = std::sqrt(std::max(p_e, 0.0));
    std::vector<double> diff2(forward.time.size());
    for (std::size_t k = 0; k < diff2.size(); ++k) {
        const double d = forward.emitted[k] - root_pe * target_mode(forward.time[k], spec.tau);
        diff2[k] = d * d;
    }
    return std::sqrt(trapezoid(diff2, spec.step()));
}

double pulse_overlap(double xi) {
    if (!(xi >= 0.0)) throw DomainError("pulse separation multiplier must be >= 0");
    return std::exp(-xi * xi / 8.0);
}

}  // namespace hegsim
