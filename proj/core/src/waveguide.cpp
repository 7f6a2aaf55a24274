#include "hegsim/waveguide.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "hegsim/errors.hpp"
#include "hegsim/parallel.hpp"

namespace hegsim {

void WaveguideSpec::validate() const {
    if (!(length > 0.0)) throw DomainError("waveguide: cavity length must be > 0");
    if (!(mirror_overhead >= 0.0)) throw DomainError("waveguide: mirror overhead must be >= 0");
    if (!(wavelength > 0.0)) throw DomainError("waveguide: wavelength must be > 0");
    if (!(n_eff >= 1.0)) throw DomainError("waveguide: n_eff must be >= 1");
    if (!(alpha_db_per_m >= 0.0)) throw DomainError("waveguide: loss must be >= 0 dB/m");
    if (!(fbg_loss >= 0.0 && fbg_loss < 1.0)) throw DomainError("waveguide: fbg_loss must be in [0, 1)");
    if (!(anchor.length > 0.0) || !(anchor.g > 0.0) || !(anchor.kappa_fbg >= 0.0)) {
        throw DomainError("waveguide: anchor needs L0 > 0, g0 > 0, kappa_fbg0 >= 0");
    }
}

std::size_t atom_capacity(const WaveguideSpec& w) {
    w.validate();
    if (w.length <= w.mirror_overhead) return 0;
    return static_cast<std::size_t>(std::floor((w.length - w.mirror_overhead) / w.tweezer_pitch()));
}

double propagation_kappa(const WaveguideSpec& w) {
    return kSpeedOfLight / w.n_eff * db_per_m_to_linear(w.alpha_db_per_m);
}

double fbg_kappa(double fbg_loss, double length, double n_eff) {
    if (!(length > 0.0) || !(n_eff >= 1.0)) throw DomainError("fbg_kappa requires L > 0, n_eff >= 1");
    return 2.0 * fbg_loss * kSpeedOfLight / (2.0 * n_eff * length);
}

CavityParams params_at_length(const WaveguideSpec& w, double gamma) {
    w.validate();
    const double ratio = w.anchor.length / w.length;
    CavityParams p;
    p.g = w.anchor.g * std::sqrt(ratio);
    p.kappa_in = w.anchor.kappa_fbg * ratio + propagation_kappa(w);
    p.kappa_ex = 0.0;
    p.gamma = gamma;
    return p;
}

std::vector<LengthScanRow> length_scan(const LengthScanRequest& req) {
    if (req.lengths.empty() || req.losses_db_per_m.empty()) throw DomainError("empty grid");
    const std::vector<double> overheads =
        req.mirror_overheads.empty() ? std::vector<double>{req.templ.mirror_overhead}
                                     : req.mirror_overheads;

    // The optimum depends on (loss, L) only; the mirror overhead just sets N.
    const std::size_t nl = req.lengths.size();
    const std::size_t cells = req.losses_db_per_m.size() * nl;
    std::vector<std::optional<HegOptimum>> optima(cells);
    std::vector<std::string> errors(cells);
    std::vector<CavityParams> params(cells);

    auto solve_cell = [&](std::size_t c) {
        WaveguideSpec w = req.templ;
        w.alpha_db_per_m = req.losses_db_per_m[c / nl];
        w.length = req.lengths[c % nl];
        try {
            params[c] = params_at_length(w, req.gamma);
            HegOptions heg = req.heg;
            heg.jobs = 1;
            optima[c] = optimize(params[c].g, params[c].kappa_in, params[c].gamma,
                                 covering_grid(params[c].g, params[c].kappa_in, heg), heg);
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    };
    parallel_for(cells, req.jobs, solve_cell);

    std::vector<LengthScanRow> rows;
    rows.reserve(overheads.size() * cells);
    for (double overhead : overheads) {
        for (std::size_t c = 0; c < cells; ++c) {
            WaveguideSpec w = req.templ;
            w.mirror_overhead = overhead;
            w.alpha_db_per_m = req.losses_db_per_m[c / nl];
            w.length = req.lengths[c % nl];

            LengthScanRow row;
            row.mirror_label = length_label(overhead);
            row.alpha_db_per_m = w.alpha_db_per_m;
            row.length = w.length;
            row.n_atoms = atom_capacity(w);
            row.g = params[c].g;
            row.kappa_in = params[c].kappa_in;
            row.error = errors[c];
            if (optima[c]) {
                const HegOptimum& opt = *optima[c];
                const double dt = req.heg.xi_sep * opt.tau_star;
                const double p_trial = opt.p_e_star * opt.p_e_star / 2.0;
                row.tau_star = opt.tau_star;
                row.p_e_star = opt.p_e_star;
                row.bound = p_trial / (2.0 * dt);
                if (row.n_atoms > 0 && p_trial > 0.0) {
                    MuxScenario s = req.mux;
                    s.n_atoms = row.n_atoms;
                    s.p_trial = p_trial;
                    s.dt = dt;
                    if (s.zones == 2 && s.n_atoms < 2) s.zones = 1;
                    const MuxResult r = optimize_m(s, req.m_max);
                    row.rate = r.rate;
                    row.m_star = r.m_star;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double channel_multiplier(std::size_t n_channels, double base_rate) {
    if (n_channels < 1) throw DomainError("channel count must be >= 1");
    return static_cast<double>(n_channels) * base_rate;
}

std::string length_label(double metres) {
    const double um = metres * 1e6;
    char buf[64];
    if (um >= 1000.0 && std::fmod(std::round(um), 1000.0) == 0.0) {
        std::snprintf(buf, sizeof buf, "%gmm", std::round(um) / 1000.0);
    } else {
        std::snprintf(buf, sizeof buf, "%gum", um);
    }
    return buf;
}

}  // namespace hegsim
