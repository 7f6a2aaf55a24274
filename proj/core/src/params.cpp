#include "hegsim/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hegsim/errors.hpp"

namespace hegsim {

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError(std::string("cavity rate ") + name + " must be finite and >= 0");
    }
}

constexpr std::array kPresets{
    TransitionPreset{"yb_1389", 1.389e-6, mhz_over_2pi(5.0), mhz_over_2pi(0.25)},
    TransitionPreset{"yb_1480", 1.480e-6, mhz_over_2pi(5.0), mhz_over_2pi(0.25)},
    TransitionPreset{"yb_1539", 1.539e-6, mhz_over_2pi(5.0), mhz_over_2pi(0.25)},
};

}  // namespace

void CavityParams::validate() const {
    require_rate(g, "g");
    require_rate(kappa_in, "kappa_in");
    require_rate(kappa_ex, "kappa_ex");
    require_rate(gamma, "gamma");
}

CavityParams CavityParams::from_mhz(double g_mhz, double kappa_in_mhz, double kappa_ex_mhz,
                                    double gamma_mhz) {
    return CavityParams{mhz_over_2pi(g_mhz), mhz_over_2pi(kappa_in_mhz),
                        mhz_over_2pi(kappa_ex_mhz), mhz_over_2pi(gamma_mhz)};
}

double cooperativity(const CavityParams& p) {
    p.validate();
    if (p.gamma == 0.0 || p.kappa_in == 0.0) {
        throw DomainError("cooperativity undefined for gamma == 0 or kappa_in == 0");
    }
    return p.g * p.g / (2.0 * p.gamma * p.kappa_in);
}

double critical_pulse_width(const CavityParams& p) {
    p.validate();
    const double kappa = p.kappa();
    if (p.g == 0.0 || kappa == 0.0) {
        throw DomainError("critical pulse width undefined for g == 0 or kappa == 0");
    }
    return std::max(1.0 / kappa, kappa / (p.g * p.g));
}

double kappa_from_finesse(double finesse, double length_m, double n_eff) {
    if (!(finesse > 0.0) || !(length_m > 0.0) || !(n_eff >= 1.0)) {
        throw DomainError("kappa_from_finesse requires finesse > 0, L > 0, n_eff >= 1");
    }
    const double fsr = kSpeedOfLight / (2.0 * n_eff * length_m);
    return kTwoPi * fsr / finesse;
}

double db_per_m_to_linear(double loss_db_per_m) {
    if (!(loss_db_per_m >= 0.0)) {
        throw DomainError("propagation loss must be >= 0 dB/m");
    }
    return loss_db_per_m * std::log(10.0) / 10.0;
}

std::span<const TransitionPreset> transition_presets() { return kPresets; }

std::optional<TransitionPreset> find_preset(std::string_view name) {
    const auto it = std::find_if(kPresets.begin(), kPresets.end(),
                                 [&](const TransitionPreset& p) { return p.name == name; });
    if (it == kPresets.end()) return std::nullopt;
    return *it;
}

}  // namespace hegsim
