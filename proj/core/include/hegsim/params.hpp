#pragma once

// Physical parameter types and unit conventions.
//
// Every rate is stored in rad/s and every time in seconds. Inputs quoted as
// "X/2pi MHz" go through mhz_over_2pi() exactly once, at ingestion.

#include <numbers>
#include <optional>
#include <span>
#include <string_view>

namespace hegsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

// rate = 2*pi * value * 1e6 rad/s
constexpr double mhz_over_2pi(double value) { return kTwoPi * value * 1e6; }
constexpr double to_mhz_over_2pi(double rad_per_s) { return rad_per_s / (kTwoPi * 1e6); }

struct FrequencyInput {
    double value_mhz_over_2pi = 0.0;

    constexpr double rad_per_s() const { return mhz_over_2pi(value_mhz_over_2pi); }
};

// Atom-cavity rates in rad/s. kappa() is always recomputed, never stored.
struct CavityParams {
    double g = 0.0;
    double kappa_in = 0.0;
    double kappa_ex = 0.0;
    double gamma = 0.0;

    constexpr double kappa() const { return kappa_in + kappa_ex; }

    // Throws DomainError if any rate is negative or non-finite.
    void validate() const;

    static CavityParams from_mhz(double g_mhz, double kappa_in_mhz, double kappa_ex_mhz,
                                 double gamma_mhz);
};

// C_in = g^2 / (2 gamma kappa_in).
double cooperativity(const CavityParams& p);

// tau_c = max(1/kappa, kappa/g^2).
double critical_pulse_width(const CavityParams& p);

// Total linewidth 2*pi*FSR/F with FSR = c / (2 n_eff L).
double kappa_from_finesse(double finesse, double length_m, double n_eff);

// Power attenuation coefficient in 1/m from dB/m.
double db_per_m_to_linear(double loss_db_per_m);

// Named telecom transitions. Carry only a wavelength and default (g, gamma).
struct TransitionPreset {
    std::string_view name;
    double wavelength_m;
    double g;      // rad/s
    double gamma;  // rad/s
};

std::span<const TransitionPreset> transition_presets();
std::optional<TransitionPreset> find_preset(std::string_view name);

}  // namespace hegsim
