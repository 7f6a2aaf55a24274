#pragma once

// Gaussian-wavepacket single-photon source.
//
// Three-level atom (|u>, |e>, |g>) coupled to a cavity mode; |u> <-> |e> is
// driven by Omega(t), |e> <-> |g> exchanges a photon with the cavity at g.
// All amplitudes are real. The target cavity output is the normalized mode
//   v(t) = (pi tau^2)^(-1/4) exp(-t^2 / (2 tau^2))
// truncated to [-xi tau, +xi tau].

#include <cstddef>
#include <span>
#include <vector>

#include "hegsim/params.hpp"

namespace hegsim {

// min_t |c_u|^2 below -kFeasibilityTolerance marks a pulse as unrealizable.
inline constexpr double kFeasibilityTolerance = 1e-9;
// Omega is left undefined (NaN) where c_u drops to this amplitude or below.
inline constexpr double kOmegaCutoff = 1e-6;

struct PulseSpec {
    double tau = 0.0;             // s
    double trunc_xi = 5.0;        // half-window in units of tau
    std::size_t grid_points = 4096;

    void validate() const;
    double t_start() const { return -trunc_xi * tau; }
    double step() const;
};

struct PulseSolution {
    std::vector<double> time;
    std::vector<double> c_u;
    std::vector<double> c_e;
    std::vector<double> c_c;
    std::vector<double> omega;  // rad/s, NaN where undefined
    double p_e = 0.0;
    double loss_cavity = 0.0;
    double loss_atom = 0.0;
    double min_cu2 = 1.0;
    bool feasible = true;

    // p_e + losses + final populations - 1.
    double closure_residual() const;
};

// Scalar summary of solve_pulse without the waveform arrays.
struct PulseProbe {
    double p_e = 0.0;
    double loss_cavity = 0.0;
    double loss_atom = 0.0;
    double min_cu2 = 1.0;
    bool feasible = true;
};

double target_mode(double t, double tau);

// Untruncated closed form
//   p_e = kappa_ex / [kappa + (2 gamma / g^2) (1/(2 tau^2) + kappa^2/4)].
double emission_probability(const CavityParams& cavity, double tau);

PulseSolution solve_pulse(const CavityParams& cavity, const PulseSpec& spec);
PulseProbe probe_pulse(const CavityParams& cavity, const PulseSpec& spec);

struct ForwardResult {
    std::vector<double> time;
    std::vector<double> c_u;
    std::vector<double> c_e;
    std::vector<double> c_c;
    std::vector<double> emitted;  // sqrt(kappa_ex) * c_c, units 1/sqrt(s)
    double p_e = 0.0;
};

// Integrates the amplitude equations under a sampled drive with fixed-step
// RK4 on the PulseSpec grid; the drive at half steps is the mean of the two
// neighbouring samples. NaN samples are treated as zero drive. A grid step
// too stiff for RK4 is split into equal substeps with the drive interpolated
// linearly between samples.
ForwardResult forward_oracle(const CavityParams& cavity, std::span<const double> omega,
                             const PulseSpec& spec);

// || emitted - sqrt(p_e) v ||_2 over the grid (trapezoid).
double wavepacket_mismatch(const ForwardResult& forward, double p_e, const PulseSpec& spec);

// Relative amplitude at the midpoint of two pulses separated by xi * tau.
double pulse_overlap(double xi);

}  // namespace hegsim
