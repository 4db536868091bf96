// exact.hpp: exact bound-state analysis and long-term moments of the damped oscillator

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rcbound/quadrature.hpp"
#include "rcbound/spectral.hpp"

namespace rcbound {

struct ExactOptions {
    /// Use the Rubin / gapless-Drude closed forms where available.
    bool closed_forms{true};
    QuadOptions quad{1e-10, 0.0, 60, 4000};
    int brackets_per_gap{200};
    double root_tol{1e-12};
};

/// f(iω) = Ω + (2/π) I_P(ω) + iΓ(ω).
std::complex<double> f_imaginary_axis(const SpectralFunction& sf, const SystemParams& sys, double w,
                                      const ExactOptions& opts = {});

/// F(ω) = ω² − Ω Re f(iω); zeros inside a gap are bound-state frequencies.
double secular_function(const SpectralFunction& sf, const SystemParams& sys, double w,
                        const ExactOptions& opts = {});

struct GapRoot {
    Band gap;            ///< the gap searched (top gap with hi = +inf)
    double omega{0.0};   ///< root of F inside the gap
    int sign_changes{1}; ///< number of bracketing sign changes found on the sample grid
};

/// All in-gap roots of F, lowest gap first.
std::vector<GapRoot> bound_state_roots(const SpectralFunction& sf, const SystemParams& sys,
                                       const ExactOptions& opts = {});

/// True when a root exists in the semi-infinite gap above the support.
bool bound_state_exists(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts = {});

/// Frequency of the bound state above the support. Throws StateError when there is none.
double bound_state_frequency(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts = {});

/// Smallest amplitude at which the bound state above the support exists (0 if it always does).
double critical_coupling(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts = {});

/// Amplitude window [enter, leave) over which a root exists in a finite gap.
/// `leave` is +inf when the root never leaves. Empty window returns enter = leave.
struct CouplingWindow {
    double enter{0.0};
    double leave{0.0};
};
CouplingWindow gap_coupling_window(const SpectralFunction& sf, const SystemParams& sys, const Band& gap,
                                   const ExactOptions& opts = {});

/// f̄ = (4ω_b/π) ∫ Γ(ω) ω / (ω² − ω_b²)² dω. Requires ω_b off the support.
double bar_f(const SpectralFunction& sf, double omega_b, const ExactOptions& opts = {});

/// g₀ = 1 / (1 + Ω f̄ / (2ω_b)).
double residue_amplitude(const SpectralFunction& sf, const SystemParams& sys, double omega_b,
                         const ExactOptions& opts = {});

struct BoundStateReport {
    bool exists{false};
    double omega_b{0.0};
    double bar_f{0.0};
    double g0{0.0};
    double critical_gamma{0.0};
    std::vector<GapRoot> all_roots;
};

BoundStateReport analyze_bound_state(const SpectralFunction& sf, const SystemParams& sys,
                                     const ExactOptions& opts = {});

/// Initial system state as first and second moments; the reservoir is thermal.
struct InitialMoments {
    double x_mean{1.0};
    double p_mean{0.0};
    double x_var{1.0};
    double p_var{1.0};
    double xp_cov{0.0}; ///< ½⟨xp + px⟩ − ⟨x⟩⟨p⟩

    double x2() const { return x_var + x_mean * x_mean; }
    double p2() const { return p_var + p_mean * p_mean; }
    double xp_sym() const { return xp_cov + x_mean * p_mean; }
};

struct LongTermMoments {
    bool bound_state{false};
    double omega_b{0.0};
    double g0{0.0};
    double x_mean{0.0};
    double p_mean{0.0};
    double x2{0.0};
    double p2{0.0};
    double x2_stationary{0.0};   ///< continuum contribution to ⟨x²⟩
    double p2_stationary{0.0};   ///< continuum contribution to ⟨p²⟩
    double x2_oscillation{0.0};  ///< peak amplitude of the bound-state part of ⟨x²⟩ over one period
    double p2_oscillation{0.0};
    double occupation{0.0};      ///< (⟨x²⟩ + ⟨p²⟩)/4 − 1/2 at time t
};

/// Asymptotic long-time moments at time t. Only a single in-gap root is supported.
LongTermMoments long_term_moments(const SpectralFunction& sf, const SystemParams& sys, double t,
                                  const InitialMoments& init = {}, const ExactOptions& opts = {});

/// Long-time value of [x, p]/i. Equals 2 when the spectral weight is complete.
double commutator_value(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts = {});

} // namespace rcbound
