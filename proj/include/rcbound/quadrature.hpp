// quadrature.hpp: adaptive Gauss–Kronrod integration with endpoint-singularity
// substitution, principal values and the Cauchy transform of Γ

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "rcbound/spectral.hpp"

namespace rcbound {

struct QuadOptions {
    double rel_tol{1e-9};
    double abs_tol{0.0};
    int max_depth{60};
    int max_intervals{4000};
};

struct QuadResult {
    double value{0.0};
    double error{0.0};
    long evaluations{0};
};

using RealFn = std::function<double(double)>;

/// ∫_a^b f over a finite interval. Integrable inverse-square-root and square-root
/// endpoint behaviour is absorbed by ω = a + t², ω = b − t² on the two halves.
/// Throws AccuracyError (carrying the best estimate) when the tolerance is not met.
QuadResult integrate_detail(const RealFn& f, double a, double b, const QuadOptions& opts = {});
double integrate(const RealFn& f, double a, double b, const QuadOptions& opts = {});

/// ∫_a^∞ f, truncated where |f| has dropped below 1e-14 of its observed peak.
double integrate_semi_infinite(const RealFn& f, double a, const QuadOptions& opts = {});

/// Σ over intervals, dispatching to the semi-infinite rule for open intervals.
double integrate_over(const RealFn& f, std::span<const Band> intervals, const QuadOptions& opts = {});

/// P∫ g(x)/(x − pole) dx over the union of `intervals`. A pole coinciding with
/// an interval endpoint raises DomainError.
double principal_value(const RealFn& g, double pole, std::span<const Band> intervals,
                       const QuadOptions& opts = {});

/// I_P(ω) = P∫ Γ(ω') ω² / (ω'(ω² − ω'²)) dω'. Rubin and gapless Drude use closed
/// forms unless `closed_form` is false.
double ip_integral(const SpectralFunction& sf, double w, bool closed_form = true,
                   const QuadOptions& opts = {});

/// W(z) = (1/π) ∫_0^∞ Γ(ω) [1/(ω − z) + 1/(ω + z)] dω for z off the support.
std::complex<double> cauchy_transform(const SpectralFunction& sf, std::complex<double> z,
                                      const QuadOptions& opts = {});

/// ∫_interval ω^power Γ(ω) dω.
double spectral_moment(const SpectralFunction& sf, int power, const Band& interval,
                       const QuadOptions& opts = {});

} // namespace rcbound
