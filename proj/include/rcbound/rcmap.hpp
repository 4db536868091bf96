// rcmap.hpp: reaction-coordinate mapping: equal-weight partition of the support,
// RC energies and couplings per cell, residual spectral functions

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcbound/parallel.hpp"
#include "rcbound/quadrature.hpp"
#include "rcbound/spectral.hpp"

namespace rcbound {

struct RcMode {
    int index{0}; ///< 1-based
    Band interval;
    double omega{0.0};
    double lambda{0.0};
};

struct RcParameters {
    double omega{0.0};
    double lambda{0.0};
};

class RcDecomposition {
public:
    RcDecomposition(SpectralFunction source, std::vector<RcMode> modes, std::vector<int> per_band);

    const SpectralFunction& source() const noexcept { return source_; }
    const std::vector<RcMode>& modes() const noexcept { return modes_; }
    const std::vector<int>& per_band_counts() const noexcept { return per_band_; }
    std::size_t size() const noexcept { return modes_.size(); }
    const RcMode& operator[](std::size_t i) const { return modes_.at(i); }

    /// Same partition for amplitude `gamma`: Ω_i fixed, λ_i scaled by √(gamma/amplitude).
    RcDecomposition with_amplitude(double gamma) const;

private:
    SpectralFunction source_;
    std::vector<RcMode> modes_;
    std::vector<int> per_band_;
};

QuadOptions rcmap_quad_defaults();

/// Equal ∫ωΓ cells: `counts[b]` cells inside band b. A single count is applied to every band.
std::vector<Band> partition_equal_weight(const SpectralFunction& sf, std::span<const int> counts,
                                         Exec exec = Exec::parallel, const QuadOptions& opts = rcmap_quad_defaults());
std::vector<Band> partition_equal_weight(const SpectralFunction& sf, int n_per_band, Exec exec = Exec::parallel,
                                         const QuadOptions& opts = rcmap_quad_defaults());

/// Ω² = ∫ωΓ / ∫Γ/ω and λ² = ∫ωΓ / (2πΩ) over `interval`.
RcParameters rc_parameters(const SpectralFunction& sf, const Band& interval,
                           const QuadOptions& opts = rcmap_quad_defaults());

RcDecomposition decompose(const SpectralFunction& sf, std::span<const int> counts, Exec exec = Exec::parallel,
                          const QuadOptions& opts = rcmap_quad_defaults());
RcDecomposition decompose(const SpectralFunction& sf, int n_per_band, Exec exec = Exec::parallel,
                          const QuadOptions& opts = rcmap_quad_defaults());

struct ResidualValue {
    double value{0.0};
    bool edge{false}; ///< evaluated within 1e-6 of a cell width from an endpoint
};

/// Γ_i(ω) for mode `i` (0-based). Zero outside the mode's cell.
ResidualValue residual_gamma(const RcDecomposition& dec, std::size_t i, double w,
                             const QuadOptions& opts = {});

/// Asymptotic fine-cell ceiling 2Δω/π.
double residual_bound(double dw);

/// Largest sampled Γ_i over `samples` interior points of cell i.
double residual_max(const RcDecomposition& dec, std::size_t i, int samples = 64, const QuadOptions& opts = {});

} // namespace rcbound
