// spectral.hpp: reservoir spectral functions Γ(ω): Rubin, gapless Drude reference,
// shifted multi-band sums and tabulated data

#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace rcbound {

/// Closed frequency interval [lo, hi]. `hi` may be +inf for the semi-infinite
/// support of the gapless reference or the top gap.
struct Band {
    double lo{0.0};
    double hi{0.0};

    double width() const noexcept { return hi - lo; }
    bool finite() const noexcept { return hi < std::numeric_limits<double>::infinity(); }
    bool contains(double w) const noexcept { return w >= lo && w <= hi; }
    bool interior(double w) const noexcept { return w > lo && w < hi; }

    friend bool operator==(const Band&, const Band&) = default;
};

enum class SpectralKind { rubin, drude_gapless, shifted_sum, tabulated };

std::string to_string(SpectralKind kind);

struct Sample {
    double omega;
    double value;
};

/// Immutable spectral coupling density. Evaluation applies the odd continuation
/// Γ(−ω) = −Γ(ω) and returns exactly zero outside the bands of gapped kinds.
class SpectralFunction {
public:
    /// Γ (ω/ω_c) √(1 − ω²/ω_c²) on [0, ω_c].
    static SpectralFunction rubin(double gamma, double omega_c = 1.0);
    /// Γ ω ω_c / (ω² + ω_c²) on [0, ∞).
    static SpectralFunction drude_gapless(double gamma, double omega_c = 1.0);
    /// Σ_k Rubin(ω − s_k), each term restricted to its own band [s_k, s_k + ω_c].
    /// Offsets must be ascending, non-negative and leave a gap between bands.
    static SpectralFunction shifted_sum(double gamma, double omega_c, std::vector<double> offsets);
    /// Piecewise-linear interpolation of (ω, value) samples times `scale`.
    /// Bands are the maximal runs of strictly positive samples; both hull ends must be zero.
    static SpectralFunction tabulated(std::vector<Sample> samples, double scale = 1.0);

    SpectralKind kind() const noexcept { return kind_; }
    /// Γ for the analytic kinds, the multiplicative scale for tabulated data.
    double amplitude() const noexcept { return amplitude_; }
    double cutoff() const noexcept { return omega_c_; }
    const std::vector<Band>& bands() const noexcept { return bands_; }
    const std::vector<double>& offsets() const noexcept { return offsets_; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

    bool gapless() const noexcept { return kind_ == SpectralKind::drude_gapless; }
    /// Upper edge of the highest band (+inf for the gapless reference).
    double support_top() const noexcept { return bands_.back().hi; }

    double operator()(double w) const;

    /// Same shape with a different amplitude; every band and Ω_i are unchanged.
    SpectralFunction with_amplitude(double gamma) const;
    /// Express all frequencies (arguments and values) in units of `unit`.
    SpectralFunction rescaled(double unit) const;

private:
    SpectralFunction() = default;
    double eval_positive(double w) const;

    SpectralKind kind_{SpectralKind::rubin};
    double amplitude_{1.0};
    double omega_c_{1.0};
    std::vector<Band> bands_;
    std::vector<double> offsets_;
    std::vector<Sample> samples_;
};

/// Γ(ω) with odd continuation.
inline double eval_gamma(const SpectralFunction& sf, double w) { return sf(w); }

/// Complement of the band union inside (0, w_max]. The semi-infinite top gap is
/// truncated at w_max (pass +inf to keep it open).
std::vector<Band> band_gaps(const SpectralFunction& sf, double w_max);

/// Bose occupation 1/(e^{ω/T} − 1); zero at T = 0.
double bose_occupation(double temperature, double w);

struct SystemParams {
    double omega{0.5};
    double temperature{0.0};

    void validate() const;
};

/// Two-column CSV `omega,gamma` (header optional, `#` comments skipped).
std::vector<Sample> read_spectral_csv(const std::filesystem::path& path);

} // namespace rcbound
