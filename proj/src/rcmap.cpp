// rcmap.cpp: reaction-coordinate mapping of the reservoir

#include "rcbound/rcmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcbound/errors.hpp"

namespace rcbound {

namespace {

std::vector<int> expand_counts(const SpectralFunction& sf, std::span<const int> counts) {
    const std::size_t nb = sf.bands().size();
    std::vector<int> out;
    if (counts.size() == 1) out.assign(nb, counts[0]);
    else if (counts.size() == nb) out.assign(counts.begin(), counts.end());
    else throw ConfigError("RC counts must be a single value or one value per band");
    for (int c : out) {
        if (c < 1) throw ConfigError("RC count per band must be at least 1");
    }
    return out;
}

// Number of tabulated segments with positive weight inside a band.
int resolvable_cells(const SpectralFunction& sf, const Band& band) {
    int n = 0;
    const auto& s = sf.samples();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        if (s[k].omega >= band.lo && s[k + 1].omega <= band.hi) ++n;
    }
    return n;
}

} // namespace

RcDecomposition::RcDecomposition(SpectralFunction source, std::vector<RcMode> modes, std::vector<int> per_band)
    : source_(std::move(source)), modes_(std::move(modes)), per_band_(std::move(per_band)) {}

RcDecomposition RcDecomposition::with_amplitude(double gamma) const {
    if (!(gamma >= 0.0)) throw ConfigError("amplitude must be non-negative");
    const double a = source_.amplitude();
    if (!(a > 0.0)) throw DomainError("cannot rescale a decomposition of a zero spectral function");
    const double s = std::sqrt(gamma / a);
    std::vector<RcMode> modes = modes_;
    for (auto& m : modes) m.lambda *= s;
    return RcDecomposition(source_.with_amplitude(gamma), std::move(modes), per_band_);
}

QuadOptions rcmap_quad_defaults() {
    QuadOptions o;
    o.rel_tol = 1e-13;
    return o;
}

std::vector<Band> partition_equal_weight(const SpectralFunction& sf, std::span<const int> counts, Exec exec,
                                         const QuadOptions& opts) {
    const auto per_band = expand_counts(sf, counts);
    std::vector<Band> cells;
    for (std::size_t b = 0; b < sf.bands().size(); ++b) {
        const Band band = sf.bands()[b];
        const int n = per_band[b];
        if (!band.finite())
            throw ConfigError("equal-weight partition needs a finite first moment; the support is unbounded");
        if (sf.kind() == SpectralKind::tabulated && n > resolvable_cells(sf, band))
            throw ConfigError("RC count exceeds the resolution of the tabulated spectral function");
        auto weight = [&](double x) { return x * sf(x); };
        const double total = integrate(weight, band.lo, band.hi, opts);
        if (!(total > 0.0)) throw DomainError("band carries no spectral weight");

        std::vector<double> edges(n + 1);
        edges[0] = band.lo;
        edges[n] = band.hi;
        for_each_index(n - 1, exec, [&](int j) {
            const int k = j + 1;
            const double target = total * k / n;
            double lo = band.lo, hi = band.hi;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (integrate(weight, band.lo, mid, opts) < target) lo = mid;
                else hi = mid;
            }
            edges[k] = 0.5 * (lo + hi);
        });
        for (int k = 0; k < n; ++k) cells.push_back(Band{edges[k], edges[k + 1]});
    }
    return cells;
}

std::vector<Band> partition_equal_weight(const SpectralFunction& sf, int n_per_band, Exec exec,
                                         const QuadOptions& opts) {
    const int c[1] = {n_per_band};
    return partition_equal_weight(sf, std::span<const int>(c, 1), exec, opts);
}

RcParameters rc_parameters(const SpectralFunction& sf, const Band& interval, const QuadOptions& opts) {
    if (!(interval.width() > 0.0)) throw DomainError("rc_parameters: interval has zero measure");
    if (!interval.finite()) throw DomainError("rc_parameters: interval must be finite");
    const double first = integrate([&](double x) { return x * sf(x); }, interval.lo, interval.hi, opts);
    const double inverse = integrate([&](double x) { return sf(x) / x; }, interval.lo, interval.hi, opts);
    if (!(first > 0.0) || !(inverse > 0.0)) throw DomainError("rc_parameters: interval carries no spectral weight");
    RcParameters p;
    p.omega = std::sqrt(first / inverse);
    p.lambda = std::sqrt(first / (2.0 * std::numbers::pi * p.omega));
    return p;
}

RcDecomposition decompose(const SpectralFunction& sf, std::span<const int> counts, Exec exec,
                          const QuadOptions& opts) {
    auto per_band = expand_counts(sf, counts);
    const auto cells = partition_equal_weight(sf, per_band, exec, opts);
    std::vector<RcMode> modes(cells.size());
    for_each_index(static_cast<int>(cells.size()), exec, [&](int i) {
        const auto p = rc_parameters(sf, cells[i], opts);
        modes[i] = RcMode{i + 1, cells[i], p.omega, p.lambda};
    });
    return RcDecomposition(sf, std::move(modes), std::move(per_band));
}

RcDecomposition decompose(const SpectralFunction& sf, int n_per_band, Exec exec, const QuadOptions& opts) {
    const int c[1] = {n_per_band};
    return decompose(sf, std::span<const int>(c, 1), exec, opts);
}

ResidualValue residual_gamma(const RcDecomposition& dec, std::size_t i, double w, const QuadOptions& opts) {
    const RcMode& mode = dec[i];
    const Band cell = mode.interval;
    if (!(w > cell.lo && w < cell.hi)) return {};
    const double margin = 1e-6 * cell.width();
    if (w - cell.lo <= margin || cell.hi - w <= margin) return {0.0, true};
    const SpectralFunction& sf = dec.source();
    const double g = sf(w);
    // Odd continuation: the mirrored cell contributes ∫_I Γ(x)/(x + ω) without a pole.
    const double pv = principal_value([&](double x) { return sf(x); }, w, std::span(&cell, 1), opts);
    const double mirror = integrate([&](double x) { return sf(x) / (x + w); }, cell.lo, cell.hi, opts);
    const double re = (pv + mirror) / std::numbers::pi;
    const double den = g * g + re * re;
    if (den == 0.0) return {0.0, false};
    return {4.0 * mode.lambda * mode.lambda * g / den, false};
}

double residual_bound(double dw) {
    if (!(dw > 0.0)) throw DomainError("residual_bound: width must be positive");
    return 2.0 * dw / std::numbers::pi;
}

double residual_max(const RcDecomposition& dec, std::size_t i, int samples, const QuadOptions& opts) {
    const Band cell = dec[i].interval;
    double best = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double w = cell.lo + cell.width() * k / (samples + 1);
        best = std::max(best, residual_gamma(dec, i, w, opts).value);
    }
    return best;
}

} // namespace rcbound
