// exact.cpp: bound-state root finding, residues and long-term moments

#include "rcbound/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcbound/errors.hpp"

namespace rcbound {

namespace {

constexpr double kPi = std::numbers::pi;

double ip(const SpectralFunction& sf, double w, const ExactOptions& opts) {
    return ip_integral(sf, w, opts.closed_forms, opts.quad);
}

double bisect(const std::function<double(double)>& F, double lo, double hi, double flo, double tol) {
    for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = F(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Root of F on [lo, hi] given F(lo) ≤ 0 ≤ F(hi); counts sign changes on a uniform grid.
GapRoot bracketed_root(const std::function<double(double)>& F, const Band& gap, double lo, double hi, double flo,
                       const ExactOptions& opts) {
    GapRoot r;
    r.gap = gap;
    if (flo == 0.0) {
        r.omega = lo;
        return r;
    }
    const int n = std::max(2, opts.brackets_per_gap);
    std::vector<double> xs(n + 1), fs(n + 1);
    for (int k = 0; k <= n; ++k) {
        xs[k] = k == n ? hi : lo + (hi - lo) * k / n;
        fs[k] = k == 0 ? flo : F(xs[k]);
    }
    int changes = 0;
    int first = -1;
    for (int k = 0; k < n; ++k) {
        if ((fs[k] < 0.0) != (fs[k + 1] < 0.0) || fs[k + 1] == 0.0) {
            ++changes;
            if (first < 0) first = k;
        }
    }
    r.sign_changes = std::max(changes, 1);
    if (first < 0) first = n - 1;
    r.omega = fs[first + 1] == 0.0 ? xs[first + 1] : bisect(F, xs[first], xs[first + 1], fs[first], opts.root_tol);
    return r;
}

bool is_rubin_fast(const SpectralFunction& sf, const ExactOptions& opts) {
    return opts.closed_forms && sf.kind() == SpectralKind::rubin;
}

// Closed-form bound-state frequency for the Rubin band; empty if it does not apply.
std::optional<double> rubin_closed_root(const SpectralFunction& sf, const SystemParams& sys) {
    const double wc = sf.cutoff();
    const double alpha = sf.amplitude() * sys.omega / (wc * wc);
    const double beta = sys.omega / wc;
    const double denom = 4.0 * alpha - 2.0;
    if (std::abs(denom) < 1e-9) return std::nullopt;
    const double disc = (alpha + 2.0 * beta * beta) * (alpha + 2.0 * beta * beta) - 4.0 * beta * beta;
    if (disc < 0.0) return std::nullopt;
    const double u = (alpha * alpha + 2.0 * alpha * beta * beta - 2.0 * beta * beta + alpha * std::sqrt(disc)) / denom;
    if (!(u >= 1.0)) return std::nullopt;
    return wc * std::sqrt(u);
}

} // namespace

std::complex<double> f_imaginary_axis(const SpectralFunction& sf, const SystemParams& sys, double w,
                                      const ExactOptions& opts) {
    return {sys.omega + 2.0 / kPi * ip(sf, w, opts), sf(w)};
}

double secular_function(const SpectralFunction& sf, const SystemParams& sys, double w, const ExactOptions& opts) {
    return w * w - sys.omega * sys.omega - 2.0 * sys.omega / kPi * ip(sf, w, opts);
}

std::vector<GapRoot> bound_state_roots(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    sys.validate();
    std::vector<GapRoot> roots;
    auto F = [&](double w) { return secular_function(sf, sys, w, opts); };
    const double top = sf.support_top();
    for (const Band& gap : band_gaps(sf, std::numeric_limits<double>::infinity())) {
        const double flo = F(gap.lo);
        if (flo > 0.0) continue;
        double hi = gap.hi;
        if (!gap.finite()) {
            hi = std::max(2.0 * gap.lo, gap.lo + 1.0);
            while (F(hi) < 0.0) {
                hi *= 2.0;
                if (!std::isfinite(hi)) throw InternalError("bound-state bracket search diverged");
            }
        } else if (F(hi) < 0.0) {
            continue;
        }
        if (!gap.finite() && is_rubin_fast(sf, opts) && gap.lo == top) {
            if (auto w = rubin_closed_root(sf, sys)) {
                const double res = F(*w);
                if (std::abs(res) <= 1e-8 * std::max(1.0, *w * *w)) {
                    roots.push_back(GapRoot{gap, *w, 1});
                    continue;
                }
            }
        }
        roots.push_back(bracketed_root(F, gap, gap.lo, hi, flo, opts));
    }
    return roots;
}

bool bound_state_exists(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    sys.validate();
    if (sf.gapless()) return false;
    if (is_rubin_fast(sf, opts)) {
        const double wc2 = sf.cutoff() * sf.cutoff();
        return 1.0 - sys.omega * sys.omega / wc2 <= sf.amplitude() * sys.omega / wc2;
    }
    return secular_function(sf, sys, sf.support_top(), opts) <= 0.0;
}

double bound_state_frequency(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    if (!bound_state_exists(sf, sys, opts)) throw StateError("no bound state above the spectral support");
    const auto roots = bound_state_roots(sf, sys, opts);
    if (roots.empty() || roots.back().gap.finite()) {
        // Exactly critical: the root sits on the band edge.
        return sf.support_top();
    }
    return roots.back().omega;
}

double critical_coupling(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    sys.validate();
    if (sf.gapless()) return std::numeric_limits<double>::infinity();
    const double we = sf.support_top();
    const double num = we * we - sys.omega * sys.omega;
    if (num <= 0.0) return 0.0;
    if (is_rubin_fast(sf, opts)) {
        return num / sys.omega;
    }
    const auto unit = sf.with_amplitude(1.0);
    return num / (2.0 * sys.omega / kPi * ip(unit, we, opts));
}

CouplingWindow gap_coupling_window(const SpectralFunction& sf, const SystemParams& sys, const Band& gap,
                                   const ExactOptions& opts) {
    sys.validate();
    const auto unit = sf.with_amplitude(1.0);
    auto threshold = [&](double w) {
        const double num = w * w - sys.omega * sys.omega;
        const double den = 2.0 * sys.omega / kPi * ip(unit, w, opts);
        if (den <= 0.0) return num <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::max(0.0, num / den);
    };
    CouplingWindow win;
    win.enter = threshold(gap.lo);
    win.leave = gap.finite() ? threshold(gap.hi) : std::numeric_limits<double>::infinity();
    if (win.leave < win.enter) win.leave = win.enter;
    return win;
}

double bar_f(const SpectralFunction& sf, double omega_b, const ExactOptions& opts) {
    for (const Band& b : sf.bands()) {
        if (b.contains(omega_b)) throw DivergenceError("bar_f: bound-state frequency lies on the spectral support");
    }
    if (opts.closed_forms && sf.kind() == SpectralKind::rubin) {
        const double wc = sf.cutoff();
        const double s = std::sqrt(1.0 - wc * wc / (omega_b * omega_b));
        return sf.amplitude() * omega_b * (1.0 - s) * (1.0 - s) / (wc * wc * s);
    }
    const double wb2 = omega_b * omega_b;
    const double integral = integrate_over(
        [&](double w) {
            const double d = w * w - wb2;
            return sf(w) * w / (d * d);
        },
        sf.bands(), opts.quad);
    return 4.0 * omega_b / kPi * integral;
}

double residue_amplitude(const SpectralFunction& sf, const SystemParams& sys, double omega_b,
                         const ExactOptions& opts) {
    return 1.0 / (1.0 + sys.omega * bar_f(sf, omega_b, opts) / (2.0 * omega_b));
}

BoundStateReport analyze_bound_state(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    BoundStateReport rep;
    rep.critical_gamma = critical_coupling(sf, sys, opts);
    rep.all_roots = bound_state_roots(sf, sys, opts);
    rep.exists = bound_state_exists(sf, sys, opts);
    if (rep.exists) {
        rep.omega_b = bound_state_frequency(sf, sys, opts);
        if (rep.omega_b > sf.support_top()) {
            rep.bar_f = bar_f(sf, rep.omega_b, opts);
            rep.g0 = 1.0 / (1.0 + sys.omega * rep.bar_f / (2.0 * rep.omega_b));
        }
    }
    return rep;
}

namespace {

// Band pieces split at Ω and at the zeros of ω² − Ω Re f(iω).
std::vector<Band> continuum_pieces(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    std::vector<Band> pieces;
    auto G = [&](double w) { return secular_function(sf, sys, w, opts); };
    for (const Band& b : sf.bands()) {
        const double hi = b.finite() ? b.hi : std::max(4.0 * b.lo + 4.0, 8.0 * sys.omega);
        std::vector<double> cuts{b.lo};
        if (b.interior(sys.omega)) cuts.push_back(sys.omega);
        const int n = 64;
        double xprev = b.lo + (hi - b.lo) * 1e-6;
        double gprev = G(xprev);
        for (int k = 1; k <= n; ++k) {
            const double x = k == n ? hi - (hi - b.lo) * 1e-6 : b.lo + (hi - b.lo) * k / n;
            const double g = G(x);
            if ((g < 0.0) != (gprev < 0.0)) cuts.push_back(bisect(G, xprev, x, gprev, 1e-13));
            xprev = x;
            gprev = g;
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            const double lo = cuts[k];
            const double up = k + 1 < cuts.size() ? cuts[k + 1] : b.hi;
            if (up > lo) pieces.push_back(Band{lo, up});
        }
    }
    return pieces;
}

double thermal_factor(double temperature, double w) {
    if (temperature == 0.0) return 1.0;
    return 1.0 + 2.0 * bose_occupation(temperature, w);
}

} // namespace

LongTermMoments long_term_moments(const SpectralFunction& sf, const SystemParams& sys, double t,
                                  const InitialMoments& init, const ExactOptions& opts) {
    sys.validate();
    if (init.x_var < 0.0 || init.p_var < 0.0) throw ConfigError("initial variances must be non-negative");
    LongTermMoments m;
    const double Om = sys.omega;
    const double T = sys.temperature;
    const auto pieces = continuum_pieces(sf, sys, opts);

    auto denom = [&](double w) {
        const double re = w * w - Om * (Om + 2.0 / kPi * ip(sf, w, opts));
        const double im = Om * sf(w);
        return re * re + im * im;
    };
    auto cont = [&](auto weight) {
        return integrate_over(
                   [&](double w) {
                       const double g = sf(w);
                       if (g == 0.0) return 0.0;
                       return g * thermal_factor(T, w) * weight(w) / denom(w);
                   },
                   pieces, opts.quad) /
               (2.0 * kPi);
    };
    m.x2_stationary = cont([&](double) { return 4.0 * Om * Om; });
    m.p2_stationary = cont([&](double w) { return 4.0 * w * w; });

    const auto roots = bound_state_roots(sf, sys, opts);
    std::vector<GapRoot> inside;
    for (const auto& r : roots) {
        bool on_support = false;
        for (const Band& b : sf.bands()) on_support = on_support || b.contains(r.omega);
        if (!on_support) inside.push_back(r);
    }
    if (inside.size() > 1)
        throw StateError("long_term_moments: more than one bound state present; only a single bound state is supported");

    double x2 = m.x2_stationary;
    double p2 = m.p2_stationary;
    if (!inside.empty()) {
        const double wb = inside.front().omega;
        const double g0 = residue_amplitude(sf, sys, wb, opts);
        m.bound_state = true;
        m.omega_b = wb;
        m.g0 = g0;
        const double g = g0 * std::cos(wb * t);
        const double h = g0 * std::sin(wb * t);
        const double c = Om / wb;
        auto bs = [&](auto weight) {
            return integrate_over(
                       [&](double w) {
                           const double d = wb * wb - w * w;
                           return sf(w) * thermal_factor(T, w) * weight(w) / (d * d);
                       },
                       sf.bands(), opts.quad) /
                   (2.0 * kPi);
        };
        const double bx0 = bs([&](double) { return 4.0 * Om * Om; });
        const double bx1 = bs([&](double w) { return 4.0 * Om * Om * w * w / (wb * wb); });
        const double bp0 = bs([&](double w) { return 4.0 * w * w; });
        const double bp1 = bs([&](double) { return 4.0 * wb * wb; });

        m.x_mean = g * init.x_mean + c * h * init.p_mean;
        m.p_mean = g * init.p_mean - h / c * init.x_mean;

        // ⟨x²⟩ oscillating part = g0² (X cos² + Y sin² + 2Z sin cos).
        const double X = init.x2() + bx0;
        const double Y = c * c * init.p2() + bx1;
        const double Z = c * init.xp_sym();
        x2 += g * g * X + h * h * Y + 2.0 * g * h * Z;
        m.x2_oscillation = g0 * g0 * (0.5 * (X + Y) + std::hypot(0.5 * (X - Y), Z));

        const double Xp = init.p2() + bp0;
        const double Yp = init.x2() / (c * c) + bp1;
        const double Zp = -init.xp_sym() / c;
        p2 += g * g * Xp + h * h * Yp + 2.0 * g * h * Zp;
        m.p2_oscillation = g0 * g0 * (0.5 * (Xp + Yp) + std::hypot(0.5 * (Xp - Yp), Zp));
    }
    m.x2 = x2;
    m.p2 = p2;
    m.occupation = 0.25 * (x2 + p2) - 0.5;
    return m;
}

double commutator_value(const SpectralFunction& sf, const SystemParams& sys, const ExactOptions& opts) {
    sys.validate();
    const double Om = sys.omega;
    const auto pieces = continuum_pieces(sf, sys, opts);
    const double cont = integrate_over(
                            [&](double w) {
                                const double g = sf(w);
                                if (g == 0.0) return 0.0;
                                const double re = w * w - Om * (Om + 2.0 / kPi * ip(sf, w, opts));
                                const double im = Om * g;
                                return 4.0 * w * Om * g / (re * re + im * im);
                            },
                            pieces, opts.quad) /
                        (2.0 * kPi);
    double bs = 0.0;
    for (const auto& r : bound_state_roots(sf, sys, opts)) {
        bool on_support = false;
        for (const Band& b : sf.bands()) on_support = on_support || b.contains(r.omega);
        if (!on_support) bs += 2.0 * residue_amplitude(sf, sys, r.omega, opts);
    }
    return bs + 2.0 * cont;
}

} // namespace rcbound
