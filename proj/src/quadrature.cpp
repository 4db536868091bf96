// quadrature.cpp: globally adaptive Gauss–Kronrod (7/15) driver and the integrals built on it

#include "rcbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rcbound/errors.hpp"

namespace rcbound {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

using PieceFn = std::function<double(double)>;

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    double resabs;
    int piece;
    int depth;
};

struct RuleResult {
    double value;
    double error;
    double resabs;
};

RuleResult gk15(const PieceFn& g, double lo, double hi) {
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (lo + hi);
    const double hl = 0.5 * (hi - lo);

    double f1[8];
    double f2[8];
    const double fc = g(c);
    double resk = fc * wk[0];
    double resg = fc * wg[0];
    double resabs = std::abs(fc) * wk[0];
    for (int j = 1; j < 8; ++j) {
        const double dx = hl * xk[j];
        f1[j] = g(c - dx);
        f2[j] = g(c + dx);
        resk += wk[j] * (f1[j] + f2[j]);
        resabs += wk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 0) resg += wg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = wk[0] * std::abs(fc - mean);
    for (int j = 1; j < 8; ++j) resasc += wk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    RuleResult r{};
    r.value = resk * hl;
    resabs *= std::abs(hl);
    resasc *= std::abs(hl);
    double err = std::abs((resk - resg) * hl);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    r.error = err;
    r.resabs = resabs;
    if (!std::isfinite(r.value) || !std::isfinite(r.error))
        throw DomainError("quadrature: integrand is not finite on the integration interval");
    return r;
}

struct InitialSegment {
    int piece;
    double lo;
    double hi;
};

QuadResult adaptive(const std::vector<PieceFn>& pieces, const std::vector<InitialSegment>& init,
                    const QuadOptions& opts) {
    auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };
    std::vector<Segment> heap;
    std::vector<Segment> frozen;
    heap.reserve(static_cast<std::size_t>(opts.max_intervals) + 8);
    QuadResult out;
    double total = 0.0, error = 0.0, resabs = 0.0;

    auto evaluate = [&](int piece, double lo, double hi, int depth) {
        RuleResult r = gk15(pieces[piece], lo, hi);
        out.evaluations += 15;
        return Segment{lo, hi, r.value, r.error, r.resabs, piece, depth};
    };

    for (const auto& s : init) {
        if (!(s.hi > s.lo)) continue;
        Segment seg = evaluate(s.piece, s.lo, s.hi, 0);
        total += seg.value;
        error += seg.error;
        resabs += seg.resabs;
        heap.push_back(seg);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }

    auto finish = [&]() {
        double v = 0.0, e = 0.0;
        for (const auto& s : heap) v += s.value, e += s.error;
        for (const auto& s : frozen) v += s.value, e += s.error;
        out.value = v;
        out.error = e;
        return out;
    };

    while (true) {
        const double tol = std::max({opts.abs_tol, opts.rel_tol * std::abs(total), 100.0 * kEps * resabs});
        if (error <= tol) return finish();
        const std::size_t count = heap.size() + frozen.size();
        if (heap.empty() || count >= static_cast<std::size_t>(opts.max_intervals)) {
            finish();
            throw AccuracyError("quadrature: tolerance not reached", out.value, out.error);
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const double scale = std::max(std::abs(worst.lo), std::abs(worst.hi));
        if (worst.depth >= opts.max_depth || !(mid > worst.lo && mid < worst.hi) ||
            worst.hi - worst.lo <= 8.0 * kEps * scale) {
            frozen.push_back(worst);
            continue;
        }
        Segment left = evaluate(worst.piece, worst.lo, mid, worst.depth + 1);
        Segment right = evaluate(worst.piece, mid, worst.hi, worst.depth + 1);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }
}

// f(x, da, db) with da = x − a and db = b − x carried exactly near the endpoints.
using OffsetFn = std::function<double(double, double, double)>;

QuadResult integrate_offsets(const OffsetFn& f, double a, double b, const QuadOptions& opts) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: bounds must be finite");
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate_offsets([&](double x, double da, double db) { return f(x, -db, -da) ; }, b, a, opts);
        r.value = -r.value;
        return r;
    }
    const double len = b - a;
    const double s = std::sqrt(0.5 * len);
    std::vector<PieceFn> pieces{
        [&f, a, len](double t) {
            const double da = t * t;
            return 2.0 * t * f(a + da, da, len - da);
        },
        [&f, b, len](double t) {
            const double db = t * t;
            return 2.0 * t * f(b - db, len - db, db);
        },
    };
    return adaptive(pieces, {{0, 0.0, s}, {1, 0.0, s}}, opts);
}

double pv_finite(const RealFn& g, double p, double a, double b, const QuadOptions& opts) {
    const double edge_tol = 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(p - a) <= edge_tol || std::abs(p - b) <= edge_tol)
        throw DomainError("principal_value: pole coincides with an interval endpoint");
    if (p < a) {
        const double gap = a - p;
        return integrate_offsets([&](double x, double da, double) { return g(x) / (gap + da); }, a, b, opts).value;
    }
    if (p > b) {
        const double gap = p - b;
        return integrate_offsets([&](double x, double, double db) { return -g(x) / (gap + db); }, a, b, opts)
            .value;
    }
    const double gp = g(p);
    double v = gp * std::log((b - p) / (p - a));
    v += integrate_offsets([&](double x, double, double db) { return (g(x) - gp) / (-db); }, a, p, opts).value;
    v += integrate_offsets([&](double x, double da, double) { return (g(x) - gp) / da; }, p, b, opts).value;
    return v;
}

} // namespace

QuadResult integrate_detail(const RealFn& f, double a, double b, const QuadOptions& opts) {
    return integrate_offsets([&f](double x, double, double) { return f(x); }, a, b, opts);
}

double integrate(const RealFn& f, double a, double b, const QuadOptions& opts) {
    return integrate_detail(f, a, b, opts).value;
}

double integrate_semi_infinite(const RealFn& f, double a, const QuadOptions& opts) {
    if (!std::isfinite(a)) throw DomainError("integrate_semi_infinite: lower bound must be finite");
    const double step = std::max(1.0, std::abs(a)) * 1e-3;
    double peak = 0.0;
    int quiet = 0;
    double cut = a;
    double prev_x = a;
    double prev_f = 0.0;
    double decay = 0.0;
    for (int k = 0; k < 1100; ++k) {
        const double x = a + std::ldexp(step, k);
        if (!std::isfinite(x)) throw DivergenceError("integrate_semi_infinite: integrand does not decay");
        const double fx = std::abs(f(x));
        if (k > 0 && fx > 0.0 && prev_f > 0.0) decay = -std::log(fx / prev_f) / std::log(x / prev_x);
        peak = std::max(peak, fx);
        prev_x = x;
        prev_f = fx;
        cut = x;
        if (k >= 12 && fx <= 1e-14 * peak) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        if (k == 1099) throw DivergenceError("integrate_semi_infinite: integrand does not decay");
    }
    if (peak == 0.0) return 0.0;

    // Edge-substituted first cell, plain geometric cells up to the truncation point.
    const double first = a + step;
    const double s = std::sqrt(0.5 * step);
    std::vector<PieceFn> pieces{
        [&f, a](double t) { return 2.0 * t * f(a + t * t); },
        [&f, first](double t) { return 2.0 * t * f(first - t * t); },
        f,
    };
    std::vector<InitialSegment> init{{0, 0.0, s}, {1, 0.0, s}};
    for (double lo = first; lo < cut;) {
        const double hi = std::min(cut, a + 2.0 * (lo - a));
        init.push_back({2, lo, hi});
        lo = hi;
    }
    double value = adaptive(pieces, init, opts).value;
    // Power-law tail beyond the truncation point.
    if (prev_f > 0.0) {
        if (decay <= 1.05) throw DivergenceError("integrate_semi_infinite: integrand decays too slowly");
        if (decay < 50.0) value += f(cut) * cut / (decay - 1.0);
    }
    return value;
}

double integrate_over(const RealFn& f, std::span<const Band> intervals, const QuadOptions& opts) {
    double total = 0.0;
    for (const Band& b : intervals) {
        total += b.finite() ? integrate(f, b.lo, b.hi, opts) : integrate_semi_infinite(f, b.lo, opts);
    }
    return total;
}

double principal_value(const RealFn& g, double pole, std::span<const Band> intervals, const QuadOptions& opts) {
    double total = 0.0;
    for (const Band& b : intervals) {
        if (b.finite()) {
            total += pv_finite(g, pole, b.lo, b.hi, opts);
            continue;
        }
        // Finite window around the pole, ordinary tail beyond it.
        const double cut = pole > b.lo ? pole + std::max(pole - b.lo, 1.0) : b.lo + 1.0;
        total += pv_finite(g, pole, b.lo, cut, opts);
        total += integrate_semi_infinite([&](double x) { return g(x) / (x - pole); }, cut, opts);
    }
    return total;
}

double ip_integral(const SpectralFunction& sf, double w, bool closed_form, const QuadOptions& opts) {
    w = std::abs(w);
    if (w == 0.0) return 0.0;
    const double wc = sf.cutoff();
    if (closed_form && sf.kind() == SpectralKind::rubin) {
        double v = w * w;
        if (w > wc) v -= w * std::sqrt((w - wc) * (w + wc));
        return sf.amplitude() * std::numbers::pi / (2.0 * wc * wc) * v;
    }
    if (closed_form && sf.kind() == SpectralKind::drude_gapless) {
        return sf.amplitude() * std::numbers::pi / 2.0 * w * w / (w * w + wc * wc);
    }

    const auto& bands = sf.bands();
    const double edge_tol = 1e-12 * std::max(1.0, w);
    bool on_edge = false;
    for (const Band& b : bands) {
        if (std::abs(w - b.lo) <= edge_tol || (b.finite() && std::abs(w - b.hi) <= edge_tol)) on_edge = true;
    }
    if (!on_edge) {
        const double w2 = w * w;
        return principal_value([&](double x) { return -w2 * sf(x) / (x * (x + w)); }, w, bands, opts);
    }
    // Γ vanishes at a band edge, so the integral is an ordinary improper one there.
    double total = 0.0;
    for (const Band& b : bands) {
        if (!b.finite()) {
            total += integrate_semi_infinite([&](double x) { return sf(x) * w * w / (x * (w - x) * (w + x)); }, b.lo,
                                             opts);
            continue;
        }
        const double ga = w - b.lo;
        const double gb = w - b.hi;
        total += integrate_offsets(
                     [&](double x, double da, double db) {
                         double wx;
                         if (std::abs(gb) <= edge_tol) wx = db + gb;
                         else if (std::abs(ga) <= edge_tol) wx = ga - da;
                         else wx = w - x;
                         if (wx == 0.0) return 0.0;
                         return sf(x) * w * w / (x * wx * (w + x));
                     },
                     b.lo, b.hi, opts)
                     .value;
    }
    return total;
}

std::complex<double> cauchy_transform(const SpectralFunction& sf, std::complex<double> z, const QuadOptions& opts) {
    using cd = std::complex<double>;
    if (z.real() < 0.0) z = -z;
    const bool conjugate = z.imag() < 0.0;
    if (conjugate) z = std::conj(z);
    const double x = z.real();
    const double y = z.imag();
    if (y == 0.0) {
        for (const Band& b : sf.bands()) {
            if (b.contains(x)) throw DomainError("cauchy_transform: argument lies on the spectral support");
        }
    }

    // Each component is converged relative to the modulus, not to itself.
    auto integrate_complex = [&](const std::function<cd(double, double, double)>& f, double a, double b) {
        auto part = [&](bool imag, double floor) {
            QuadOptions o = opts;
            o.abs_tol = std::max(o.abs_tol, floor);
            return integrate_offsets(
                       [&](double t, double da, double db) {
                           const cd v = f(t, da, db);
                           return imag ? v.imag() : v.real();
                       },
                       a, b, o)
                .value;
        };
        bool retry = false;
        double re = 0.0;
        try {
            re = part(false, 0.0);
        } catch (const AccuracyError& e) {
            re = e.best_estimate();
            retry = true;
        }
        const double im = part(true, opts.rel_tol * std::abs(re));
        if (retry) re = part(false, opts.rel_tol * std::abs(im));
        return cd(re, im);
    };
    auto integrate_complex_tail = [&](const std::function<cd(double)>& f, double a) {
        const double re = integrate_semi_infinite([&](double t) { return f(t).real(); }, a, opts);
        const double im = integrate_semi_infinite([&](double t) { return f(t).imag(); }, a, opts);
        return cd(re, im);
    };

    cd total{0.0, 0.0};
    for (const Band& band : sf.bands()) {
        const double a = band.lo;
        const double cut = band.finite() ? band.hi : std::max(x + std::max(x - a, 1.0), a + 1.0);

        auto plus = [&](double t, double, double) { return sf(t) / (t + z); };
        total += integrate_complex(plus, a, cut);
        if (!band.finite()) total += integrate_complex_tail([&](double t) { return sf(t) / (t + z); }, cut);

        const bool near_axis = x > a && x < cut && y < 0.25 * (cut - a);
        if (near_axis) {
            const double gx = sf(x);
            auto below = [&](double t, double, double db) {
                const double d = -db;
                return (sf(t) - gx) / cd(d, -y);
            };
            auto above = [&](double t, double da, double) { return (sf(t) - gx) / cd(da, -y); };
            total += integrate_complex(below, a, x);
            total += integrate_complex(above, x, cut);
            total += gx * (std::log(cd(cut - x, -y)) - std::log(cd(a - x, -y)));
        } else {
            total += integrate_complex([&](double t, double, double) { return sf(t) / (t - z); }, a, cut);
        }
        if (!band.finite()) total += integrate_complex_tail([&](double t) { return sf(t) / (t - z); }, cut);
    }
    total /= std::numbers::pi;
    return conjugate ? std::conj(total) : total;
}

double spectral_moment(const SpectralFunction& sf, int power, const Band& interval, const QuadOptions& opts) {
    auto f = [&](double x) { return std::pow(x, power) * sf(x); };
    std::vector<double> cuts{interval.lo};
    for (const Band& b : sf.bands()) {
        if (interval.interior(b.lo)) cuts.push_back(b.lo);
        if (b.finite() && interval.interior(b.hi)) cuts.push_back(b.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = k + 1 < cuts.size() ? cuts[k + 1] : interval.hi;
        if (std::isfinite(hi)) total += integrate(f, lo, hi, opts);
        else total += integrate_semi_infinite(f, lo, opts);
    }
    return total;
}

} // namespace rcbound
