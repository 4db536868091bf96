// acceptance.cpp: one PASS/FAIL line per acceptance criterion; nonzero exit if any fails

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcbound/exact.hpp"
#include "rcbound/excitation.hpp"
#include "rcbound/lifetime.hpp"
#include "rcbound/rcmap.hpp"

using namespace rcbound;

namespace {

// Tolerances and budgets.
constexpr double kClosedFormRel = 1e-10;
constexpr double kResidualAbs = 1e-6;
constexpr double kBoundStateRel = 1e-3;
constexpr double kOmegaBSq = 1.2745191;
constexpr double kBoundValueRel = 1e-7;
constexpr double kTraceRel = 1e-8;
constexpr double kCommutatorAbs = 1e-5;
constexpr double kOccupationRel = 0.02;
constexpr double kResidueAbs = 1e-6;
constexpr double kInertAbs = 1e-6;
constexpr double kLifetimeTraceAbs = 1e-6;
constexpr double kOracleRel = 1e-9;

struct Verdict {
    bool pass{false};
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < budget_s;
    const bool ok = v.pass && in_time;
    if (!ok) ++failures;
    std::printf("%s %s: %s; %.2f s (budget %.0f s%s)\n", ok ? "PASS" : "FAIL", name, v.detail.c_str(), dt, budget_s,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

const SystemParams kSys{0.5, 0.0};

std::vector<double> linear_grid(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return g;
}

Verdict single_rc_closed_forms() {
    double worst_param = 0.0, worst_residual = 0.0;
    for (double gamma : {0.5, 1.0, 3.0, 16.0}) {
        const auto sf = SpectralFunction::rubin(gamma, 1.0);
        const auto p = rc_parameters(sf, Band{0.0, 1.0});
        worst_param = std::max(worst_param, std::abs(p.omega / 0.5 - 1.0));
        worst_param = std::max(worst_param, std::abs(p.lambda / (std::sqrt(gamma) / 4.0) - 1.0));
        const auto dec = decompose(sf, 1, Exec::serial);
        for (int k = 1; k <= 50; ++k) {
            const double w = k / 51.0;
            const double want = w * std::sqrt(1.0 - w * w);
            worst_residual = std::max(worst_residual, std::abs(residual_gamma(dec, 0, w).value - want));
        }
    }
    return {worst_param <= kClosedFormRel && worst_residual <= kResidualAbs,
            "max rel err (Omega_1, lambda_1) = " + num(worst_param) + ", max residual err = " + num(worst_residual)};
}

Verdict bound_state_match() {
    const auto sf = SpectralFunction::rubin(3.0, 1.0);
    const auto spec = eigenvalues(build_arrowhead(kSys, decompose(sf, 100)), Exec::parallel, false);
    const double top = spec.eigenvalues.back();
    const double wb = bound_state_frequency(sf, kSys);
    const double rel_exact = std::abs(wb * wb / kOmegaBSq - 1.0);
    const double rel_discrete = std::abs(top / (wb * wb) - 1.0);

    const auto grid = linear_grid(0.1, 4.0, 40);
    const double step = grid[1] - grid[0];
    const auto table = sweep(kSys, SpectralFunction::rubin(1.0, 1.0), grid, std::vector<int>{100});
    double onset = std::numeric_limits<double>::quiet_NaN();
    double discrete_onset = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : table.rows) {
        if (row.bs_exists && std::isnan(onset)) onset = row.gamma;
        if (row.eigenvalues.back() > 1.0 && std::isnan(discrete_onset)) discrete_onset = row.gamma;
    }
    const bool onset_ok = std::abs(onset - 1.5) <= step * (1.0 + 1e-9);
    return {rel_exact <= 1e-7 && rel_discrete <= kBoundStateRel && onset_ok,
            "eps_{N+1}^2 = " + num(top) + ", omega_b^2 = " + num(wb * wb) + " (rel diff " + num(rel_discrete) +
                "), sweep onset at Gamma = " + num(onset) + " (grid step " + num(step) +
                "; top eigenvalue leaves the band at Gamma = " + num(discrete_onset) + ")"};
}

Verdict bound_ordering() {
    const auto sf = SpectralFunction::rubin(3.0, 1.0);
    const auto cb = bounds_largest_continuum(sf, kSys);
    const double eps = eigenvalues(build_arrowhead(kSys, decompose(sf, 100)), Exec::parallel, false).eigenvalues.back();
    const bool values = std::abs(cb.loose_lower - 1.0) <= kBoundValueRel && std::abs(cb.tight_lower - 1.25) <= kBoundValueRel &&
                        std::abs(cb.upper - (1.0 + std::sqrt(0.1875))) <= kBoundValueRel;
    const bool at_point = cb.loose_lower <= cb.tight_lower && cb.tight_lower <= eps && eps <= cb.upper;

    const auto table = sweep(kSys, SpectralFunction::rubin(1.0, 1.0), linear_grid(0.1, 4.0, 40), std::vector<int>{100});
    int violations = 0;
    for (const auto& row : table.rows) {
        const double top = row.eigenvalues.back();
        const auto& b = row.bounds;
        if (!(b.loose_lower <= b.tight_lower && b.tight_lower <= top && top <= b.upper)) ++violations;
    }
    return {values && at_point && violations == 0,
            "continuum bounds " + num(cb.loose_lower) + " <= " + num(cb.tight_lower) + " <= eps^2 = " + num(eps) +
                " <= " + num(cb.upper) + "; sweep ordering violations = " + std::to_string(violations) + "/40"};
}

Verdict interlacing_and_trace() {
    std::mt19937_64 rng(1729);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 200);
    int bad_interlace = 0;
    double worst_trace = 0.0;
    for (int k = 0; k < 100; ++k) {
        const SystemParams sys{0.1 + 1.9 * u(rng), 0.0};
        const double gamma = 0.05 + 6.0 * u(rng);
        const int n = size(rng);
        const bool two_band = k % 3 == 0;
        const auto sf = two_band ? SpectralFunction::shifted_sum(gamma, 1.0, {0.0, 1.2 + u(rng)})
                                 : SpectralFunction::rubin(gamma, 0.5 + 1.5 * u(rng));
        const auto m = build_arrowhead(sys, decompose(sf, two_band ? std::max(1, n / 2) : n));
        const auto spec = eigenvalues(m, Exec::parallel, false);
        std::vector<double> d = m.shaft;
        std::sort(d.begin(), d.end());
        const double tol = 1e-12 * m.norm();
        for (std::size_t i = 0; i < d.size(); ++i)
            if (spec.eigenvalues[i] > d[i] + tol || d[i] > spec.eigenvalues[i + 1] + tol) ++bad_interlace;
        double sum = 0.0;
        for (double e : spec.eigenvalues) sum += e;
        worst_trace = std::max(worst_trace, std::abs(sum - m.trace()) / std::abs(m.trace()));
    }
    return {bad_interlace == 0 && worst_trace <= kTraceRel,
            "interlacing violations = " + std::to_string(bad_interlace) + ", max rel trace err = " + num(worst_trace)};
}

Verdict exact_invariants() {
    double worst = 0.0;
    std::string detail = "commutator:";
    for (double gamma : {1.0, 2.0}) {
        const double c = commutator_value(SpectralFunction::rubin(gamma, 1.0), kSys);
        worst = std::max(worst, std::abs(c - 2.0));
        detail += " " + num(c);
    }
    const SystemParams warm{0.5, 1.0};
    const auto mom = long_term_moments(SpectralFunction::rubin(1e-3, 1.0), warm, 0.0);
    const double bose = 1.0 / std::expm1(0.5);
    const double rel = std::abs(mom.occupation / bose - 1.0);
    detail += " (max |c - 2| = " + num(worst) + ")";
    detail += "; weak-coupling occupation " + num(mom.occupation) + " vs n(Omega) = " + num(bose) + " (rel " +
              num(rel) + ")";
    return {worst <= kCommutatorAbs && rel <= kOccupationRel && std::abs(bose - 1.5414941) < 1e-7, detail};
}

Verdict residue_amplitude_check() {
    const auto sf = SpectralFunction::rubin(2.0, 1.0);
    const double want = 1.0 / std::sqrt(5.0);
    const auto closed = analyze_bound_state(sf, kSys);
    ExactOptions generic;
    generic.closed_forms = false;
    const auto quad = analyze_bound_state(sf, kSys, generic);
    const double e1 = std::abs(closed.g0 - want), e2 = std::abs(quad.g0 - want);
    return {closed.exists && quad.exists && e1 <= kResidueAbs && e2 <= kResidueAbs,
            "g0 closed form = " + num(closed.g0) + " (err " + num(e1) + "), generic quadrature = " + num(quad.g0) +
                " (err " + num(e2) + ")"};
}

Verdict multi_gap_census() {
    const auto sf = SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.5});
    const auto grid = linear_grid(0.25, 16.0, 64);
    const auto table = sweep(kSys, sf, grid, std::vector<int>{100});
    int over = 0;
    bool gap_window = false, top_window = false;
    double gap_at = 0.0, top_at = 0.0;
    const std::size_t n_gaps = table.gaps.size();
    for (const auto& row : table.rows) {
        for (const auto& c : row.census)
            if (c.count > 1) ++over;
        if (row.census.size() != n_gaps || n_gaps < 2) continue;
        const int inner = row.census[n_gaps - 2].count;
        const int top = row.census[n_gaps - 1].count;
        if (inner == 1 && top == 0 && !gap_window) {
            gap_window = true;
            gap_at = row.gamma;
        }
        if (inner == 0 && top == 1 && gap_window && !top_window) {
            top_window = true;
            top_at = row.gamma;
        }
    }
    return {over == 0 && gap_window && top_window,
            "points with >1 eigenvalue in a gap = " + std::to_string(over) + ", inner-gap-only BS from Gamma = " +
                (gap_window ? num(gap_at) : std::string("none")) + ", top-only BS from Gamma = " +
                (top_window ? num(top_at) : std::string("none"))};
}

struct LifetimeRun {
    double gamma, u;
    bool partial;
    Trajectory traj;
    LifetimeEstimate est;
};

Verdict lifetime_scaling() {
    std::vector<LifetimeRun> runs{{4.0, 1e-3, false, {}, {}},
                                  {16.0, 1e-3, false, {}, {}},
                                  {16.0, 0.0, false, {}, {}},
                                  {16.0, 0.0, true, {}, {}}};
    for_each_index(static_cast<int>(runs.size()), Exec::parallel, [&](int k) {
        LifetimeRun& r = runs[static_cast<std::size_t>(k)];
        const auto model = build_supersystem(kSys, decompose(SpectralFunction::rubin(r.gamma, 1.0), 1, Exec::serial), r.u);
        const FockBasis basis(model.mode_count(), 6);
        const auto l = r.partial ? build_generator_partial_secular(model, basis) : build_generator_secular(model, basis);
        EvolveOptions opts;
        opts.norm = l.norm_estimate();
        const std::vector<int> occ{0, 1};
        r.traj = evolve(l, basis, fock_density(basis, occ), 1000.0, 0.09 / opts.norm, opts);
        r.est = estimate_lifetime(r.traj, 1);
    });
    double trace = 0.0;
    for (const auto& r : runs)
        for (double d : r.traj.trace_defect) trace = std::max(trace, d);
    double inert = 0.0;
    for (std::size_t k = 2; k < 4; ++k)
        for (const auto& p : runs[k].traj.populations) inert = std::max(inert, std::abs(p[1] - 1.0));
    const auto& weak = runs[0].est;
    const auto& strong = runs[1].est;
    const bool ordered = strong.tau > weak.tau && std::isfinite(weak.tau);
    auto describe = [](const LifetimeEstimate& e) {
        return num(e.tau) + (e.growing ? " (population rising)" : " (population decaying)");
    };
    return {ordered && inert <= kInertAbs && trace <= kLifetimeTraceAbs,
            "tau_b(Gamma=4) = " + describe(weak) + ", tau_b(Gamma=16) = " + describe(strong) +
                "; U=0 bound-state drift = " + num(inert) + "; max trace defect = " + num(trace)};
}

Verdict arrowhead_vs_dense() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 150);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const SystemParams sys{0.1 + 1.9 * u(rng), 0.0};
        const auto sf = k % 2 ? SpectralFunction::shifted_sum(0.05 + 8.0 * u(rng), 1.0, {0.0, 1.5})
                              : SpectralFunction::rubin(0.05 + 8.0 * u(rng), 0.5 + u(rng));
        const auto m = build_arrowhead(sys, decompose(sf, size(rng)));
        const auto spec = eigenvalues(m, Exec::parallel, false);
        const auto ref = dense_eigen_oracle(m.dense());
        double err = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(spec.eigenvalues[i] - ref[i]));
        worst = std::max(worst, err / m.norm());
    }
    return {worst <= kOracleRel, "max |eig - oracle| / ||M|| over 50 instances = " + num(worst)};
}

} // namespace

int main() {
    criterion("single-RC closed forms", 1.0, single_rc_closed_forms);
    criterion("bound-state frequency match", 30.0, bound_state_match);
    criterion("bound ordering", 30.0, bound_ordering);
    criterion("interlacing and trace", 60.0, interlacing_and_trace);
    criterion("exact-oracle invariants", 10.0, exact_invariants);
    criterion("residue amplitude", 10.0, residue_amplitude_check);
    criterion("multi-gap census", 120.0, multi_gap_census);
    criterion("lifetime scaling", 300.0, lifetime_scaling);
    criterion("arrowhead vs dense oracle", 60.0, arrowhead_vs_dense);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
