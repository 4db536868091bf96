// excitation.cpp: arrowhead eigen-decomposition, bounds and mode mixing

#include "rcbound/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "rcbound/errors.hpp"

namespace rcbound {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct SecularProblem {
    double head;
    std::vector<double> poles; // strictly increasing
    std::vector<double> r2;    // squared (merged) arms
};

// Root of the secular function written relative to `origin`.
struct ShiftedRoot {
    double origin;
    double tau;
};

// f(τ) = α − (origin + τ) − Σ r_j² / (δ_j − τ), δ_j = d_j − origin.
struct ShiftedSecular {
    const SecularProblem& p;
    double origin;
    std::vector<double> delta;

    ShiftedSecular(const SecularProblem& prob, double o) : p(prob), origin(o), delta(prob.poles.size()) {
        for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = p.poles[j] - origin;
    }
    double value(double tau) const {
        double s = (p.head - origin) - tau;
        for (std::size_t j = 0; j < delta.size(); ++j) s -= p.r2[j] / (delta[j] - tau);
        return s;
    }
    double derivative(double tau) const {
        double s = -1.0;
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const double d = delta[j] - tau;
            s -= p.r2[j] / (d * d);
        }
        return s;
    }
};

[[noreturn]] void bracket_failure(std::size_t k, double lo, double hi, double flo, double fhi) {
    std::ostringstream os;
    os.precision(17);
    os << "arrowhead root " << k << ": bracket [" << lo << ", " << hi << "] does not enclose a sign change (f = " << flo
       << ", " << fhi << ")";
    throw InternalError(os.str());
}

// Root in (lo, hi) relative to origin; f decreases strictly across the bracket.
ShiftedRoot solve_bracket(const SecularProblem& p, std::size_t k, double origin, double lo, double hi) {
    ShiftedSecular f(p, origin);
    double flo = lo == 0.0 ? std::numeric_limits<double>::infinity() : f.value(lo);
    double fhi = hi == 0.0 ? -std::numeric_limits<double>::infinity() : f.value(hi);
    if (!(flo >= 0.0) || !(fhi <= 0.0)) bracket_failure(k, origin + lo, origin + hi, flo, fhi);
    if (flo == 0.0) return {origin, lo};
    if (fhi == 0.0) return {origin, hi};
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
        const double fm = f.value(mid);
        if (fm == 0.0) return {origin, mid};
        if (fm > 0.0) lo = mid;
        else hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    for (int step = 0; step < 2; ++step) {
        const double next = tau - f.value(tau) / f.derivative(tau);
        if (next > lo && next < hi && std::isfinite(next)) tau = next;
    }
    return {origin, tau};
}

struct Pole {
    double d;
    double z;
    std::size_t index; // position in the full matrix (1-based shaft index)
};

} // namespace

double ArrowheadMatrix::trace() const { return head + std::accumulate(shaft.begin(), shaft.end(), 0.0); }

double ArrowheadMatrix::norm() const {
    double s = head * head;
    for (double d : shaft) s += d * d;
    for (double z : arms) s += 2.0 * z * z;
    return std::sqrt(s);
}

Eigen::MatrixXd ArrowheadMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(0, 0) = head;
    for (Eigen::Index i = 1; i < n; ++i) {
        m(i, i) = shaft[i - 1];
        m(0, i) = m(i, 0) = arms[i - 1];
    }
    return m;
}

ArrowheadMatrix build_arrowhead(const SystemParams& sys, const RcDecomposition& dec) {
    sys.validate();
    if (dec.size() == 0) throw ConfigError("arrowhead needs at least one reaction coordinate");
    ArrowheadMatrix m;
    const double Om = sys.omega;
    m.head = Om * Om;
    for (const auto& mode : dec.modes()) {
        m.head += 4.0 * Om * mode.lambda * mode.lambda / mode.omega;
        m.shaft.push_back(mode.omega * mode.omega);
        m.arms.push_back(2.0 * mode.lambda * std::sqrt(Om * mode.omega));
    }
    return m;
}

double ExcitationSpectrum::energy(std::size_t q) const { return std::sqrt(eigenvalues.at(q)); }

ExcitationSpectrum eigenvalues(const ArrowheadMatrix& m, Exec exec, bool with_vectors) {
    const std::size_t n = m.shaft.size();
    if (m.arms.size() != n) throw ConfigError("arrowhead arms and shaft differ in length");
    const double norm = m.norm();
    const auto dim = static_cast<Eigen::Index>(n + 1);

    std::vector<Pole> poles;
    for (std::size_t i = 0; i < n; ++i) poles.push_back(Pole{m.shaft[i], m.arms[i], i + 1});
    std::stable_sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.d < b.d; });

    struct Eig {
        double value;
        Eigen::VectorXd vec;
    };
    std::vector<Eig> out;

    // Deflation of vanishing arms.
    std::vector<Pole> live;
    for (const Pole& p : poles) {
        if (std::abs(p.z) <= 1e-14 * norm) {
            Eig e{p.d, {}};
            if (with_vectors) {
                e.vec = Eigen::VectorXd::Zero(dim);
                e.vec(static_cast<Eigen::Index>(p.index)) = 1.0;
            }
            out.push_back(std::move(e));
        } else {
            live.push_back(p);
        }
    }

    // Clusters of (numerically) equal shaft entries: one representative pole with the
    // merged arm, plus eigenvalue d for each direction orthogonal to the cluster's arms.
    SecularProblem prob{m.head, {}, {}};
    std::vector<std::vector<Pole>> clusters;
    for (std::size_t i = 0; i < live.size();) {
        std::size_t j = i + 1;
        while (j < live.size() && live[j].d - live[i].d <= 1e-14 * norm) ++j;
        clusters.emplace_back(live.begin() + static_cast<std::ptrdiff_t>(i), live.begin() + static_cast<std::ptrdiff_t>(j));
        i = j;
    }
    for (const auto& c : clusters) {
        double r2 = 0.0;
        for (const Pole& p : c) r2 += p.z * p.z;
        prob.poles.push_back(c.front().d);
        prob.r2.push_back(r2);
        if (c.size() > 1) {
            const auto k = static_cast<Eigen::Index>(c.size());
            Eigen::VectorXd u(k);
            for (Eigen::Index a = 0; a < k; ++a) u(a) = c[a].z;
            u /= u.norm();
            // Householder reflector mapping u to ±e₁; its remaining columns span u⊥.
            Eigen::VectorXd v = u;
            v(0) += u(0) >= 0.0 ? 1.0 : -1.0;
            const double vv = v.squaredNorm();
            for (Eigen::Index col = 1; col < k; ++col) {
                Eig e{c.front().d, {}};
                if (with_vectors) {
                    e.vec = Eigen::VectorXd::Zero(dim);
                    for (Eigen::Index a = 0; a < k; ++a) {
                        const double h = (a == col ? 1.0 : 0.0) - 2.0 * v(a) * v(col) / vv;
                        e.vec(static_cast<Eigen::Index>(c[a].index)) = h;
                    }
                }
                out.push_back(std::move(e));
            }
        }
    }

    const std::size_t mcount = prob.poles.size();
    std::vector<ShiftedRoot> roots(mcount + 1);
    if (mcount == 0) {
        roots[0] = {m.head, 0.0};
    } else {
        double r2sum = 0.0;
        for (double r : prob.r2) r2sum += r;
        const double rnorm = std::sqrt(r2sum);
        const double first_lo = std::min(m.head, prob.poles.front()) - rnorm;
        const double dmax = prob.poles.back();
        const double half = 0.5 * (m.head - dmax);
        const double last_hi = 0.5 * (m.head + dmax) + std::sqrt(half * half + r2sum);

        for_each_index(static_cast<int>(mcount + 1), exec, [&](int ki) {
            const auto k = static_cast<std::size_t>(ki);
            if (k == 0) {
                const double o = prob.poles.front();
                roots[k] = solve_bracket(prob, k, o, first_lo - o - std::abs(first_lo - o) * 1e-12 - 1e-300, 0.0);
            } else if (k == mcount) {
                const double o = dmax;
                const double span = last_hi - o;
                roots[k] = solve_bracket(prob, k, o, 0.0, span * (1.0 + 1e-12) + 1e-300);
            } else {
                const double a = prob.poles[k - 1];
                const double b = prob.poles[k];
                const double mid = 0.5 * (a + b);
                ShiftedSecular fa(prob, a);
                if (fa.value(mid - a) > 0.0) roots[k] = solve_bracket(prob, k, b, mid - b, 0.0);
                else roots[k] = solve_bracket(prob, k, a, 0.0, mid - a);
            }
        });
    }

    for (std::size_t k = 0; k <= mcount; ++k) {
        const ShiftedRoot& r = roots[k];
        Eig e{r.origin + r.tau, {}};
        if (with_vectors) {
            e.vec = Eigen::VectorXd::Zero(dim);
            e.vec(0) = 1.0;
            for (const auto& c : clusters) {
                for (const Pole& p : c) {
                    // z_j / (σ − d_j) with σ − d_j = τ − (d_j − origin).
                    const double gap = r.tau - (p.d - r.origin);
                    e.vec(static_cast<Eigen::Index>(p.index)) = p.z / gap;
                }
            }
            e.vec /= e.vec.norm();
            if (e.vec(0) > 0.0) e.vec = -e.vec;
        }
        out.push_back(std::move(e));
    }

    std::stable_sort(out.begin(), out.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });
    ExcitationSpectrum spec;
    spec.eigenvalues.reserve(out.size());
    if (with_vectors) spec.vectors.resize(dim, dim);
    for (std::size_t q = 0; q < out.size(); ++q) {
        spec.eigenvalues.push_back(out[q].value);
        if (with_vectors) {
            Eigen::VectorXd v = out[q].vec;
            if (v(0) > 0.0) v = -v;
            spec.vectors.col(static_cast<Eigen::Index>(q)) = v;
        }
    }
    return spec;
}

EigenvalueBounds bounds_largest(const ArrowheadMatrix& m) {
    EigenvalueBounds b;
    b.loose_lower = m.head;
    double beta2 = 0.0, weighted = 0.0, dmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.shaft.size(); ++i) {
        beta2 += m.arms[i] * m.arms[i];
        weighted += m.arms[i] * m.arms[i] * m.shaft[i];
        dmax = std::max(dmax, m.shaft[i]);
    }
    if (beta2 == 0.0) {
        b.tight_lower = m.head;
        b.upper = std::max(m.head, dmax);
        return b;
    }
    const double shaft = weighted / beta2;
    const double h1 = 0.5 * (m.head - shaft);
    b.tight_lower = 0.5 * (m.head + shaft) + std::sqrt(h1 * h1 + beta2);
    const double h2 = 0.5 * (m.head - dmax);
    b.upper = 0.5 * (m.head + dmax) + std::sqrt(h2 * h2 + beta2);
    return b;
}

EigenvalueBounds bounds_largest_continuum(const SpectralFunction& sf, const SystemParams& sys,
                                          const QuadOptions& opts) {
    sys.validate();
    const double Om = sys.omega;
    double inv = 0.0, first = 0.0, third = 0.0;
    for (const Band& b : sf.bands()) {
        if (!b.finite()) throw ConfigError("continuum bounds need a bounded support");
        inv += spectral_moment(sf, -1, b, opts);
        first += spectral_moment(sf, 1, b, opts);
        third += spectral_moment(sf, 3, b, opts);
    }
    EigenvalueBounds out;
    out.loose_lower = Om * Om + 2.0 * Om / std::numbers::pi * inv;
    const double beta2 = 2.0 * Om / std::numbers::pi * first;
    const double a = out.loose_lower;
    if (beta2 == 0.0) {
        out.tight_lower = a;
        out.upper = std::max(a, sf.support_top() * sf.support_top());
        return out;
    }
    const double shaft = third / first;
    const double h1 = 0.5 * (a - shaft);
    out.tight_lower = 0.5 * (a + shaft) + std::sqrt(h1 * h1 + beta2);
    const double top2 = sf.support_top() * sf.support_top();
    const double h2 = 0.5 * (a - top2);
    out.upper = 0.5 * (a + top2) + std::sqrt(h2 * h2 + beta2);
    return out;
}

std::vector<BogoliubovPair> mode_mixing(const ExcitationSpectrum& spec, const SystemParams& sys) {
    sys.validate();
    if (spec.vectors.size() == 0) throw StateError("mode_mixing needs eigenvectors");
    std::vector<BogoliubovPair> out;
    for (std::size_t q = 0; q < spec.size(); ++q) {
        const double eps = spec.energy(q);
        const double a = std::sqrt(sys.omega / eps);
        const double b = std::sqrt(eps / sys.omega);
        const double w = spec.system_weight(q);
        out.push_back(BogoliubovPair{w, w * 0.5 * (a + b), w * 0.5 * (a - b)});
    }
    return out;
}

std::vector<GapCount> gap_census(std::span<const double> eps_sq, std::span<const Band> gaps, double edge_tol) {
    std::vector<GapCount> out;
    for (const Band& g : gaps) {
        GapCount c;
        c.gap = g;
        const double lo = g.lo * g.lo;
        const double hi = g.finite() ? g.hi * g.hi : std::numeric_limits<double>::infinity();
        for (double e : eps_sq) {
            if (e <= lo - edge_tol || e >= hi + edge_tol) continue;
            if (std::abs(e - lo) <= edge_tol || (g.finite() && std::abs(e - hi) <= edge_tol)) {
                c.edge_flag = true;
                continue;
            }
            ++c.count;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace rcbound
