// lifetime.cpp: supersystem construction, RK4 propagation and lifetime fits

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcbound/errors.hpp"
#include "rcbound/lifetime.hpp"

namespace rcbound {

bool SupersystemModel::bound_state_in_gap() const {
    const double e = energies.back();
    for (const Band& b : decomposition.source().bands())
        if (b.contains(e)) return false;
    return true;
}

double SupersystemModel::residual(std::size_t i, double w, const QuadOptions& opts) const {
    return residual_gamma(decomposition, i, w, opts).value;
}

SupersystemModel build_supersystem(const SystemParams& sys, const RcDecomposition& dec, double anharmonicity,
                                   const SupersystemOptions& opts) {
    sys.validate();
    if (!std::isfinite(anharmonicity)) throw ConfigError("anharmonicity must be finite");
    if (!std::isfinite(opts.lamb_shift)) throw ConfigError("lamb_shift must be finite");

    const ExcitationSpectrum spec = eigenvalues(build_arrowhead(sys, dec), Exec::serial, true);
    const std::size_t n_modes = spec.size();
    const std::size_t n_rc = dec.size();

    SupersystemModel m(dec);
    m.anharmonicity = anharmonicity;
    m.temperature = sys.temperature;
    m.lamb_shift = opts.lamb_shift;
    m.form = opts.mixing;
    m.mixing = mode_mixing(spec, sys);
    m.energies.resize(n_modes);
    for (std::size_t q = 0; q < n_modes; ++q) m.energies[q] = spec.energy(q);
    m.system_coeffs.assign(n_modes, 0.0);
    m.rc_coeffs.assign(n_rc, std::vector<double>(n_modes, 0.0));

    if (opts.mixing == MixingForm::strong_coupling) {
        const SpectralFunction& sf = dec.source();
        if (n_rc != 1 || sf.kind() != SpectralKind::rubin)
            throw ConfigError("strong-coupling mixing needs a single RC of a Rubin spectral function");
        const double s = std::pow(sf.cutoff() / sf.amplitude(), 0.25);
        m.system_coeffs = {-s, -s};
        m.rc_coeffs[0] = {1.0 / s, 0.0};
        return m;
    }

    for (std::size_t q = 0; q < n_modes; ++q) {
        const auto col = static_cast<Eigen::Index>(q);
        const double e = m.energies[q];
        m.system_coeffs[q] = spec.vectors(0, col) * std::sqrt(sys.omega / e);
        for (std::size_t i = 0; i < n_rc; ++i)
            m.rc_coeffs[i][q] = spec.vectors(static_cast<Eigen::Index>(i + 1), col) * std::sqrt(dec[i].omega / e);
    }
    return m;
}

namespace {

std::vector<double> mode_populations(const Eigen::MatrixXcd& rho, const FockBasis& basis) {
    std::vector<double> pop(basis.modes(), 0.0);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const double p = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        for (std::size_t q = 0; q < basis.modes(); ++q) pop[q] += p * basis.occupation(i, q);
    }
    return pop;
}

} // namespace

Trajectory evolve(const Liouvillian& l, const FockBasis& basis, const Eigen::MatrixXcd& rho0, double t_final,
                  double dt, const EvolveOptions& opts) {
    const auto n = static_cast<Eigen::Index>(l.dim());
    if (l.dim() != basis.dim() || rho0.rows() != n || rho0.cols() != n)
        throw ConfigError("initial state dimension does not match the generator");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive and finite");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (opts.records < 1) throw ConfigError("records must be at least 1");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("initial state is not Hermitian");

    const double norm = opts.norm > 0.0 ? opts.norm : l.norm_estimate();
    if (!(dt * norm < 0.1)) {
        std::ostringstream os;
        os << "step too large: dt*|L| = " << dt * norm << " (|L| = " << norm << "), need < 0.1";
        throw ConfigError(os.str());
    }

    Trajectory tr;
    tr.steps = std::max<long>(1, static_cast<long>(std::ceil(t_final / dt - 1e-9)));
    tr.dt = t_final / static_cast<double>(tr.steps);
    const long stride = std::max<long>(1, tr.steps / opts.records);
    const double h = tr.dt;

    Eigen::MatrixXcd rho = rho0;
    Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n), work(n, n);
    tr.min_population = std::numeric_limits<double>::infinity();

    auto record = [&](long step) {
        const double t = static_cast<double>(step) * h;
        tr.times.push_back(t);
        tr.populations.push_back(mode_populations(rho, basis));
        const double defect = std::abs(rho.trace() - cplx(1.0, 0.0));
        tr.trace_defect.push_back(defect);
        tr.hermiticity_defect.push_back((rho - rho.adjoint()).cwiseAbs().maxCoeff());
        const double lo = rho.diagonal().real().minCoeff();
        tr.min_population = std::min(tr.min_population, lo);
        if (lo < -1e-8) tr.negativity_flag = true;
        if (defect > opts.trace_tolerance) {
            std::ostringstream os;
            os << "trace drifted by " << defect << " at t = " << t;
            throw StepSizeError(os.str());
        }
    };

    record(0);
    for (long s = 1; s <= tr.steps; ++s) {
        l.apply_hermitian(rho, k1, work);
        tmp = rho + (0.5 * h) * k1;
        l.apply_hermitian(tmp, k2, work);
        tmp = rho + (0.5 * h) * k2;
        l.apply_hermitian(tmp, k3, work);
        tmp = rho + h * k3;
        l.apply_hermitian(tmp, k4, work);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % stride == 0 || s == tr.steps) record(s);
    }
    tr.final_state = std::move(rho);
    return tr;
}

LifetimeEstimate estimate_lifetime(const Trajectory& traj, std::size_t mode, double burn_in_fraction) {
    if (traj.times.size() < 3) throw ConfigError("trajectory has fewer than 3 samples");
    if (mode >= traj.populations.front().size()) throw ConfigError("mode index out of range");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) throw ConfigError("burn_in_fraction must be in [0, 1)");

    const double t0 = traj.times.front() + burn_in_fraction * (traj.times.back() - traj.times.front());
    std::vector<double> ts, ps;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double p = traj.populations[k][mode];
        if (traj.times[k] >= t0 && p > 0.0) {
            ts.push_back(traj.times[k]);
            ps.push_back(p);
        }
    }
    if (ts.size() < 3) throw ConfigError("too few positive samples after burn-in for a lifetime fit");

    LifetimeEstimate est;
    bool monotone = true;
    for (std::size_t k = 1; k < ps.size(); ++k)
        if (ps[k] > ps[k - 1] * (1.0 + 1e-12) + 1e-15) monotone = false;
    if (!monotone) {
        std::vector<double> mt, mp;
        for (std::size_t k = 1; k + 1 < ps.size(); ++k) {
            if (ps[k] >= ps[k - 1] && ps[k] >= ps[k + 1]) {
                mt.push_back(ts[k]);
                mp.push_back(ps[k]);
            }
        }
        if (mt.size() >= 3) {
            ts = std::move(mt);
            ps = std::move(mp);
            est.envelope_fit = true;
        }
    }

    const double m = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double y = std::log(ps[k]);
        st += ts[k];
        sy += y;
        stt += ts[k] * ts[k];
        sty += ts[k] * y;
    }
    const double denom = m * stt - st * st;
    const double slope = (m * sty - st * sy) / denom;
    const double icpt = (sy - slope * st) / m;
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = std::log(ps[k]) - (icpt + slope * ts[k]);
        ss += r * r;
    }
    est.fit_residual = std::sqrt(ss / m);

    const double span = ts.back() - ts.front();
    est.growing = slope > 0.0;
    if (std::abs(slope) * span < 1e-9) {
        est.tau = std::numeric_limits<double>::infinity();
        est.exceeds_window = true;
    } else {
        est.tau = 1.0 / std::abs(slope);
    }
    return est;
}

} // namespace rcbound
