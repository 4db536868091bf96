// liouvillian.cpp: Fock-space operators and master-equation generators of the supersystem

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rcbound/errors.hpp"
#include "rcbound/lifetime.hpp"

namespace rcbound {

namespace {

using Triplet = Eigen::Triplet<cplx>;

struct Component {
    std::size_t mode;
    bool raising;  // c_q† (frequency −ε_q) instead of c_q (+ε_q)
    double omega;
    double alpha;
};

double thermal_occupation(double temperature, double w) {
    return temperature > 0.0 ? bose_occupation(temperature, w) : 0.0;
}

// S(ω) = (1/2π) P∫ γ(ω')/(ω − ω') dω' over the residual band of RC `bath` and its mirror.
double principal_shift(const SupersystemModel& model, std::size_t bath, double omega, const QuadOptions& q) {
    const Band cell = model.decomposition[bath].interval;
    const double T = model.temperature;
    auto emission = [&](double u) { return model.residual(bath, u, q) * (1.0 + thermal_occupation(T, u)); };
    double s = -principal_value(emission, omega, std::span(&cell, 1), q);
    if (T > 0.0) {
        auto absorption = [&](double u) { return model.residual(bath, u, q) * thermal_occupation(T, u); };
        s += principal_value(absorption, -omega, std::span(&cell, 1), q);
    }
    return s / (2.0 * std::numbers::pi);
}

// Γ̃(ω) = γ(ω)/2 + iS(ω) for the residual bath of RC `bath`.
cplx half_fourier(const SupersystemModel& model, std::size_t bath, double omega, const GeneratorOptions& opts) {
    const double e = std::abs(omega);
    const double g = model.residual(bath, e, opts.quad);
    const double n = thermal_occupation(model.temperature, e);
    const double rate = omega > 0.0 ? g * (1.0 + n) : g * n;
    cplx out(0.5 * rate, 0.0);
    if (opts.include_principal_parts) out += cplx(0.0, principal_shift(model, bath, omega, opts.quad));
    return out;
}

std::vector<Component> components_for(const SupersystemModel& model, std::size_t bath) {
    std::vector<Component> out;
    for (std::size_t q = 0; q < model.mode_count(); ++q) {
        const double a = model.rc_coeffs[bath][q];
        if (a == 0.0) continue;
        out.push_back(Component{q, false, model.energies[q], a});
        out.push_back(Component{q, true, -model.energies[q], a});
    }
    return out;
}

class GeneratorAssembly {
public:
    GeneratorAssembly(const SupersystemModel& model, const FockBasis& basis, const GeneratorOptions& opts)
        : model_(model), opts_(opts) {
        for (std::size_t q = 0; q < basis.modes(); ++q) {
            lower_.push_back(basis.lowering(q));
            raise_.push_back(SparseOp(lower_.back().adjoint()));
        }
        k_ = SparseOp(cplx(0.0, -1.0) * supersystem_hamiltonian(model, basis));
    }

    void add_group(std::size_t bath, const std::vector<Component>& group) {
        if (group.empty()) return;
        const auto n = lower_.front().rows();
        SparseOp g(n, n), b(n, n);
        bool active = false;
        for (const auto& c : group) {
            const cplx gt = half_fourier(model_, bath, c.omega, opts_);
            const SparseOp& op = c.raising ? raise_[c.mode] : lower_[c.mode];
            b += c.alpha * op;
            if (gt != cplx(0.0, 0.0)) {
                g += (gt * c.alpha) * op;
                active = true;
            }
        }
        if (!active) return;
        g.prune(cplx(0.0, 0.0));
        b.prune(cplx(0.0, 0.0));
        k_ -= SparseOp(b.adjoint()) * g;
        jumps_.emplace_back(std::move(g), std::move(b));
    }

    Liouvillian finish() {
        k_.prune(cplx(0.0, 0.0));
        return Liouvillian(std::move(k_), std::move(jumps_));
    }

private:
    const SupersystemModel& model_;
    const GeneratorOptions& opts_;
    std::vector<SparseOp> lower_;
    std::vector<SparseOp> raise_;
    SparseOp k_;
    std::vector<std::pair<SparseOp, SparseOp>> jumps_;
};

// out += a * s with s column-major; Eigen's generic dense-sparse product is slow at these sizes.
void accumulate_dense_sparse(const Eigen::MatrixXcd& a, const SparseOp& s, Eigen::MatrixXcd& out) {
    const Eigen::Index rows = a.rows();
    for (Eigen::Index c = 0; c < s.outerSize(); ++c) {
        double* o = reinterpret_cast<double*>(out.col(c).data());
        for (SparseOp::InnerIterator e(s, c); e; ++e) {
            const double vr = e.value().real();
            const double vi = e.value().imag();
            const double* r = reinterpret_cast<const double*>(a.col(e.index()).data());
            for (Eigen::Index k = 0; k < rows; ++k) {
                const double x = r[2 * k];
                const double y = r[2 * k + 1];
                o[2 * k] += vr * x - vi * y;
                o[2 * k + 1] += vr * y + vi * x;
            }
        }
    }
}

void check_basis(const SupersystemModel& model, const FockBasis& basis) {
    if (basis.modes() != model.mode_count())
        throw ConfigError("Fock basis mode count does not match the supersystem");
}

} // namespace

FockBasis::FockBasis(std::vector<int> n_max) : n_max_(std::move(n_max)) {
    if (n_max_.empty()) throw ConfigError("Fock basis needs at least one mode");
    for (int n : n_max_) {
        if (n < 1) throw ConfigError("per-mode truncation n_max must be at least 1");
        stride_.push_back(dim_);
        dim_ *= static_cast<std::size_t>(n + 1);
        if (dim_ > 20000) throw ConfigError("Fock space dimension exceeds 20000");
    }
}

FockBasis::FockBasis(std::size_t modes, int n_max) : FockBasis(std::vector<int>(modes, n_max)) {}

int FockBasis::occupation(std::size_t index, std::size_t mode) const {
    return static_cast<int>((index / stride_[mode]) % static_cast<std::size_t>(n_max_[mode] + 1));
}

std::size_t FockBasis::index(std::span<const int> occupations) const {
    if (occupations.size() != n_max_.size()) throw ConfigError("occupation list length does not match the mode count");
    std::size_t idx = 0;
    for (std::size_t q = 0; q < n_max_.size(); ++q) {
        if (occupations[q] < 0 || occupations[q] > n_max_[q]) throw ConfigError("occupation outside the truncation");
        idx += stride_[q] * static_cast<std::size_t>(occupations[q]);
    }
    return idx;
}

SparseOp FockBasis::lowering(std::size_t mode) const {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < dim_; ++i) {
        const int n = occupation(i, mode);
        if (n > 0) t.emplace_back(static_cast<int>(i - stride_[mode]), static_cast<int>(i), std::sqrt(double(n)));
    }
    SparseOp op(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

SparseOp FockBasis::number(std::size_t mode) const {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < dim_; ++i) {
        const int n = occupation(i, mode);
        if (n > 0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), double(n));
    }
    SparseOp op(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

SparseOp FockBasis::identity() const {
    SparseOp op(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    op.setIdentity();
    return op;
}

SparseOp supersystem_hamiltonian(const SupersystemModel& model, const FockBasis& basis) {
    check_basis(model, basis);
    const auto n = static_cast<Eigen::Index>(basis.dim());
    SparseOp h(n, n);
    SparseOp x(n, n);
    for (std::size_t q = 0; q < model.mode_count(); ++q) {
        double e = model.energies[q];
        if (q == model.bs_index()) e += model.lamb_shift;
        h += e * basis.number(q);
        const SparseOp c = basis.lowering(q);
        x += model.system_coeffs[q] * (c + SparseOp(c.adjoint()));
    }
    if (model.anharmonicity != 0.0) {
        const SparseOp x2 = x * x;
        h += model.anharmonicity * SparseOp(x2 * x2);
    }
    h.prune(cplx(0.0, 0.0));
    return h;
}

Liouvillian build_generator_secular(const SupersystemModel& model, const FockBasis& basis,
                                    const GeneratorOptions& opts) {
    check_basis(model, basis);
    const double e_bs = model.energies[model.bs_index()];
    for (std::size_t i = 0; i < model.decomposition.size(); ++i) {
        if (model.rc_coeffs[i][model.bs_index()] != 0.0 && model.decomposition[i].interval.interior(e_bs))
            throw ConfigError("bound-state mode lies inside a residual band; use the partial-secular generator");
    }
    GeneratorAssembly asmb(model, basis, opts);
    for (std::size_t i = 0; i < model.decomposition.size(); ++i) {
        for (const auto& c : components_for(model, i)) asmb.add_group(i, {c});
    }
    return asmb.finish();
}

Liouvillian build_generator_partial_secular(const SupersystemModel& model, const FockBasis& basis,
                                            const GeneratorOptions& opts) {
    check_basis(model, basis);
    if (model.decomposition.size() > 3) throw ConfigError("partial-secular generator supports at most 3 RCs");
    const std::size_t bs = model.bs_index();
    double band_top = 0.0;
    for (std::size_t q = 0; q < bs; ++q) band_top = std::max(band_top, model.energies[q]);
    double max_rate = 0.0;
    for (std::size_t i = 0; i < model.decomposition.size(); ++i)
        max_rate = std::max(max_rate, residual_max(model.decomposition, i, 64, opts.quad));
    if (!(model.energies[bs] - band_top > max_rate)) {
        std::ostringstream os;
        os << "bound-state mode is not isolated: separation " << model.energies[bs] - band_top
           << " does not exceed the largest residual rate " << max_rate;
        throw ConfigError(os.str());
    }

    GeneratorAssembly asmb(model, basis, opts);
    for (std::size_t i = 0; i < model.decomposition.size(); ++i) {
        std::vector<Component> up, down;
        for (const auto& c : components_for(model, i)) {
            if (c.mode == bs) asmb.add_group(i, {c});
            else if (opts.pairing == RedfieldPairing::full || c.omega > 0.0) up.push_back(c);
            else down.push_back(c);
        }
        asmb.add_group(i, up);
        asmb.add_group(i, down);
    }
    return asmb.finish();
}

Liouvillian::Liouvillian(SparseOp k, std::vector<std::pair<SparseOp, SparseOp>> jumps)
    : k_(std::move(k)), jumps_(std::move(jumps)) {
    k_.makeCompressed();
    k_adj_ = k_.adjoint();
    k_adj_.makeCompressed();
    for (const auto& [p, q] : jumps_) {
        SparseOp qa = q.adjoint(), pa = p.adjoint();
        qa.makeCompressed();
        pa.makeCompressed();
        jumps_adj_.emplace_back(std::move(qa), std::move(pa));
    }
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = k_ * rho;
    out += rho * SparseOp(k_.adjoint());
    for (const auto& [p, q] : jumps_) {
        const SparseOp pa = p.adjoint();
        const SparseOp qa = q.adjoint();
        Eigen::MatrixXcd t = p * rho;
        out += t * qa;
        t = q * rho;
        out += t * pa;
    }
    return out;
}

Eigen::MatrixXcd Liouvillian::apply_adjoint(const Eigen::MatrixXcd& x) const {
    const SparseOp ka = k_.adjoint();
    Eigen::MatrixXcd out = ka * x;
    out += x * k_;
    for (const auto& [p, q] : jumps_) {
        const SparseOp pa = p.adjoint();
        const SparseOp qa = q.adjoint();
        Eigen::MatrixXcd t = pa * x;
        out += t * q;
        t = qa * x;
        out += t * p;
    }
    return out;
}

void Liouvillian::apply_hermitian(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out, Eigen::MatrixXcd& work) const {
    out.setZero();
    accumulate_dense_sparse(rho, k_adj_, out);
    for (const auto& [qa, pa] : jumps_adj_) {
        work.setZero();
        accumulate_dense_sparse(rho, qa, work);
        work.adjointInPlace();
        accumulate_dense_sparse(work, pa, out);
    }
    work = out.adjoint();
    out += work;
}

double Liouvillian::norm_estimate(int iterations) const {
    const auto n = static_cast<Eigen::Index>(dim());
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd v(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) v(i, j) = cplx(g(rng), g(rng));
    v /= v.norm();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXcd w = apply_adjoint(apply(v));
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        est = std::sqrt(nw);
        v = w / nw;
    }
    return est;
}

Eigen::MatrixXcd fock_density(const FockBasis& basis, std::span<const int> occupations) {
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    const auto i = static_cast<Eigen::Index>(basis.index(occupations));
    rho(i, i) = 1.0;
    return rho;
}

} // namespace rcbound
