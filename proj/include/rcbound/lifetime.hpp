// lifetime.hpp: anharmonic supersystem in its eigenmode Fock basis, secular and
// partial-secular master equations, RK4 propagation and bound-state lifetime fits

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rcbound/excitation.hpp"
#include "rcbound/parallel.hpp"
#include "rcbound/quadrature.hpp"
#include "rcbound/rcmap.hpp"

namespace rcbound {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx>;

/// How (a + a†) and (B_i + B_i†) are expanded in eigenmodes.
enum class MixingForm {
    exact,          ///< Λ_{jq} √(Ω_j/ε_q) from the arrowhead eigenvectors
    strong_coupling ///< single-RC strong-coupling reduction: a + a† ≈ −(ω_c/Γ)^{1/4} Σ(c_q + c_q†)
};

struct SupersystemOptions {
    MixingForm mixing{MixingForm::exact};
    double lamb_shift{0.0}; ///< Δε added to the bound-state mode energy
};

struct SupersystemModel {
    explicit SupersystemModel(RcDecomposition dec) : decomposition(std::move(dec)) {}

    std::vector<double> energies;                 ///< ε_q ascending; the last mode is the bound-state candidate
    std::vector<double> system_coeffs;            ///< a + a† = Σ_q system_coeffs[q] (c_q + c_q†)
    std::vector<std::vector<double>> rc_coeffs;   ///< B_i + B_i† = Σ_q rc_coeffs[i][q] (c_q + c_q†)
    std::vector<BogoliubovPair> mixing;           ///< Bogoliubov pairs of a
    double anharmonicity{0.0};                    ///< U multiplying (a + a†)⁴
    double temperature{0.0};
    double lamb_shift{0.0};
    MixingForm form{MixingForm::exact};
    RcDecomposition decomposition;

    std::size_t mode_count() const noexcept { return energies.size(); }
    std::size_t bs_index() const noexcept { return energies.size() - 1; }
    /// True when the top mode lies above the spectral support.
    bool bound_state_in_gap() const;
    /// Residual spectral function of RC i at positive frequency.
    double residual(std::size_t i, double w, const QuadOptions& opts = {}) const;
};

SupersystemModel build_supersystem(const SystemParams& sys, const RcDecomposition& dec, double anharmonicity,
                                   const SupersystemOptions& opts = {});

/// Product Fock basis with per-mode truncation; mode 0 varies fastest.
class FockBasis {
public:
    explicit FockBasis(std::vector<int> n_max);
    FockBasis(std::size_t modes, int n_max);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t modes() const noexcept { return n_max_.size(); }
    const std::vector<int>& n_max() const noexcept { return n_max_; }
    int occupation(std::size_t index, std::size_t mode) const;
    std::size_t index(std::span<const int> occupations) const;

    SparseOp lowering(std::size_t mode) const;
    SparseOp number(std::size_t mode) const;
    SparseOp identity() const;

private:
    std::vector<int> n_max_;
    std::vector<std::size_t> stride_;
    std::size_t dim_{1};
};

/// Pairing of band-mode components in the partial-secular generator.
enum class RedfieldPairing {
    co_rotating, ///< Redfield cross terms between components of equal frequency sign
    full         ///< Redfield cross terms between all band-mode components
};

struct GeneratorOptions {
    bool include_principal_parts{false}; ///< add the iS(ω) part of the half-sided Fourier transform
    RedfieldPairing pairing{RedfieldPairing::co_rotating};
    QuadOptions quad{1e-8, 0.0, 60, 4000};
};

/// L(ρ) = Kρ + ρK† + Σ_j (P_j ρ Q_j† + Q_j ρ P_j†).
class Liouvillian {
public:
    Liouvillian(SparseOp k, std::vector<std::pair<SparseOp, SparseOp>> jumps);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(k_.rows()); }
    const SparseOp& k() const noexcept { return k_; }
    const std::vector<std::pair<SparseOp, SparseOp>>& jumps() const noexcept { return jumps_; }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    Eigen::MatrixXcd apply_adjoint(const Eigen::MatrixXcd& x) const;
    /// L(ρ) for Hermitian ρ, using L(ρ) = Z + Z† with Z = ρK† + Σ Q ρ P†.
    void apply_hermitian(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out, Eigen::MatrixXcd& work) const;
    /// Spectral-norm estimate by power iteration on L†L.
    double norm_estimate(int iterations = 80) const;

private:
    SparseOp k_;
    std::vector<std::pair<SparseOp, SparseOp>> jumps_;
    SparseOp k_adj_;
    std::vector<std::pair<SparseOp, SparseOp>> jumps_adj_; ///< (Q†, P†)
};

/// Hamiltonian Σ ε_q n_q + U (a + a†)⁴ + Δε n_BS in the truncated basis.
SparseOp supersystem_hamiltonian(const SupersystemModel& model, const FockBasis& basis);

/// LGKS generator with every Bohr component treated secularly.
Liouvillian build_generator_secular(const SupersystemModel& model, const FockBasis& basis,
                                    const GeneratorOptions& opts = {});

/// Secular treatment of the bound-state mode, Redfield form for the band modes.
Liouvillian build_generator_partial_secular(const SupersystemModel& model, const FockBasis& basis,
                                            const GeneratorOptions& opts = {});

/// |n⟩⟨n| for the given per-mode occupations.
Eigen::MatrixXcd fock_density(const FockBasis& basis, std::span<const int> occupations);

struct EvolveOptions {
    int records{1000};            ///< approximate number of recorded samples
    double norm{0.0};             ///< precomputed ‖L‖; estimated when zero
    double trace_tolerance{1e-6};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> populations; ///< [sample][mode]
    std::vector<double> trace_defect;             ///< |tr ρ − 1|
    std::vector<double> hermiticity_defect;       ///< max |ρ − ρ†|
    double min_population{0.0};
    bool negativity_flag{false}; ///< a population fell below −1e-8
    double dt{0.0};
    long steps{0};
    Eigen::MatrixXcd final_state;
};

/// Fixed-step RK4 for dρ/dt = L ρ. Requires dt ‖L‖ < 0.1.
Trajectory evolve(const Liouvillian& l, const FockBasis& basis, const Eigen::MatrixXcd& rho0, double t_final,
                  double dt, const EvolveOptions& opts = {});

struct LifetimeEstimate {
    double tau{0.0};          ///< 1/|d ln P/dt|; +inf when the change is unresolved within the window
    double fit_residual{0.0}; ///< RMS residual of the log-linear fit
    bool exceeds_window{false};
    bool envelope_fit{false}; ///< the population was non-monotone; fitted on its local maxima
    bool growing{false};      ///< the fitted population rises instead of decaying
};

LifetimeEstimate estimate_lifetime(const Trajectory& traj, std::size_t mode, double burn_in_fraction = 0.1);

} // namespace rcbound
