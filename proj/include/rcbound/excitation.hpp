// excitation.hpp: arrowhead excitation matrix of the supersystem, its eigen-decomposition
// by secular-equation root isolation, eigenvalue bounds, mode mixing and gap census

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rcbound/exact.hpp"
#include "rcbound/parallel.hpp"
#include "rcbound/rcmap.hpp"
#include "rcbound/spectral.hpp"

namespace rcbound {

/// Symmetric arrowhead: head α at (0,0), diagonal shaft d_i, arms z_i in row/column 0.
struct ArrowheadMatrix {
    double head{0.0};
    std::vector<double> shaft;
    std::vector<double> arms;

    std::size_t size() const noexcept { return shaft.size() + 1; }
    double trace() const;
    /// Frobenius norm.
    double norm() const;
    Eigen::MatrixXd dense() const;
};

/// Head Ω² + Σ 4Ωλ_i²/Ω_i, shaft Ω_i², arms 2λ_i √(ΩΩ_i).
ArrowheadMatrix build_arrowhead(const SystemParams& sys, const RcDecomposition& dec);

struct ExcitationSpectrum {
    std::vector<double> eigenvalues; ///< ε_q², ascending
    Eigen::MatrixXd vectors;         ///< column q is the eigenvector of ε_q²; row 0 is the system component
    std::size_t size() const noexcept { return eigenvalues.size(); }
    double energy(std::size_t q) const;
    /// Λ_{1q}: system component of mode q.
    double system_weight(std::size_t q) const { return vectors(0, static_cast<Eigen::Index>(q)); }
};

/// Eigen-decomposition by deflation and bracketed secular-equation roots.
/// Eigenvectors carry the sign convention Λ_{1q} ≤ 0.
ExcitationSpectrum eigenvalues(const ArrowheadMatrix& m, Exec exec = Exec::parallel, bool with_vectors = true);

/// Cyclic Jacobi rotations on a dense symmetric matrix; sorted eigenvalues.
std::vector<double> dense_eigen_oracle(const Eigen::MatrixXd& m);

struct EigenvalueBounds {
    double loose_lower{0.0};
    double tight_lower{0.0};
    double upper{0.0};
};

/// Bounds on the largest eigenvalue from the discrete matrix.
EigenvalueBounds bounds_largest(const ArrowheadMatrix& m);

/// Continuum limit of the same bounds; the upper bound uses the top band edge.
EigenvalueBounds bounds_largest_continuum(const SpectralFunction& sf, const SystemParams& sys,
                                          const QuadOptions& opts = {});

/// Coefficients of a = Σ_q (u_q c_q + v_q c_q†).
struct BogoliubovPair {
    double weight{0.0}; ///< Λ_{1q}
    double u{0.0};
    double v{0.0};
};

std::vector<BogoliubovPair> mode_mixing(const ExcitationSpectrum& spec, const SystemParams& sys);

struct GapCount {
    Band gap;              ///< in ω; the top gap has hi = +inf
    int count{0};          ///< eigenvalues strictly inside (gap.lo², gap.hi²)
    bool edge_flag{false}; ///< an eigenvalue within the edge tolerance was counted as in-band
};

std::vector<GapCount> gap_census(std::span<const double> eps_sq, std::span<const Band> gaps,
                                 double edge_tol = 1e-9);

struct SweepRow {
    double gamma{0.0};
    std::vector<double> eigenvalues;
    EigenvalueBounds bounds;
    double omega_b_sq_exact{0.0}; ///< NaN when no bound state exists above the support
    bool bs_exists{false};
    std::vector<GapCount> census;
};

struct SweepTable {
    std::vector<Band> gaps;
    std::vector<SweepRow> rows;
};

/// Coupling sweep. The decomposition is computed once at unit amplitude and
/// rescaled per grid point; rows are ordered as the grid.
SweepTable sweep(const SystemParams& sys, const SpectralFunction& sf, std::span<const double> gammas,
                 std::span<const int> counts, Exec exec = Exec::parallel, const ExactOptions& exact_opts = {});

} // namespace rcbound
