// sweep.cpp: coupling sweeps of the excitation spectrum with exact bound-state reference

#include <cmath>
#include <limits>

#include "rcbound/errors.hpp"
#include "rcbound/excitation.hpp"

namespace rcbound {

SweepTable sweep(const SystemParams& sys, const SpectralFunction& sf, std::span<const double> gammas,
                 std::span<const int> counts, Exec exec, const ExactOptions& exact_opts) {
    sys.validate();
    if (gammas.empty()) throw ConfigError("sweep: coupling grid is empty");
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        if (!(gammas[k] > 0.0)) throw ConfigError("sweep: coupling values must be positive");
        if (k > 0 && !(gammas[k] > gammas[k - 1])) throw ConfigError("sweep: coupling grid must be ascending");
    }
    const auto unit = decompose(sf.with_amplitude(1.0), counts, exec);

    SweepTable table;
    table.gaps = band_gaps(sf, std::numeric_limits<double>::infinity());
    table.rows.resize(gammas.size());
    for_each_index(static_cast<int>(gammas.size()), exec, [&](int k) {
        SweepRow& row = table.rows[static_cast<std::size_t>(k)];
        row.gamma = gammas[static_cast<std::size_t>(k)];
        const auto dec = unit.with_amplitude(row.gamma);
        const auto m = build_arrowhead(sys, dec);
        row.eigenvalues = eigenvalues(m, Exec::serial, false).eigenvalues;
        row.bounds = bounds_largest(m);
        const auto scaled = sf.with_amplitude(row.gamma);
        row.bs_exists = bound_state_exists(scaled, sys, exact_opts);
        row.omega_b_sq_exact = std::numeric_limits<double>::quiet_NaN();
        if (row.bs_exists) {
            const double wb = bound_state_frequency(scaled, sys, exact_opts);
            row.omega_b_sq_exact = wb * wb;
        }
        row.census = gap_census(row.eigenvalues, table.gaps);
    });
    return table;
}

} // namespace rcbound
