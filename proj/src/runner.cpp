// runner.cpp: task orchestration and deterministic CSV/JSON output for the driver

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rcbound/errors.hpp"
#include "rcbound/exact.hpp"
#include "rcbound/excitation.hpp"
#include "rcbound/lifetime.hpp"
#include "rcbound/rcmap.hpp"
#include "rcbound/runner.hpp"

namespace rcbound {

namespace {

using nlohmann::ordered_json;

class Csv {
public:
    Csv(const RunConfig& cfg, const std::vector<std::string>& header) {
        os_ << "# config_sha256=" << cfg.digest << " task=" << to_string(cfg.task) << '\n';
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(long long x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "1" : "0"; }

ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

class Writer {
public:
    Writer(const RunConfig& cfg, RunOutput& out) : cfg_(cfg), out_(out) {}

    void write(const std::string& suffix, const std::string& text) {
        const std::filesystem::path path(cfg_.output + suffix);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write output file " + path.string());
        f << text;
        if (!f) throw ConfigError("failed writing output file " + path.string());
        out_.files.push_back(path);
    }

    void json(const std::string& suffix, ordered_json doc) {
        ordered_json head;
        head["config_sha256"] = cfg_.digest;
        head["task"] = to_string(cfg_.task);
        head.update(doc);
        write(suffix, head.dump(2) + "\n");
    }

private:
    const RunConfig& cfg_;
    RunOutput& out_;
};

RcDecomposition decomposition_for(const RunConfig& cfg, const SpectralFunction& sf, Exec exec) {
    return decompose(sf, std::span<const int>(cfg.rc_counts), exec);
}

void run_map(const RunConfig& cfg, Exec exec, Writer& w, RunOutput& out) {
    const auto sf = cfg.spectral_function();
    const auto dec = decomposition_for(cfg, sf, exec);
    Csv map(cfg, {"index", "lo", "hi", "omega", "lambda"});
    for (std::size_t i = 0; i < dec.size(); ++i) {
        const RcMode& m = dec[i];
        map.row({fmt(static_cast<long long>(m.index)), fmt(m.interval.lo), fmt(m.interval.hi), fmt(m.omega),
                 fmt(m.lambda)});
    }
    w.write("_map.csv", map.str());

    const int samples = cfg.residual_samples;
    std::vector<std::vector<std::vector<std::string>>> rows(dec.size());
    for_each_index(static_cast<int>(dec.size()), exec, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        const Band c = dec[k].interval;
        const double ceiling = residual_bound(c.width());
        for (int s = 1; s <= samples; ++s) {
            const double x = c.lo + c.width() * s / (samples + 1);
            const auto r = residual_gamma(dec, k, x);
            rows[k].push_back({fmt(static_cast<long long>(dec[k].index)), fmt(x), fmt(r.value), fmt(ceiling),
                               fmt(r.edge)});
        }
    });
    Csv res(cfg, {"index", "omega", "residual", "ceiling", "edge"});
    for (const auto& cell : rows)
        for (const auto& r : cell) res.row(r);
    w.write("_residual.csv", res.str());
    out.summary.push_back("map: " + std::to_string(dec.size()) + " reaction coordinates");
}

void run_eigs(const RunConfig& cfg, Exec exec, Writer& w, RunOutput& out) {
    const auto sf = cfg.spectral_function();
    const auto dec = decomposition_for(cfg, sf, exec);
    const auto m = build_arrowhead(cfg.system, dec);
    const auto spec = eigenvalues(m, exec, true);
    Csv csv(cfg, {"q", "eps_sq", "energy", "system_weight"});
    for (std::size_t q = 0; q < spec.size(); ++q)
        csv.row({fmt(q + 1), fmt(spec.eigenvalues[q]), fmt(spec.energy(q)), fmt(spec.system_weight(q))});
    w.write("_eigs.csv", csv.str());

    const auto b = bounds_largest(m);
    const double top = sf.support_top();
    double sum = 0.0;
    for (double e : spec.eigenvalues) sum += e;
    ordered_json doc;
    doc["size"] = spec.size();
    doc["trace"] = num(m.trace());
    doc["eigenvalue_sum"] = num(sum);
    doc["largest"] = num(spec.eigenvalues.back());
    doc["above_support"] = std::isfinite(top) && spec.eigenvalues.back() > top * top;
    doc["bounds"] = {{"loose_lower", num(b.loose_lower)}, {"tight_lower", num(b.tight_lower)}, {"upper", num(b.upper)}};
    w.json("_eigs.json", doc);
    out.summary.push_back("eigs: largest eps^2 = " + fmt(spec.eigenvalues.back()));
}

void run_sweep(const RunConfig& cfg, Exec exec, Writer& w, RunOutput& out) {
    const auto sf = cfg.spectral_function();
    const auto table = sweep(cfg.system, sf, cfg.sweep_gammas, cfg.rc_counts, exec);

    std::vector<std::string> header{"gamma", "bs_exists", "omega_b_sq_exact", "loose_lower", "tight_lower", "upper"};
    for (std::size_t g = 0; g < table.gaps.size(); ++g) {
        header.push_back("gap" + std::to_string(g) + "_count");
        header.push_back("gap" + std::to_string(g) + "_edge");
    }
    const std::size_t m = table.rows.empty() ? 0 : table.rows.front().eigenvalues.size();
    for (std::size_t q = 0; q < m; ++q) header.push_back("eps_sq_" + std::to_string(q + 1));
    Csv csv(cfg, header);
    std::size_t onset = table.rows.size();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const SweepRow& row = table.rows[r];
        if (row.bs_exists && onset == table.rows.size()) onset = r;
        std::vector<std::string> cells{fmt(row.gamma), fmt(row.bs_exists), fmt(row.omega_b_sq_exact),
                                       fmt(row.bounds.loose_lower), fmt(row.bounds.tight_lower),
                                       fmt(row.bounds.upper)};
        for (const auto& c : row.census) {
            cells.push_back(fmt(static_cast<long long>(c.count)));
            cells.push_back(fmt(c.edge_flag));
        }
        for (double e : row.eigenvalues) cells.push_back(fmt(e));
        csv.row(cells);
    }
    w.write("_sweep.csv", csv.str());

    Csv gaps(cfg, {"gap", "lo", "hi"});
    for (std::size_t g = 0; g < table.gaps.size(); ++g)
        gaps.row({fmt(g), fmt(table.gaps[g].lo), fmt(table.gaps[g].hi)});
    w.write("_sweep_gaps.csv", gaps.str());
    out.summary.push_back("sweep: " + std::to_string(table.rows.size()) + " points, bound state from gamma = " +
                          (onset < table.rows.size() ? fmt(table.rows[onset].gamma) : std::string("none")));
}

void run_exact(const RunConfig& cfg, Exec, Writer& w, RunOutput& out) {
    const auto sf = cfg.spectral_function();
    const auto rep = analyze_bound_state(sf, cfg.system);
    ordered_json doc;
    doc["gamma"] = sf.amplitude();
    doc["omega"] = cfg.system.omega;
    doc["temperature"] = cfg.system.temperature;
    doc["critical_coupling"] = num(rep.critical_gamma);
    doc["bound_state"] = rep.exists;
    doc["omega_b"] = rep.exists ? num(rep.omega_b) : ordered_json(nullptr);
    doc["bar_f"] = rep.exists ? num(rep.bar_f) : ordered_json(nullptr);
    doc["g0"] = rep.exists ? num(rep.g0) : ordered_json(nullptr);
    ordered_json roots = ordered_json::array();
    for (const auto& r : rep.all_roots)
        roots.push_back({{"gap_lo", num(r.gap.lo)}, {"gap_hi", num(r.gap.hi)}, {"omega", num(r.omega)},
                         {"sign_changes", r.sign_changes}});
    doc["roots"] = roots;
    doc["commutator"] = num(commutator_value(sf, cfg.system));
    try {
        const auto mom = long_term_moments(sf, cfg.system, cfg.exact_time, cfg.initial_moments);
        doc["moments"] = {{"time", cfg.exact_time},
                          {"x_mean", num(mom.x_mean)},
                          {"p_mean", num(mom.p_mean)},
                          {"x2", num(mom.x2)},
                          {"p2", num(mom.p2)},
                          {"x2_stationary", num(mom.x2_stationary)},
                          {"p2_stationary", num(mom.p2_stationary)},
                          {"x2_oscillation", num(mom.x2_oscillation)},
                          {"p2_oscillation", num(mom.p2_oscillation)},
                          {"occupation", num(mom.occupation)}};
    } catch (const StateError& e) {
        doc["moments"] = nullptr;
        doc["moments_unavailable"] = e.what();
    }
    out.summary.push_back(rep.exists ? "exact: omega_b = " + fmt(rep.omega_b) : "exact: no bound state");
    if (doc["moments"].is_object()) out.summary.push_back("exact: occupation = " + fmt(doc["moments"]["occupation"].get<double>()));
    w.json("_exact.json", doc);
}

void run_critical(const RunConfig& cfg, Exec, Writer& w, RunOutput& out) {
    const auto sf = cfg.spectral_function();
    const double crit = critical_coupling(sf, cfg.system);
    ordered_json gaps = ordered_json::array();
    Csv csv(cfg, {"gap", "lo", "hi", "enter", "leave"});
    const auto list = band_gaps(sf, std::numeric_limits<double>::infinity());
    for (std::size_t g = 0; g < list.size(); ++g) {
        const auto win = gap_coupling_window(sf, cfg.system, list[g]);
        gaps.push_back({{"lo", num(list[g].lo)}, {"hi", num(list[g].hi)}, {"enter", num(win.enter)},
                        {"leave", num(win.leave)}});
        csv.row({fmt(g), fmt(list[g].lo), fmt(list[g].hi), fmt(win.enter), fmt(win.leave)});
    }
    ordered_json doc;
    doc["critical_coupling"] = num(crit);
    doc["gaps"] = gaps;
    w.json("_critical.json", doc);
    w.write("_critical.csv", csv.str());
    out.summary.push_back("critical: gamma_c = " + fmt(crit));
}

struct LifetimePoint {
    double gamma{0.0};
    double u{0.0};
    double norm{0.0};
    Trajectory traj;
    LifetimeEstimate est;
};

void run_lifetime(const RunConfig& cfg, Exec exec, Writer& w, RunOutput& out) {
    const LifetimeConfig& lc = cfg.lifetime;
    const auto base = cfg.spectral_function();
    std::vector<LifetimePoint> points;
    for (double g : lc.gammas)
        for (double u : lc.anharmonicities) points.push_back(LifetimePoint{g, u, 0.0, {}, {}});

    for_each_index(static_cast<int>(points.size()), exec, [&](int k) {
        LifetimePoint& p = points[static_cast<std::size_t>(k)];
        const auto sf = base.with_amplitude(p.gamma);
        const auto dec = decomposition_for(cfg, sf, Exec::serial);
        const auto model = build_supersystem(cfg.system, dec, p.u, SupersystemOptions{lc.mixing, lc.lamb_shift});
        const FockBasis basis(model.mode_count(), lc.n_max);
        GeneratorOptions gopts;
        gopts.include_principal_parts = lc.principal_parts;
        gopts.pairing = lc.pairing;
        const Liouvillian l = lc.generator == GeneratorKind::secular
                                  ? build_generator_secular(model, basis, gopts)
                                  : build_generator_partial_secular(model, basis, gopts);
        std::vector<int> occ = lc.initial;
        if (occ.empty()) {
            occ.assign(model.mode_count(), 0);
            occ.back() = 1;
        }
        if (occ.size() != model.mode_count())
            throw ConfigError("/lifetime/initial: expected " + std::to_string(model.mode_count()) + " occupations");
        p.norm = l.norm_estimate();
        EvolveOptions eo;
        eo.records = lc.records;
        eo.norm = p.norm;
        const double dt = lc.dt > 0.0 ? lc.dt : 0.09 / p.norm;
        p.traj = evolve(l, basis, fock_density(basis, occ), lc.t_final, dt, eo);
        p.est = estimate_lifetime(p.traj, model.bs_index());
    });

    ordered_json list = ordered_json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const LifetimePoint& p = points[k];
        const std::size_t bs = p.traj.populations.front().size() - 1;
        Csv csv(cfg, {"t", "bs_population", "band_population", "trace_defect"});
        for (std::size_t s = 0; s < p.traj.times.size(); ++s) {
            double band = 0.0;
            for (std::size_t q = 0; q < bs; ++q) band += p.traj.populations[s][q];
            csv.row({fmt(p.traj.times[s]), fmt(p.traj.populations[s][bs]), fmt(band), fmt(p.traj.trace_defect[s])});
        }
        const std::string suffix = "_lifetime_" + std::to_string(k) + ".csv";
        w.write(suffix, csv.str());
        list.push_back({{"gamma", p.gamma},
                        {"U", p.u},
                        {"T", cfg.system.temperature},
                        {"tau_b", num(p.est.tau)},
                        {"fit_residual", num(p.est.fit_residual)},
                        {"exceeds_window", p.est.exceeds_window},
                        {"growing", p.est.growing},
                        {"envelope_fit", p.est.envelope_fit},
                        {"dt", p.traj.dt},
                        {"steps", p.traj.steps},
                        {"generator_norm", p.norm},
                        {"min_population", p.traj.min_population},
                        {"negativity_flag", p.traj.negativity_flag},
                        {"csv", std::filesystem::path(cfg.output + suffix).filename().string()}});
        out.summary.push_back("lifetime: gamma = " + fmt(p.gamma) + ", U = " + fmt(p.u) + ", tau_b = " +
                              (p.est.exceeds_window ? std::string("exceeds window") : fmt(p.est.tau)));
    }
    ordered_json doc;
    doc["points"] = list;
    w.json("_lifetime.json", doc);
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ExitStatus classify_error(const std::exception& e) {
    const std::string what = e.what();
    if (const auto* a = dynamic_cast<const AccuracyError*>(&e)) {
        std::ostringstream os;
        os << "accuracy error: " << what << " (best estimate " << a->best_estimate() << ", error estimate "
           << a->error_estimate() << ")";
        return {kExitAccuracy, os.str()};
    }
    if (dynamic_cast<const StepSizeError*>(&e)) return {kExitAccuracy, "accuracy error: evolve: " + what};
    if (dynamic_cast<const DivergenceError*>(&e)) return {kExitAccuracy, "accuracy error: " + what};
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const EvaluationError*>(&e) || dynamic_cast<const StateError*>(&e))
        return {kExitConfig, "config error: " + what};
    return {1, "error: " + what};
}

RunOutput run(const RunConfig& cfg, Exec exec) {
    RunOutput out;
    Writer w(cfg, out);
    switch (cfg.task) {
    case Task::map: run_map(cfg, exec, w, out); break;
    case Task::eigs: run_eigs(cfg, exec, w, out); break;
    case Task::sweep: run_sweep(cfg, exec, w, out); break;
    case Task::exact: run_exact(cfg, exec, w, out); break;
    case Task::critical: run_critical(cfg, exec, w, out); break;
    case Task::lifetime: run_lifetime(cfg, exec, w, out); break;
    }
    return out;
}

} // namespace rcbound
