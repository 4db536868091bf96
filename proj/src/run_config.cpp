// run_config.cpp: JSON parsing, validation and digest of run configurations

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "rcbound/errors.hpp"
#include "rcbound/run_config.hpp"

namespace rcbound {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

// Typed access to one JSON object with its pointer path; rejects unknown keys.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(where(), "expected an object");
    }

    std::string where(const std::string& key = {}) const {
        const std::string p = key.empty() ? path_ : path_ + "/" + key;
        return p.empty() ? "/" : p;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    Section child(const std::string& key) { return Section(raw(key), where(key)); }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number()) fail(where(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(where(key), "must be finite");
        return x;
    }

    double positive(const std::string& key, double fallback) {
        const double x = number(key, fallback);
        if (!(x > 0.0)) fail(where(key), "must be positive");
        return x;
    }

    double non_negative(const std::string& key, double fallback) {
        const double x = number(key, fallback);
        if (x < 0.0) fail(where(key), "must be non-negative");
        return x;
    }

    int integer(const std::string& key, int fallback, int lo) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(where(key), "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > 1000000) fail(where(key), "must be an integer in [" + std::to_string(lo) + ", 1000000]");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(where(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) fail(where(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(where(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(where(key) + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
            if (!std::isfinite(out.back())) fail(where(key) + "/" + std::to_string(i), "must be finite");
        }
        return out;
    }

    std::vector<int> integers(const std::string& key, int lo) {
        const json& v = raw(key);
        std::vector<int> out;
        if (v.is_number_integer()) {
            out.push_back(v.get<int>());
            if (out.back() < lo) fail(where(key), "must be at least " + std::to_string(lo));
            return out;
        }
        if (!v.is_array() || v.empty()) fail(where(key), "expected an integer or a non-empty array of integers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string w = where(key) + "/" + std::to_string(i);
            if (!v[i].is_number_integer()) fail(w, "expected an integer");
            out.push_back(v[i].get<int>());
            if (out.back() < lo) fail(w, "must be at least " + std::to_string(lo));
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(where(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require_ascending_positive(const std::vector<double>& v, const std::string& where) {
    if (v.empty()) fail(where, "must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) fail(where + "/" + std::to_string(i), "must be positive");
        if (i > 0 && !(v[i] > v[i - 1])) fail(where + "/" + std::to_string(i), "grid must be strictly ascending");
    }
}

SpectralConfig parse_spectral(Section s, const std::filesystem::path& source_dir) {
    SpectralConfig c;
    c.kind = s.string("kind", c.kind);
    if (c.kind == "tabulated") {
        if (!s.has("table")) fail(s.where("table"), "required for kind tabulated");
        c.table = s.string("table", "");
        if (c.table.is_relative() && !source_dir.empty()) c.table = source_dir / c.table;
        c.gamma = s.positive("gamma", 1.0);
    } else if (c.kind == "rubin" || c.kind == "drude_gapless" || c.kind == "shifted_sum") {
        c.gamma = s.positive("gamma", c.gamma);
        c.cutoff = s.positive("cutoff", c.cutoff);
        if (c.kind == "shifted_sum") {
            if (!s.has("offsets")) fail(s.where("offsets"), "required for kind shifted_sum");
            c.offsets = s.numbers("offsets");
        }
    } else {
        fail(s.where("kind"), "unknown spectral kind '" + c.kind + "'");
    }
    s.finish();
    return c;
}

LifetimeConfig parse_lifetime(Section s) {
    LifetimeConfig c;
    if (s.has("gammas")) {
        c.gammas = s.numbers("gammas");
        for (std::size_t i = 0; i < c.gammas.size(); ++i)
            if (!(c.gammas[i] > 0.0)) fail(s.where("gammas") + "/" + std::to_string(i), "must be positive");
        if (c.gammas.empty()) fail(s.where("gammas"), "must not be empty");
    }
    if (s.has("anharmonicities")) {
        c.anharmonicities = s.numbers("anharmonicities");
        if (c.anharmonicities.empty()) fail(s.where("anharmonicities"), "must not be empty");
        for (std::size_t i = 0; i < c.anharmonicities.size(); ++i)
            if (c.anharmonicities[i] < 0.0)
                fail(s.where("anharmonicities") + "/" + std::to_string(i), "must be non-negative");
    }
    c.t_final = s.positive("t_final", c.t_final);
    c.dt = s.non_negative("dt", c.dt);
    c.n_max = s.integer("n_max", c.n_max, 1);
    c.records = s.integer("records", c.records, 1);
    if (s.has("initial")) c.initial = s.integers("initial", 0);
    const std::string gen = s.string("generator", "secular");
    if (gen == "secular") c.generator = GeneratorKind::secular;
    else if (gen == "partial_secular") c.generator = GeneratorKind::partial_secular;
    else fail(s.where("generator"), "expected 'secular' or 'partial_secular'");
    const std::string pairing = s.string("pairing", "co_rotating");
    if (pairing == "co_rotating") c.pairing = RedfieldPairing::co_rotating;
    else if (pairing == "full") c.pairing = RedfieldPairing::full;
    else fail(s.where("pairing"), "expected 'co_rotating' or 'full'");
    const std::string mixing = s.string("mixing", "exact");
    if (mixing == "exact") c.mixing = MixingForm::exact;
    else if (mixing == "strong_coupling") c.mixing = MixingForm::strong_coupling;
    else fail(s.where("mixing"), "expected 'exact' or 'strong_coupling'");
    c.lamb_shift = s.number("lamb_shift", c.lamb_shift);
    c.principal_parts = s.boolean("principal_parts", c.principal_parts);
    s.finish();
    return c;
}

std::vector<double> parse_grid(Section s) {
    if (s.has("gammas")) {
        if (s.has("start") || s.has("stop") || s.has("points"))
            fail(s.where(), "give either 'gammas' or 'start'/'stop'/'points'");
        auto g = s.numbers("gammas");
        require_ascending_positive(g, s.where("gammas"));
        s.finish();
        return g;
    }
    const double start = s.positive("start", 0.1);
    const double stop = s.positive("stop", 4.0);
    const int points = s.integer("points", 40, 2);
    if (!(stop > start)) fail(s.where("stop"), "must exceed start");
    s.finish();
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
    return g;
}

} // namespace

std::string to_string(Task t) {
    switch (t) {
    case Task::map: return "map";
    case Task::eigs: return "eigs";
    case Task::sweep: return "sweep";
    case Task::exact: return "exact";
    case Task::critical: return "critical";
    case Task::lifetime: return "lifetime";
    }
    return "?";
}

Task parse_task(const std::string& name) {
    for (Task t : {Task::map, Task::eigs, Task::sweep, Task::exact, Task::critical, Task::lifetime})
        if (to_string(t) == name) return t;
    throw ConfigError("unknown task '" + name + "' (expected map, eigs, sweep, exact, critical or lifetime)");
}

SpectralFunction RunConfig::spectral_function() const {
    const SpectralConfig& s = spectral;
    if (s.kind == "rubin") return SpectralFunction::rubin(s.gamma, s.cutoff);
    if (s.kind == "drude_gapless") return SpectralFunction::drude_gapless(s.gamma, s.cutoff);
    if (s.kind == "shifted_sum") return SpectralFunction::shifted_sum(s.gamma, s.cutoff, s.offsets);
    return SpectralFunction::tabulated(read_spectral_csv(s.table), s.gamma);
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& source_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    RunConfig c;
    c.digest = sha256_hex(text);
    Section root(doc, "");
    if (!root.has("task")) fail("/task", "required");
    c.task = [&] {
        const std::string name = root.string("task", "");
        try {
            return parse_task(name);
        } catch (const ConfigError& e) {
            fail("/task", e.what());
        }
    }();
    if (root.has("spectral")) c.spectral = parse_spectral(root.child("spectral"), source_dir);
    if (root.has("system")) {
        Section s = root.child("system");
        c.system.omega = s.positive("omega", c.system.omega);
        c.system.temperature = s.non_negative("temperature", c.system.temperature);
        s.finish();
    }
    if (root.has("rc_count")) c.rc_counts = root.integers("rc_count", 1);
    if (root.has("sweep")) c.sweep_gammas = parse_grid(root.child("sweep"));
    else if (c.task == Task::sweep) fail("/sweep", "required for task sweep");
    c.residual_samples = root.integer("residual_samples", c.residual_samples, 2);
    if (root.has("exact")) {
        Section s = root.child("exact");
        c.exact_time = s.non_negative("time", c.exact_time);
        if (s.has("initial")) {
            Section m = s.child("initial");
            c.initial_moments.x_mean = m.number("x_mean", c.initial_moments.x_mean);
            c.initial_moments.p_mean = m.number("p_mean", c.initial_moments.p_mean);
            c.initial_moments.x_var = m.non_negative("x_var", c.initial_moments.x_var);
            c.initial_moments.p_var = m.non_negative("p_var", c.initial_moments.p_var);
            c.initial_moments.xp_cov = m.number("xp_cov", c.initial_moments.xp_cov);
            m.finish();
        }
        s.finish();
    }
    if (root.has("lifetime")) c.lifetime = parse_lifetime(root.child("lifetime"));
    if (c.lifetime.gammas.empty()) c.lifetime.gammas = {c.spectral.gamma};
    c.output = root.string("output", c.output);
    if (c.output.empty()) fail("/output", "must not be empty");
    if (root.has("seed")) {
        const json& v = root.raw("seed");
        if (!v.is_number_unsigned()) fail("/seed", "expected a non-negative integer");
        c.seed = v.get<unsigned long long>();
    }
    root.finish();

    // Build the spectral function once so that model-level errors surface as config errors.
    try {
        (void)c.spectral_function();
    } catch (const ConfigError& e) {
        fail("/spectral", e.what());
    } catch (const std::exception& e) {
        fail("/spectral", e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("SHA-256 digest failed");
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
    return os.str();
}

} // namespace rcbound
