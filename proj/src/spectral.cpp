// spectral.cpp: spectral function evaluation and band bookkeeping

#include "rcbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rcbound/errors.hpp"

namespace rcbound {

namespace {

double rubin_shape(double gamma, double omega_c, double w) {
    if (!(w > 0.0) || !(w < omega_c)) return 0.0;
    const double u = w / omega_c;
    return gamma * u * std::sqrt((1.0 - u) * (1.0 + u));
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(name) + " must be positive and finite");
}

} // namespace

std::string to_string(SpectralKind kind) {
    switch (kind) {
        case SpectralKind::rubin: return "rubin";
        case SpectralKind::drude_gapless: return "drude_gapless";
        case SpectralKind::shifted_sum: return "shifted_sum";
        case SpectralKind::tabulated: return "tabulated";
    }
    return "unknown";
}

SpectralFunction SpectralFunction::rubin(double gamma, double omega_c) {
    if (!(gamma >= 0.0)) throw ConfigError("rubin: gamma must be non-negative");
    require_positive(omega_c, "rubin: omega_c");
    SpectralFunction sf;
    sf.kind_ = SpectralKind::rubin;
    sf.amplitude_ = gamma;
    sf.omega_c_ = omega_c;
    sf.bands_ = {Band{0.0, omega_c}};
    return sf;
}

SpectralFunction SpectralFunction::drude_gapless(double gamma, double omega_c) {
    if (!(gamma >= 0.0)) throw ConfigError("drude_gapless: gamma must be non-negative");
    require_positive(omega_c, "drude_gapless: omega_c");
    SpectralFunction sf;
    sf.kind_ = SpectralKind::drude_gapless;
    sf.amplitude_ = gamma;
    sf.omega_c_ = omega_c;
    sf.bands_ = {Band{0.0, std::numeric_limits<double>::infinity()}};
    return sf;
}

SpectralFunction SpectralFunction::shifted_sum(double gamma, double omega_c, std::vector<double> offsets) {
    if (!(gamma >= 0.0)) throw ConfigError("shifted_sum: gamma must be non-negative");
    require_positive(omega_c, "shifted_sum: omega_c");
    if (offsets.empty()) throw ConfigError("shifted_sum: at least one offset required");
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        if (!(offsets[k] >= 0.0) || !std::isfinite(offsets[k]))
            throw ConfigError("shifted_sum: offsets must be finite and non-negative");
        if (k > 0 && !(offsets[k] > offsets[k - 1] + omega_c))
            throw ConfigError("shifted_sum: shifted bands overlap or touch; offsets must differ by more than omega_c");
    }
    SpectralFunction sf;
    sf.kind_ = SpectralKind::shifted_sum;
    sf.amplitude_ = gamma;
    sf.omega_c_ = omega_c;
    sf.offsets_ = std::move(offsets);
    for (double s : sf.offsets_) sf.bands_.push_back(Band{s, s + omega_c});
    return sf;
}

SpectralFunction SpectralFunction::tabulated(std::vector<Sample> samples, double scale) {
    if (samples.size() < 3) throw ConfigError("tabulated: need at least three samples");
    if (!(scale >= 0.0)) throw ConfigError("tabulated: scale must be non-negative");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        if (!std::isfinite(s.omega) || !std::isfinite(s.value))
            throw ConfigError("tabulated: non-finite sample");
        if (s.omega < 0.0) throw ConfigError("tabulated: negative frequency sample");
        if (s.value < 0.0) throw ConfigError("tabulated: negative spectral value");
        if (k > 0 && !(s.omega > samples[k - 1].omega))
            throw ConfigError("tabulated: frequencies must be strictly increasing");
    }
    if (samples.front().value != 0.0 || samples.back().value != 0.0)
        throw ConfigError("tabulated: spectral function must vanish at both ends of the sample hull");

    SpectralFunction sf;
    sf.kind_ = SpectralKind::tabulated;
    sf.amplitude_ = scale;
    sf.omega_c_ = samples.back().omega;
    // Maximal runs of positive samples; the band extends to the neighbouring zeros.
    for (std::size_t k = 1; k + 1 < samples.size();) {
        if (samples[k].value > 0.0) {
            std::size_t j = k;
            while (samples[j + 1].value > 0.0) ++j;
            sf.bands_.push_back(Band{samples[k - 1].omega, samples[j + 1].omega});
            k = j + 1;
        } else {
            ++k;
        }
    }
    if (sf.bands_.empty()) throw ConfigError("tabulated: no strictly positive samples");
    sf.samples_ = std::move(samples);
    return sf;
}

double SpectralFunction::eval_positive(double w) const {
    switch (kind_) {
        case SpectralKind::rubin:
            return rubin_shape(amplitude_, omega_c_, w);
        case SpectralKind::drude_gapless:
            if (!(w > 0.0)) return 0.0;
            return amplitude_ * w * omega_c_ / (w * w + omega_c_ * omega_c_);
        case SpectralKind::shifted_sum:
            for (double s : offsets_) {
                if (w >= s && w <= s + omega_c_) return rubin_shape(amplitude_, omega_c_, w - s);
            }
            return 0.0;
        case SpectralKind::tabulated: {
            if (w < samples_.front().omega || w > samples_.back().omega)
                throw EvaluationError("tabulated spectral function queried outside its sample hull");
            auto it = std::upper_bound(samples_.begin(), samples_.end(), w,
                                       [](double x, const Sample& s) { return x < s.omega; });
            if (it == samples_.end()) return amplitude_ * samples_.back().value;
            const Sample& hi = *it;
            const Sample& lo = *(it - 1);
            if (lo.value == 0.0 && hi.value == 0.0) return 0.0;
            const double t = (w - lo.omega) / (hi.omega - lo.omega);
            return amplitude_ * (lo.value + t * (hi.value - lo.value));
        }
    }
    return 0.0;
}

double SpectralFunction::operator()(double w) const {
    if (w < 0.0) return -eval_positive(-w);
    return eval_positive(w);
}

SpectralFunction SpectralFunction::with_amplitude(double gamma) const {
    if (!(gamma >= 0.0)) throw ConfigError("amplitude must be non-negative");
    SpectralFunction copy = *this;
    copy.amplitude_ = gamma;
    return copy;
}

SpectralFunction SpectralFunction::rescaled(double unit) const {
    require_positive(unit, "frequency unit");
    switch (kind_) {
        case SpectralKind::rubin: return rubin(amplitude_ / unit, omega_c_ / unit);
        case SpectralKind::drude_gapless: return drude_gapless(amplitude_ / unit, omega_c_ / unit);
        case SpectralKind::shifted_sum: {
            std::vector<double> off = offsets_;
            for (double& s : off) s /= unit;
            return shifted_sum(amplitude_ / unit, omega_c_ / unit, std::move(off));
        }
        case SpectralKind::tabulated: {
            std::vector<Sample> s = samples_;
            for (auto& p : s) {
                p.omega /= unit;
                p.value /= unit;
            }
            return tabulated(std::move(s), amplitude_);
        }
    }
    return *this;
}

std::vector<Band> band_gaps(const SpectralFunction& sf, double w_max) {
    std::vector<Band> gaps;
    double cursor = 0.0;
    for (const Band& b : sf.bands()) {
        if (b.lo > cursor && cursor < w_max) gaps.push_back(Band{cursor, std::min(b.lo, w_max)});
        cursor = std::max(cursor, b.hi);
    }
    if (cursor < w_max) gaps.push_back(Band{cursor, w_max});
    return gaps;
}

double bose_occupation(double temperature, double w) {
    if (!(w > 0.0)) throw DomainError("bose_occupation: frequency must be positive");
    if (temperature < 0.0) throw DomainError("bose_occupation: negative temperature");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(w / temperature);
}

void SystemParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("system frequency Omega must be positive");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature must be non-negative");
}

std::vector<Sample> read_spectral_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectral CSV: " + path.string());
    std::vector<Sample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double w = 0.0, g = 0.0;
        if (!(ss >> w >> g)) {
            if (samples.empty() && line_no == 1) continue; // header row
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two numeric columns");
        }
        samples.push_back(Sample{w, g});
    }
    return samples;
}

} // namespace rcbound
