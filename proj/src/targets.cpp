#include "qumode/targets.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qumode/errors.hpp"

namespace qumode {

namespace {

constexpr std::array<double, 10> kNonGaussianPreset = {0.0,   0.209, 0.417, 0.209, 0.0,
                                                       0.417, 0.626, 0.417, 0.0,   0.0};

TargetState normalized(StateVector v)
{
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ConfigError("target amplitudes have zero or non-finite norm");
    }
    v /= norm;
    return TargetState{std::move(v)};
}

std::string format_number(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace

TargetState make_gaussian_target(double mean, double std, FockCutoff cutoff)
{
    if (!(std > 0.0) || !std::isfinite(std) || !std::isfinite(mean)) {
        throw ConfigError("Gaussian target needs finite mean and std > 0");
    }
    StateVector v(cutoff.levels());
    for (int n = 0; n < cutoff.levels(); ++n) {
        const double z = (n - mean) / std;
        v(n) = std::exp(-0.5 * z * z);
    }
    return normalized(std::move(v));
}

TargetState make_non_gaussian_preset(FockCutoff cutoff)
{
    if (cutoff.levels() != static_cast<int>(kNonGaussianPreset.size())) {
        throw ConfigError("the non-Gaussian preset is defined for a 10-level cutoff only");
    }
    StateVector v(cutoff.levels());
    for (int n = 0; n < cutoff.levels(); ++n) {
        v(n) = kNonGaussianPreset[static_cast<std::size_t>(n)];
    }
    return normalized(std::move(v));
}

TargetState load_explicit_target(std::span<const Complex> values, FockCutoff cutoff)
{
    if (values.size() != static_cast<std::size_t>(cutoff.levels())) {
        throw DimensionError("explicit target has " + std::to_string(values.size()) +
                             " amplitudes for a " + std::to_string(cutoff.levels()) + "-level cutoff");
    }
    StateVector v(cutoff.levels());
    for (int n = 0; n < cutoff.levels(); ++n) {
        v(n) = values[static_cast<std::size_t>(n)];
    }
    return normalized(std::move(v));
}

std::vector<Complex> read_amplitude_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open amplitude file " + path.string());
    }
    std::vector<Complex> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream is(line);
        double re = 0.0;
        if (!(is >> re)) {
            std::string rest;
            if (std::istringstream(line) >> rest) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed amplitude");
            }
            continue;
        }
        double im = 0.0;
        std::string extra;
        if (!(is >> extra).fail()) {
            std::istringstream tail(extra);
            if (!(tail >> im) || !tail.eof() || (is >> extra)) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed amplitude");
            }
        }
        values.emplace_back(re, im);
    }
    return values;
}

std::string_view family_name(TargetFamily family)
{
    switch (family) {
    case TargetFamily::local_gaussian:
        return "local_gaussian";
    case TargetFamily::gaussian:
        return "gaussian";
    case TargetFamily::non_gaussian_preset:
        return "non_gaussian";
    case TargetFamily::explicit_amplitudes:
        return "explicit";
    }
    return "unknown";
}

TargetSpec TargetSpec::local_gaussian(FockCutoff cutoff)
{
    TargetSpec s;
    s.family = TargetFamily::local_gaussian;
    s.mean = 0.0;
    s.std = 0.75;
    s.cutoff = cutoff;
    return s;
}

TargetSpec TargetSpec::gaussian(FockCutoff cutoff)
{
    TargetSpec s;
    s.family = TargetFamily::gaussian;
    s.mean = 5.0;
    s.std = 1.0;
    s.cutoff = cutoff;
    return s;
}

TargetSpec TargetSpec::non_gaussian(FockCutoff cutoff)
{
    TargetSpec s;
    s.family = TargetFamily::non_gaussian_preset;
    s.cutoff = cutoff;
    return s;
}

TargetSpec TargetSpec::fock(int level, FockCutoff cutoff)
{
    if (level < 0 || level >= cutoff.levels()) {
        throw ConfigError("Fock level " + std::to_string(level) + " outside the cutoff");
    }
    std::vector<Complex> v(static_cast<std::size_t>(cutoff.levels()), Complex(0.0));
    v[static_cast<std::size_t>(level)] = 1.0;
    return from_amplitudes(std::move(v), cutoff, level == 0 ? "vacuum" : "fock" + std::to_string(level));
}

TargetSpec TargetSpec::from_amplitudes(std::vector<Complex> values, FockCutoff cutoff, std::string name)
{
    TargetSpec s;
    s.family = TargetFamily::explicit_amplitudes;
    s.amplitudes = std::move(values);
    s.cutoff = cutoff;
    s.name = std::move(name);
    return s;
}

TargetSpec TargetSpec::parse(std::string_view text, FockCutoff cutoff)
{
    if (text == "local-gaussian" || text == "local_gaussian") {
        return local_gaussian(cutoff);
    }
    if (text == "gaussian") {
        return gaussian(cutoff);
    }
    if (text == "non-gaussian" || text == "non_gaussian") {
        return non_gaussian(cutoff);
    }
    if (text == "vacuum") {
        return fock(0, cutoff);
    }
    if (text.starts_with("fock:")) {
        const std::string digits(text.substr(5));
        std::size_t used = 0;
        int level = -1;
        try {
            level = std::stoi(digits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != digits.size()) {
            throw ConfigError("bad Fock target '" + std::string(text) + "'");
        }
        return fock(level, cutoff);
    }
    if (text.starts_with("file:")) {
        const std::string path(text.substr(5));
        return from_amplitudes(read_amplitude_file(path), cutoff, "file:" + path);
    }
    throw ConfigError("unknown target '" + std::string(text) + "'");
}

TargetState TargetSpec::resolve() const
{
    switch (family) {
    case TargetFamily::local_gaussian:
    case TargetFamily::gaussian:
        return make_gaussian_target(mean, std, cutoff);
    case TargetFamily::non_gaussian_preset:
        return make_non_gaussian_preset(cutoff);
    case TargetFamily::explicit_amplitudes:
        return load_explicit_target(amplitudes, cutoff);
    }
    throw ConfigError("unknown target family");
}

std::string TargetSpec::label() const
{
    switch (family) {
    case TargetFamily::local_gaussian:
    case TargetFamily::gaussian:
        return std::string(family_name(family)) + "(" + format_number(mean) + "," + format_number(std) + ")";
    case TargetFamily::non_gaussian_preset:
        return "non_gaussian";
    case TargetFamily::explicit_amplitudes:
        return name.empty() ? std::string("explicit") : name;
    }
    return "unknown";
}

} // namespace qumode
