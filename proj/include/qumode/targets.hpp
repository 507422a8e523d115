#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qumode/fock.hpp"

namespace qumode {

enum class TargetFamily { local_gaussian, gaussian, non_gaussian_preset, explicit_amplitudes };

/// Unit-norm qumode state over the truncated Fock basis.
struct TargetState {
    StateVector amplitudes;

    FockCutoff cutoff() const { return FockCutoff(static_cast<int>(amplitudes.size())); }
};

/// Declarative target description; resolve() turns it into amplitudes.
struct TargetSpec {
    TargetFamily family = TargetFamily::local_gaussian;
    double mean = 0.0;
    double std = 0.75;
    std::vector<Complex> amplitudes; // explicit family only
    FockCutoff cutoff{10};
    /// Free-form name for explicit targets ("vacuum", a file path, ...).
    std::string name;

    static TargetSpec local_gaussian(FockCutoff cutoff = FockCutoff{10});
    static TargetSpec gaussian(FockCutoff cutoff = FockCutoff{10});
    static TargetSpec non_gaussian(FockCutoff cutoff = FockCutoff{10});
    static TargetSpec fock(int level, FockCutoff cutoff = FockCutoff{10});
    static TargetSpec from_amplitudes(std::vector<Complex> values, FockCutoff cutoff, std::string name);

    /// Parses the CLI spelling: local-gaussian, gaussian, non-gaussian, vacuum,
    /// fock:<n>, file:<path>. Gaussian families take mean/std from the family
    /// defaults unless overridden afterwards.
    static TargetSpec parse(std::string_view text, FockCutoff cutoff = FockCutoff{10});

    TargetState resolve() const;
    /// Stable, human-readable identity used in cell keys and report headings.
    std::string label() const;
};

/// Envelope exp(-(n - mean)^2 / (2 std^2)) over n = 0..N-1, L2-normalized.
TargetState make_gaussian_target(double mean, double std, FockCutoff cutoff);

/// Fixed 10-level non-Gaussian superposition, renormalized to unit norm.
TargetState make_non_gaussian_preset(FockCutoff cutoff);

TargetState load_explicit_target(std::span<const Complex> values, FockCutoff cutoff);

/// One "re im" pair per line (a lone "re" means im = 0); '#' starts a comment.
std::vector<Complex> read_amplitude_file(const std::filesystem::path& path);

std::string_view family_name(TargetFamily family);

} // namespace qumode
