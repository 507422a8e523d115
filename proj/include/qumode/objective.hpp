#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "qumode/ansatz.hpp"
#include "qumode/rng.hpp"
#include "qumode/targets.hpp"

namespace qumode {

enum class EvalMode { ideal, sampled };
enum class EvalPurpose { objective, gradient_probe };

std::string_view mode_name(EvalMode mode);
EvalMode parse_mode(std::string_view text);
std::string_view purpose_name(EvalPurpose purpose);

inline constexpr int kDefaultShots = 6144;

struct ObjectiveConfig {
    EvalMode mode = EvalMode::ideal;
    int shots = kDefaultShots;
    double clamp_floor = 0.5;
    AnsatzConfig ansatz;
    TargetState target;

    void validate() const;
};

struct EvalRecord {
    std::size_t call_index = 0;
    std::vector<double> params;
    double p0 = 0.0;
    double objective = 0.0;
    /// 1 - sqrt(F) from the exact state, recorded in both modes.
    double true_infidelity = 0.0;
    EvalPurpose purpose = EvalPurpose::objective;
};

/// <target| rho_mode |target>, rho_mode being the qumode marginal of the
/// ansatz output. Parameters with a displacement at or past the
/// ansatz bound give F = 0 instead of an error.
double fidelity(std::span<const double> params, const ObjectiveConfig& cfg);

/// Swap-test ancilla P(0) = 0.5 + 0.5 F.
double swap_test_p0(double fid);

/// 1 - sqrt(2 (max(p0, clamp_floor) - 0.5)).
double objective_from_p0(double p0, double clamp_floor = 0.5);

/// One objective evaluation. Sampled mode draws k ~ Binomial(shots, p0) and
/// requires `rng`; throws ConfigError when it is missing.
EvalRecord evaluate(std::span<const double> params, const ObjectiveConfig& cfg, Rng* rng,
                    EvalPurpose purpose = EvalPurpose::objective);

/// Explicit controlled-SWAP circuit on ancilla (x) mode_a (x) mode_b.
/// Test-scale only: both states must share a cutoff <= 8.
double swap_circuit_oracle(const TargetState& a, const TargetState& b);

/// Evaluation log owned by one trial.
class Evaluator {
public:
    Evaluator(ObjectiveConfig cfg, Rng* rng);

    double operator()(std::span<const double> params, EvalPurpose purpose);
    const EvalRecord& evaluate(std::span<const double> params, EvalPurpose purpose);

    const ObjectiveConfig& config() const noexcept { return cfg_; }
    const std::vector<EvalRecord>& log() const noexcept { return log_; }
    std::size_t calls(EvalPurpose purpose) const;

    /// Columns call_index,purpose,p0,objective,true_infidelity.
    void write_csv(std::ostream& out) const;

private:
    ObjectiveConfig cfg_;
    Rng* rng_;
    std::vector<EvalRecord> log_;
};

} // namespace qumode
