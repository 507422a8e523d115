#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qumode/errors.hpp"
#include "qumode/objective.hpp"
#include "qumode/optimize.hpp"
#include "qumode/targets.hpp"

namespace qumode {

/// Uniform ranges for random initial parameters.
struct InitRanges {
    double angle_lo = 0.0;
    double angle_hi = 6.283185307179586; // 2 pi, half-open
    double displacement_lo = -1.0;
    double displacement_hi = 1.0;
};

struct ExperimentConfig {
    TargetSpec target;
    OptimizerSpec optimizer;
    int layers = 1;
    EvalMode mode = EvalMode::ideal;
    int shots = kDefaultShots;
    int trials = 30;
    std::uint64_t base_seed = 0;
    InitRanges init;
    double convergence_threshold = 0.1;
    double clamp_floor = 0.5;
    /// Keep the per-iteration trace of trial 0.
    bool record_trace = false;
    /// Test hook: start every trial from this point instead of a random draw.
    std::optional<std::vector<double>> forced_x0;

    void validate() const;
    ObjectiveConfig objective_config() const;
    /// Deterministic identity of the cell: equal keys mean equal results.
    std::string cell_key() const;
};

struct TraceRow {
    std::size_t iteration = 0;
    double objective = 0.0;
    double true_infidelity = 0.0;
};

struct TrialResult {
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<double> initial_params;
    std::vector<double> final_params;
    double final_objective = 0.0;
    double final_true_infidelity = 0.0;
    std::size_t nfev = 0;
    std::size_t grad_probe_evals = 0;
    std::size_t total_evals = 0;
    std::size_t iterations = 0;
    Termination termination = Termination::iteration_cap;
    bool converged = false;
    double wall_time = 0.0;
    std::vector<TraceRow> trace;
};

/// One aggregated table row. infidelity_* use the ideal re-evaluation at the
/// final parameters; objective_* use the optimizer-visible final value.
struct BenchRow {
    std::string cell_key;
    std::string target;
    std::string optimizer;
    int layers = 0;
    std::string mode;
    int shots = 0;
    double fd_step = 0.0;
    std::size_t trials = 0;
    double infidelity_mean = 0.0;
    double infidelity_std = 0.0;
    double nfev_mean = 0.0;
    double nfev_std = 0.0;
    double nonconverged_pct = 0.0;
    double total_evals_mean = 0.0;
    double objective_mean = 0.0;
    double objective_std = 0.0;
};

/// A trial in a cell threw; trials finished before the failure are kept.
class CellAborted : public Error {
public:
    CellAborted(const std::string& what, std::vector<TrialResult> completed)
        : Error(what), completed_(std::move(completed))
    {
    }
    const std::vector<TrialResult>& completed() const noexcept { return completed_; }

private:
    std::vector<TrialResult> completed_;
};

struct CellResult {
    BenchRow row;
    std::vector<TrialResult> trials;
};

/// Seed of trial `trial_index` derived from the cell's base seed.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index);

std::vector<double> draw_initial_params(const ExperimentConfig& cfg, Rng& rng);

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

/// Runs every trial on up to `parallelism` worker threads. Results are
/// ordered by trial index whatever the completion order.
CellResult run_cell(const ExperimentConfig& cfg, int parallelism = 1);

BenchRow aggregate(const ExperimentConfig& cfg, std::span<const TrialResult> trials);

/// Mean and sample (n - 1) standard deviation; std is 0 for a single value.
std::pair<double, double> mean_std(std::span<const double> values);

} // namespace qumode
