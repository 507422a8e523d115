#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qumode/objective.hpp"
#include "qumode/rng.hpp"

namespace qumode {

enum class OptimizerKind { spsa, nelder_mead, powell, cobyla, cg, lbfgs };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);
bool uses_gradient_probes(OptimizerKind kind);

/// Gain schedule a_k = a / (k + 1 + A)^alpha_exp, c_k = c / (k + 1)^gamma_exp.
struct SpsaGains {
    /// Values <= 0 ask for calibration: over the first `calibration_window`
    /// iterations `a` tracks the running mean of |f+ - f-| / 2c so that an
    /// update has Euclidean norm about `first_step`; it is frozen afterwards.
    double a = 0.0;
    double c = 0.1;
    double A = 100.0;
    double alpha_exp = 0.602;
    double gamma_exp = 0.101;
    double first_step = 0.1;
    int calibration_window = 25;

    double a_k(double a_value, int k) const;
    double c_k(int k) const;
};

enum class Termination {
    tolerance,          ///< objective or simplex spread below tolerance
    gradient_small,     ///< finite-difference gradient below gtol
    line_search_failed, ///< no acceptable step along the search direction
    trust_region_final, ///< COBYLA radius reached rho_end
    iteration_cap,
    evaluation_cap,
};

std::string_view termination_name(Termination t);

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::powell;
    int max_iterations = 1000;
    /// Objective-call budget; 0 picks a per-kind default (see resolved()).
    int max_evaluations = 0;
    /// Central-difference step for cg / lbfgs.
    double fd_step = 0.03;
    /// Relative objective decrease (gradient-based), simplex spread
    /// (Nelder-Mead) or per-cycle decrease (Powell).
    double tolerance = 1e-8;
    double gtol = 1e-5;
    int lbfgs_memory = 10;
    int max_line_search_steps = 20;
    double armijo_c1 = 1e-4;
    /// Relative bracket tolerance of Powell's Brent line minimizer.
    double powell_line_tol = 1e-2;
    double cobyla_rho_begin = 1.0;
    double cobyla_rho_end = 1e-4;
    SpsaGains spsa;

    /// Per-kind defaults for ideal or sampled objective evaluation.
    static OptimizerSpec defaults(OptimizerKind kind, EvalMode mode = EvalMode::ideal);

    /// Copy with max_evaluations filled in for a problem of `dim` parameters.
    OptimizerSpec resolved(std::size_t dim) const;
    void validate() const;
};

struct OptResult {
    std::vector<double> best_params;
    double best_objective = 0.0;
    /// Objective-purpose calls; for SPSA the iteration count (reporting
    /// convention: one iteration = one two-sided probe pair).
    std::size_t nfev = 0;
    std::size_t grad_probe_evals = 0;
    /// Every call made to f; equals the evaluation log length.
    std::size_t total_evals = 0;
    std::size_t gradient_evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
    Termination termination = Termination::iteration_cap;
};

using ObjectiveFn = std::function<double(std::span<const double>, EvalPurpose)>;
/// Called once per optimizer iteration with the current iterate and the
/// optimizer's view of its objective.
using IterationCallback = std::function<void(std::size_t iteration, std::span<const double> x, double fx)>;

OptResult minimize(const ObjectiveFn& f, std::span<const double> x0, const OptimizerSpec& spec, Rng& rng,
                   const IterationCallback& on_iteration = {});

/// g_i = (f(x + h e_i) - f(x - h e_i)) / (2h), 2 dim gradient_probe calls.
std::vector<double> central_fd_gradient(const ObjectiveFn& f, std::span<const double> x, double h);

/// State carried between SPSA iterations.
struct SpsaState {
    std::vector<double> x;
    double a = 0.0;
    double diff_sum = 0.0;
    int diff_count = 0;
    double last_plus = 0.0;
    double last_minus = 0.0;
};

/// One SPSA update at iteration k: exactly two gradient_probe calls.
void spsa_step(const ObjectiveFn& f, SpsaState& state, int k, const SpsaGains& gains, Rng& rng);

} // namespace qumode
