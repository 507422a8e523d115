#include <cmath>
#include <limits>
#include <string>

#include "common.hpp"
#include "qumode/errors.hpp"

namespace qumode {

std::string_view optimizer_name(OptimizerKind kind)
{
    switch (kind) {
    case OptimizerKind::spsa:
        return "spsa";
    case OptimizerKind::nelder_mead:
        return "nelder_mead";
    case OptimizerKind::powell:
        return "powell";
    case OptimizerKind::cobyla:
        return "cobyla";
    case OptimizerKind::cg:
        return "cg";
    case OptimizerKind::lbfgs:
        return "lbfgs";
    }
    return "unknown";
}

OptimizerKind parse_optimizer(std::string_view text)
{
    if (text == "spsa") {
        return OptimizerKind::spsa;
    }
    if (text == "nelder_mead" || text == "nelder-mead" || text == "nm") {
        return OptimizerKind::nelder_mead;
    }
    if (text == "powell") {
        return OptimizerKind::powell;
    }
    if (text == "cobyla") {
        return OptimizerKind::cobyla;
    }
    if (text == "cg") {
        return OptimizerKind::cg;
    }
    if (text == "lbfgs" || text == "l-bfgs" || text == "l-bfgs-b") {
        return OptimizerKind::lbfgs;
    }
    throw ConfigError("unknown optimizer '" + std::string(text) + "'");
}

bool uses_gradient_probes(OptimizerKind kind)
{
    return kind == OptimizerKind::cg || kind == OptimizerKind::lbfgs || kind == OptimizerKind::spsa;
}

std::string_view termination_name(Termination t)
{
    switch (t) {
    case Termination::tolerance:
        return "tolerance";
    case Termination::gradient_small:
        return "gradient_small";
    case Termination::line_search_failed:
        return "line_search_failed";
    case Termination::trust_region_final:
        return "trust_region_final";
    case Termination::iteration_cap:
        return "iteration_cap";
    case Termination::evaluation_cap:
        return "evaluation_cap";
    }
    return "unknown";
}

double SpsaGains::a_k(double a_value, int k) const
{
    return a_value / std::pow(k + 1.0 + A, alpha_exp);
}

double SpsaGains::c_k(int k) const
{
    return c / std::pow(k + 1.0, gamma_exp);
}

OptimizerSpec OptimizerSpec::defaults(OptimizerKind kind, EvalMode mode)
{
    OptimizerSpec s;
    s.kind = kind;
    s.max_iterations = 1000;
    s.fd_step = mode == EvalMode::ideal ? 0.03 : 0.08;
    if (kind == OptimizerKind::nelder_mead) {
        s.max_evaluations = 3000;
    }
    return s;
}

OptimizerSpec OptimizerSpec::resolved(std::size_t dim) const
{
    OptimizerSpec s = *this;
    if (s.max_evaluations > 0) {
        return s;
    }
    const int d = static_cast<int>(dim);
    switch (kind) {
    case OptimizerKind::spsa:
        s.max_evaluations = 2 * max_iterations;
        break;
    case OptimizerKind::cobyla:
        s.max_evaluations = max_iterations;
        break;
    case OptimizerKind::nelder_mead:
        s.max_evaluations = 3000;
        break;
    case OptimizerKind::powell:
        s.max_evaluations = 1000 * d;
        break;
    case OptimizerKind::cg:
    case OptimizerKind::lbfgs:
        s.max_evaluations = std::numeric_limits<int>::max();
        break;
    }
    return s;
}

void OptimizerSpec::validate() const
{
    if (max_iterations < 1) {
        throw ConfigError("max_iterations must be >= 1");
    }
    if (!(fd_step > 0.0)) {
        throw ConfigError("fd_step must be > 0");
    }
    if (!(tolerance >= 0.0)) {
        throw ConfigError("tolerance must be >= 0");
    }
    if (lbfgs_memory < 1) {
        throw ConfigError("lbfgs_memory must be >= 1");
    }
    if (!(cobyla_rho_begin > 0.0 && cobyla_rho_end > 0.0 && cobyla_rho_end <= cobyla_rho_begin)) {
        throw ConfigError("COBYLA radii must satisfy 0 < rho_end <= rho_begin");
    }
    if (!(spsa.c > 0.0) || !(spsa.A >= 0.0) || !(spsa.first_step > 0.0) || spsa.calibration_window < 1) {
        throw ConfigError("SPSA gains need c > 0, A >= 0, first_step > 0, calibration_window >= 1");
    }
}

std::vector<double> central_fd_gradient(const ObjectiveFn& f, std::span<const double> x, double h)
{
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step must be > 0");
    }
    detail::CountedObjective counted(f, std::numeric_limits<std::size_t>::max());
    return counted.gradient(x, h);
}

OptResult minimize(const ObjectiveFn& f, std::span<const double> x0, const OptimizerSpec& spec_in, Rng& rng,
                   const IterationCallback& on_iteration)
{
    spec_in.validate();
    if (x0.empty()) {
        throw ConfigError("cannot minimize over an empty parameter vector");
    }
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw ConfigError("initial point is not finite");
        }
    }
    const OptimizerSpec spec = spec_in.resolved(x0.size());
    detail::CountedObjective counted(f, static_cast<std::size_t>(spec.max_evaluations));
    detail::Run run{counted, spec, rng, on_iteration, 0, Termination::iteration_cap, false, {},
                     std::numeric_limits<double>::infinity()};
    std::vector<double> start(x0.begin(), x0.end());

    try {
        switch (spec.kind) {
        case OptimizerKind::spsa:
            detail::run_spsa(run, std::move(start));
            break;
        case OptimizerKind::nelder_mead:
            detail::run_nelder_mead(run, std::move(start));
            break;
        case OptimizerKind::powell:
            detail::run_powell(run, std::move(start));
            break;
        case OptimizerKind::cobyla:
            detail::run_cobyla(run, std::move(start));
            break;
        case OptimizerKind::cg:
            detail::run_cg(run, std::move(start));
            break;
        case OptimizerKind::lbfgs:
            detail::run_lbfgs(run, std::move(start));
            break;
        }
    } catch (const detail::BudgetExhausted&) {
        run.termination = spec.kind == OptimizerKind::cobyla ? Termination::iteration_cap
                                                              : Termination::evaluation_cap;
    }

    OptResult out;
    if (run.report_incumbent && !run.incumbent_x.empty()) {
        out.best_params = run.incumbent_x;
        out.best_objective = run.incumbent_f;
    } else if (counted.has_best()) {
        out.best_params = counted.best_x();
        out.best_objective = counted.best_f();
    } else {
        out.best_params.assign(x0.begin(), x0.end());
        out.best_objective = std::numeric_limits<double>::quiet_NaN();
    }
    out.grad_probe_evals = counted.probes();
    out.total_evals = counted.total();
    out.gradient_evaluations = counted.gradients();
    out.iterations = run.iterations;
    out.nfev = spec.kind == OptimizerKind::spsa ? run.iterations : counted.nfev();
    out.termination = run.termination;
    out.converged = run.termination == Termination::tolerance ||
                    run.termination == Termination::gradient_small ||
                    run.termination == Termination::trust_region_final;
    return out;
}

} // namespace qumode
