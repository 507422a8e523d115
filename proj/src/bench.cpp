#include "qumode/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "qumode/errors.hpp"

namespace qumode {

namespace {

constexpr std::uint32_t kInitStream = 1;
constexpr std::uint32_t kShotStream = 2;

} // namespace

void ExperimentConfig::validate() const
{
    if (layers < 1) {
        throw ConfigError("layers must be >= 1");
    }
    if (trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (mode == EvalMode::sampled && shots < 1) {
        throw ConfigError("shots must be >= 1 in sampled mode");
    }
    if (!(convergence_threshold > 0.0 && convergence_threshold < 1.0)) {
        throw ConfigError("convergence threshold must lie in (0, 1)");
    }
    if (!(init.angle_lo <= init.angle_hi && init.displacement_lo <= init.displacement_hi)) {
        throw ConfigError("initialization ranges are inverted");
    }
    if (forced_x0 && forced_x0->size() != LayerParams::kCount * static_cast<std::size_t>(layers)) {
        throw ConfigError("forced initial point has the wrong length");
    }
    optimizer.validate();
    objective_config().validate();
}

ObjectiveConfig ExperimentConfig::objective_config() const
{
    ObjectiveConfig oc;
    oc.mode = mode;
    oc.shots = shots;
    oc.clamp_floor = clamp_floor;
    oc.ansatz.n_layers = layers;
    oc.ansatz.cutoff = target.cutoff;
    oc.target = target.resolve();
    return oc;
}

std::string ExperimentConfig::cell_key() const
{
    const auto& o = optimizer;
    nlohmann::json j;
    j["target"] = target.label();
    j["cutoff"] = target.cutoff.levels();
    j["optimizer"] = optimizer_name(o.kind);
    j["layers"] = layers;
    j["mode"] = mode_name(mode);
    j["shots"] = mode == EvalMode::sampled ? shots : 0;
    j["fd_step"] = uses_gradient_probes(o.kind) && o.kind != OptimizerKind::spsa ? o.fd_step : 0.0;
    j["trials"] = trials;
    j["seed"] = base_seed;
    j["threshold"] = convergence_threshold;
    j["clamp_floor"] = clamp_floor;
    j["init"] = {init.angle_lo, init.angle_hi, init.displacement_lo, init.displacement_hi};
    j["opt"] = {o.max_iterations, o.max_evaluations, o.tolerance, o.gtol, o.lbfgs_memory,
                o.max_line_search_steps, o.armijo_c1, o.powell_line_tol, o.cobyla_rho_begin,
                o.cobyla_rho_end, o.spsa.a, o.spsa.c, o.spsa.A, o.spsa.alpha_exp, o.spsa.gamma_exp,
                o.spsa.first_step, o.spsa.calibration_window};
    if (target.family == TargetFamily::explicit_amplitudes) {
        std::vector<double> flat;
        for (const auto& a : target.amplitudes) {
            flat.push_back(a.real());
            flat.push_back(a.imag());
        }
        j["amplitudes"] = flat;
    }
    if (record_trace) {
        j["trace"] = true;
    }
    if (forced_x0) {
        j["x0"] = *forced_x0;
    }
    return j.dump();
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index)
{
    Rng r = child_stream(base_seed, trial_index);
    return r();
}

std::vector<double> draw_initial_params(const ExperimentConfig& cfg, Rng& rng)
{
    std::uniform_real_distribution<double> angle(cfg.init.angle_lo, cfg.init.angle_hi);
    std::uniform_real_distribution<double> disp(cfg.init.displacement_lo, cfg.init.displacement_hi);
    std::vector<double> x;
    x.reserve(LayerParams::kCount * static_cast<std::size_t>(cfg.layers));
    for (int l = 0; l < cfg.layers; ++l) {
        x.push_back(disp(rng));
        x.push_back(disp(rng));
        x.push_back(angle(rng));
        x.push_back(angle(rng));
        x.push_back(angle(rng));
    }
    return x;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index)
{
    const auto start = std::chrono::steady_clock::now();
    TrialResult res;
    res.trial_index = trial_index;
    res.seed = trial_seed(cfg.base_seed, trial_index);

    Rng opt_rng = child_stream(res.seed, 0, kInitStream);
    Rng shot_rng = child_stream(res.seed, 0, kShotStream);

    ObjectiveConfig oc = cfg.objective_config();
    ObjectiveConfig ideal = oc;
    ideal.mode = EvalMode::ideal;
    res.initial_params = cfg.forced_x0 ? *cfg.forced_x0 : draw_initial_params(cfg, opt_rng);

    Evaluator evaluator(std::move(oc), &shot_rng);
    const ObjectiveFn f = [&](std::span<const double> x, EvalPurpose purpose) { return evaluator(x, purpose); };

    IterationCallback trace_cb;
    const bool tracing = cfg.record_trace && trial_index == 0;
    if (tracing) {
        trace_cb = [&](std::size_t it, std::span<const double> x, double fx) {
            res.trace.push_back({it, fx, 1.0 - std::sqrt(fidelity(x, ideal))});
        };
    }

    const OptResult opt = minimize(f, res.initial_params, cfg.optimizer, opt_rng, trace_cb);
    res.final_params = opt.best_params;
    res.final_objective = opt.best_objective;
    res.final_true_infidelity = 1.0 - std::sqrt(fidelity(opt.best_params, ideal));
    res.nfev = opt.nfev;
    res.grad_probe_evals = opt.grad_probe_evals;
    res.total_evals = opt.total_evals;
    res.iterations = opt.iterations;
    res.termination = opt.termination;
    res.converged = res.final_true_infidelity <= cfg.convergence_threshold;
    if (res.total_evals != evaluator.log().size()) {
        throw Error("evaluation accounting mismatch: optimizer counted " + std::to_string(res.total_evals) +
                    ", log holds " + std::to_string(evaluator.log().size()));
    }
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::pair<double, double> mean_std(std::span<const double> values)
{
    if (values.empty()) {
        return {0.0, 0.0};
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

BenchRow aggregate(const ExperimentConfig& cfg, std::span<const TrialResult> trials)
{
    BenchRow row;
    row.cell_key = cfg.cell_key();
    row.target = cfg.target.label();
    row.optimizer = std::string(optimizer_name(cfg.optimizer.kind));
    row.layers = cfg.layers;
    row.mode = std::string(mode_name(cfg.mode));
    row.shots = cfg.mode == EvalMode::sampled ? cfg.shots : 0;
    row.fd_step = cfg.optimizer.fd_step;
    row.trials = trials.size();

    std::vector<double> infid;
    std::vector<double> nfev;
    std::vector<double> total;
    std::vector<double> objective;
    std::size_t failures = 0;
    for (const auto& t : trials) {
        infid.push_back(t.final_true_infidelity);
        nfev.push_back(static_cast<double>(t.nfev));
        total.push_back(static_cast<double>(t.total_evals));
        objective.push_back(t.final_objective);
        if (t.final_true_infidelity > cfg.convergence_threshold) {
            ++failures;
        }
    }
    std::tie(row.infidelity_mean, row.infidelity_std) = mean_std(infid);
    std::tie(row.nfev_mean, row.nfev_std) = mean_std(nfev);
    std::tie(row.objective_mean, row.objective_std) = mean_std(objective);
    row.total_evals_mean = mean_std(total).first;
    row.nonconverged_pct =
        trials.empty() ? 0.0 : 100.0 * static_cast<double>(failures) / static_cast<double>(trials.size());
    return row;
}

CellResult run_cell(const ExperimentConfig& cfg, int parallelism)
{
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.trials);
    std::vector<std::optional<TrialResult>> slots(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string first_error;
    std::size_t first_error_index = n;

    const auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                slots[i] = run_trial(cfg, i);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = e.what();
                }
                failed.store(true);
            }
        }
    };

    const auto workers = static_cast<std::size_t>(std::max(1, parallelism));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) {
            pool.emplace_back(worker);
        }
    }

    std::vector<TrialResult> done;
    for (auto& s : slots) {
        if (s) {
            done.push_back(std::move(*s));
        }
    }
    if (failed.load()) {
        throw CellAborted("trial " + std::to_string(first_error_index) + " of cell " + cfg.target.label() + "/" +
                              std::string(optimizer_name(cfg.optimizer.kind)) + "/L" +
                              std::to_string(cfg.layers) + " aborted: " + first_error,
                          std::move(done));
    }
    CellResult out;
    out.row = aggregate(cfg, done);
    out.trials = std::move(done);
    return out;
}

} // namespace qumode
