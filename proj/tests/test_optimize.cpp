#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qumode/errors.hpp"
#include "qumode/objective.hpp"
#include "qumode/optimize.hpp"

using namespace qumode;

namespace {

/// Wraps a plain function and records every call with its purpose.
struct Logged {
    std::function<double(std::span<const double>)> fn;
    std::vector<std::pair<EvalPurpose, double>> calls;

    ObjectiveFn objective()
    {
        return [this](std::span<const double> x, EvalPurpose purpose) {
            const double v = fn(x);
            calls.emplace_back(purpose, v);
            return v;
        };
    }
    std::size_t count(EvalPurpose p) const
    {
        return static_cast<std::size_t>(
            std::count_if(calls.begin(), calls.end(), [&](const auto& c) { return c.first == p; }));
    }
    double best_objective_call() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [p, v] : calls) {
            if (p == EvalPurpose::objective) {
                best = std::min(best, v);
            }
        }
        return best;
    }
};

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s;
}

double rosenbrock(std::span<const double> x)
{
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

/// Ideal benchmark objective at 2 layers.
ObjectiveFn benchmark_objective(int layers, EvalMode mode = EvalMode::ideal, Rng* rng = nullptr)
{
    auto cfg = std::make_shared<ObjectiveConfig>();
    cfg->ansatz.n_layers = layers;
    cfg->target = TargetSpec::gaussian().resolve();
    cfg->mode = mode;
    return [cfg, rng](std::span<const double> x, EvalPurpose purpose) {
        return evaluate(x, *cfg, rng, purpose).objective;
    };
}

const std::vector<OptimizerKind> kAllKinds = {OptimizerKind::spsa,   OptimizerKind::nelder_mead,
                                              OptimizerKind::powell, OptimizerKind::cobyla,
                                              OptimizerKind::cg,     OptimizerKind::lbfgs};

} // namespace

TEST_CASE("nelder-mead minimizes the sphere")
{
    Logged f{sphere, {}};
    Rng rng(0);
    const std::vector<double> x0 = {1, 1, 1};
    const OptResult r = minimize(f.objective(), x0, OptimizerSpec::defaults(OptimizerKind::nelder_mead), rng);
    CHECK(r.best_objective <= 1e-8);
    CHECK(r.grad_probe_evals == 0);
    CHECK(r.best_objective == f.best_objective_call());
    CHECK(r.total_evals == f.calls.size());
}

TEST_CASE("cg finds the minimum of a shifted quadratic")
{
    Logged f{[](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); }, {}};
    Rng rng(0);
    const std::vector<double> x0 = {0.0};
    OptimizerSpec spec = OptimizerSpec::defaults(OptimizerKind::cg);
    spec.fd_step = 0.03;
    const OptResult r = minimize(f.objective(), x0, spec, rng);
    CHECK(std::abs(r.best_params[0] - 3.0) <= 1e-3);
}

TEST_CASE("powell solves Rosenbrock from the classic start")
{
    Rng rng(0);
    const std::vector<double> x0 = {-1.2, 1.0};
    Logged f{rosenbrock, {}};
    const OptResult r = minimize(f.objective(), x0, OptimizerSpec::defaults(OptimizerKind::powell), rng);
    CHECK(r.best_objective <= 1e-6);
    CHECK(std::abs(r.best_params[0] - 1.0) <= 1e-2);
    CHECK(std::abs(r.best_params[1] - 1.0) <= 2e-2);
    CHECK(r.grad_probe_evals == 0);
}

TEST_CASE("cobyla and lbfgs reach the sphere minimum")
{
    const std::vector<double> x0 = {0.7, -0.4, 1.3};
    for (auto kind : {OptimizerKind::cobyla, OptimizerKind::lbfgs}) {
        Logged f{sphere, {}};
        Rng rng(0);
        const OptResult r = minimize(f.objective(), x0, OptimizerSpec::defaults(kind), rng);
        CHECK(r.best_objective <= 1e-6);
        CHECK(r.converged);
    }
}

TEST_CASE("central differences")
{
    int calls = 0;
    const ObjectiveFn square = [&](std::span<const double> x, EvalPurpose p) {
        ++calls;
        CHECK(p == EvalPurpose::gradient_probe);
        return x[0] * x[0];
    };
    const std::vector<double> x = {2.0};
    CHECK(central_fd_gradient(square, x, 0.03)[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(calls == 2);

    const ObjectiveFn linear = [](std::span<const double> v, EvalPurpose) { return v[0] + 2.0 * v[1]; };
    const std::vector<double> y = {0.4, -7.0};
    const auto g = central_fd_gradient(linear, y, 0.08);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(central_fd_gradient(linear, y, 0.0), ConfigError);
}

TEST_CASE("central differences on the benchmark objective track a fine-step reference")
{
    const ObjectiveFn f = benchmark_objective(2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(10);
        for (double& v : x) {
            v = u(rng);
        }
        const auto coarse = central_fd_gradient(f, x, 0.03);
        const auto fine = central_fd_gradient(f, x, 1e-6);
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff += (coarse[i] - fine[i]) * (coarse[i] - fine[i]);
            scale += fine[i] * fine[i];
        }
        CHECK(std::sqrt(diff / scale) <= 1e-2);
    }
}

TEST_CASE("spsa step uses two evaluations whatever the dimension")
{
    int calls = 0;
    const ObjectiveFn f = [&](std::span<const double> x, EvalPurpose) {
        ++calls;
        return sphere(x);
    };
    SpsaState state;
    state.x.assign(50, 0.5);
    Rng rng(1);
    const SpsaGains gains;
    for (int k = 0; k < 100; ++k) {
        spsa_step(f, state, k, gains, rng);
    }
    CHECK(calls == 200);
}

TEST_CASE("spsa gradient estimate is unbiased on a linear function")
{
    const std::vector<double> g = {1.0, -2.0, 0.5, 3.0};
    const ObjectiveFn f = [&](std::span<const double> x, EvalPurpose) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += g[i] * x[i];
        }
        return s;
    };
    SpsaGains gains;
    gains.a = 1.0;
    const double ak = gains.a_k(gains.a, 0);
    Rng rng(8);
    std::vector<double> mean(4, 0.0);
    const int samples = 20000;
    for (int s = 0; s < samples; ++s) {
        SpsaState state;
        state.x.assign(4, 0.0);
        spsa_step(f, state, 0, gains, rng);
        for (std::size_t i = 0; i < 4; ++i) {
            mean[i] += -state.x[i] / ak / samples;
        }
    }
    // Each component is g_i plus a mean-zero sum of +-g_j; se about sqrt(sum g_j^2 / samples).
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(mean[i] - g[i]) <= 0.15);
    }
}

TEST_CASE("spsa shrinks the sphere with default gains")
{
    std::vector<double> ratios;
    const std::vector<double> x0 = {1.0, -0.5, 0.8, 0.3};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const ObjectiveFn f = [](std::span<const double> x, EvalPurpose) { return sphere(x); };
        const OptResult r = minimize(f, x0, OptimizerSpec::defaults(OptimizerKind::spsa), rng);
        ratios.push_back(sphere(r.best_params) / sphere(x0));
    }
    std::nth_element(ratios.begin(), ratios.begin() + 15, ratios.end());
    CHECK(ratios[15] <= 1e-2);
}

TEST_CASE("evaluation accounting")
{
    const std::vector<double> x0 = {0.3, 0.1, 1.0, 0.5, 2.0, -0.2, 0.4, 0.7, 1.5, 0.9};
    const double f0 = benchmark_objective(2)(x0, EvalPurpose::objective);
    for (auto kind : kAllKinds) {
        CAPTURE(optimizer_name(kind));
        Logged f{[inner = benchmark_objective(2)](std::span<const double> x) {
                     return inner(x, EvalPurpose::objective);
                 },
                 {}};
        Rng rng(3);
        OptimizerSpec spec = OptimizerSpec::defaults(kind);
        spec.max_iterations = kind == OptimizerKind::spsa ? 200 : spec.max_iterations;
        const OptResult r = minimize(f.objective(), x0, spec, rng);
        CHECK(r.total_evals == f.calls.size());
        CHECK(r.grad_probe_evals == f.count(EvalPurpose::gradient_probe));
        switch (kind) {
        case OptimizerKind::spsa:
            CHECK(r.total_evals == 2 * r.iterations);
            CHECK(r.nfev == r.iterations);
            CHECK(r.iterations == 200);
            break;
        case OptimizerKind::cg:
        case OptimizerKind::lbfgs:
            CHECK(r.nfev == f.count(EvalPurpose::objective));
            CHECK(r.total_evals == r.nfev + 2 * x0.size() * r.gradient_evaluations);
            CHECK(r.best_objective <= f0);
            break;
        default:
            CHECK(r.grad_probe_evals == 0);
            CHECK(r.nfev == r.total_evals);
            CHECK(r.best_objective == f.best_objective_call());
            CHECK(r.best_objective <= f0);
        }
    }
}

TEST_CASE("cobyla stops at its iteration cap")
{
    Logged f{rosenbrock, {}};
    Rng rng(0);
    OptimizerSpec spec = OptimizerSpec::defaults(OptimizerKind::cobyla);
    spec.max_iterations = 40;
    const std::vector<double> x0 = {-1.2, 1.0};
    const OptResult r = minimize(f.objective(), x0, spec, rng);
    CHECK(r.termination == Termination::iteration_cap);
    CHECK(r.nfev == 40);
    CHECK_FALSE(r.converged);
}

TEST_CASE("a non-finite objective aborts the run")
{
    for (auto kind : kAllKinds) {
        CAPTURE(optimizer_name(kind));
        int calls = 0;
        const ObjectiveFn f = [&](std::span<const double> x, EvalPurpose) {
            return ++calls > 5 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
        };
        Rng rng(0);
        const std::vector<double> x0 = {1.0, 2.0};
        CHECK_THROWS_AS(minimize(f, x0, OptimizerSpec::defaults(kind), rng), OptimizerAbort);
    }
}

TEST_CASE("minimize is deterministic for a fixed seed")
{
    const std::vector<double> x0 = {0.2, -0.3, 1.0, 2.0, 0.1};
    for (auto kind : kAllKinds) {
        CAPTURE(optimizer_name(kind));
        OptResult results[2];
        for (auto& r : results) {
            Rng rng(77);
            Rng shots(78);
            OptimizerSpec spec = OptimizerSpec::defaults(kind, EvalMode::sampled);
            spec.max_iterations = 100;
            r = minimize(benchmark_objective(1, EvalMode::sampled, &shots), x0, spec, rng);
        }
        CHECK(results[0].best_params == results[1].best_params);
        CHECK(results[0].best_objective == results[1].best_objective);
        CHECK(results[0].total_evals == results[1].total_evals);
    }
}

TEST_CASE("optimizer spec validation and names")
{
    OptimizerSpec spec;
    spec.fd_step = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = OptimizerSpec{};
    spec.max_iterations = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK(parse_optimizer("nelder-mead") == OptimizerKind::nelder_mead);
    CHECK(parse_optimizer("l-bfgs") == OptimizerKind::lbfgs);
    CHECK_THROWS_AS(parse_optimizer("slsqp"), ConfigError);
    CHECK(OptimizerSpec::defaults(OptimizerKind::cg, EvalMode::sampled).fd_step == 0.08);
    CHECK(OptimizerSpec::defaults(OptimizerKind::cg, EvalMode::ideal).fd_step == 0.03);
    CHECK(OptimizerSpec::defaults(OptimizerKind::nelder_mead).resolved(5).max_evaluations == 3000);

    SpsaGains gains;
    for (int k = 0; k < 100; ++k) {
        CHECK(gains.a_k(1.0, k + 1) < gains.a_k(1.0, k));
        CHECK(gains.c_k(k + 1) < gains.c_k(k));
        CHECK(gains.c_k(k) > 0.0);
    }
}

TEST_CASE("empty or non-finite starting points are rejected")
{
    Rng rng(0);
    const ObjectiveFn f = [](std::span<const double> x, EvalPurpose) { return sphere(x); };
    const std::vector<double> empty;
    CHECK_THROWS_AS(minimize(f, empty, OptimizerSpec{}, rng), ConfigError);
    const std::vector<double> bad = {std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(minimize(f, bad, OptimizerSpec{}, rng), ConfigError);
}
