#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace qumode {

namespace {

template <typename Probe>
void spsa_update(Probe&& probe, SpsaState& state, int k, const SpsaGains& gains, Rng& rng)
{
    const std::size_t n = state.x.size();
    const double ck = gains.c_k(k);

    // Rademacher perturbation, one bit per coordinate.
    std::vector<double> delta(n);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) {
            bits = rng();
        }
        delta[i] = (bits & 1u) != 0 ? 1.0 : -1.0;
        bits >>= 1;
    }

    const std::vector<double> plus = detail::axpy(state.x, ck, delta);
    const std::vector<double> minus = detail::axpy(state.x, -ck, delta);
    const double fp = probe(plus);
    const double fm = probe(minus);
    state.last_plus = fp;
    state.last_minus = fm;

    const double diff = (fp - fm) / (2.0 * ck);
    if (gains.a > 0.0) {
        state.a = gains.a;
    } else if (state.diff_count < gains.calibration_window) {
        // |g_i| = |diff| for every coordinate, so a step of norm first_step
        // needs a_0 |diff| sqrt(n) = first_step.
        state.diff_sum += std::abs(diff);
        ++state.diff_count;
        const double mean_diff = state.diff_sum / state.diff_count;
        const double base = gains.first_step * std::pow(1.0 + gains.A, gains.alpha_exp) /
                            std::sqrt(static_cast<double>(n));
        state.a = mean_diff > 0.0 ? base / mean_diff : base;
    }
    const double ak = gains.a_k(state.a, k);
    for (std::size_t i = 0; i < n; ++i) {
        state.x[i] -= ak * diff / delta[i];
    }
}

} // namespace

void spsa_step(const ObjectiveFn& f, SpsaState& state, int k, const SpsaGains& gains, Rng& rng)
{
    spsa_update([&](std::span<const double> x) { return f(x, EvalPurpose::gradient_probe); }, state, k, gains,
                rng);
}

namespace detail {

void run_spsa(Run& run, std::vector<double> x0)
{
    run.report_incumbent = true;
    SpsaState state;
    state.x = std::move(x0);
    const auto probe = [&](std::span<const double> x) { return run.f.probe(x); };
    for (int k = 0; k < run.spec.max_iterations; ++k) {
        spsa_update(probe, state, k, run.spec.spsa, run.rng);
        // The probe pair straddles the pre-update iterate; their mean is the
        // optimizer's only view of the objective.
        run.incumbent_x = state.x;
        run.incumbent_f = 0.5 * (state.last_plus + state.last_minus);
        run.iterate(state.x, run.incumbent_f);
    }
    run.termination = Termination::iteration_cap;
}

} // namespace detail
} // namespace qumode
