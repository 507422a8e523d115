#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qumode/optimize.hpp"

namespace qumode::detail {

/// Thrown inside an algorithm when the evaluation budget is spent; caught by
/// minimize(), never escapes the library.
struct BudgetExhausted {};

/// Wraps the user objective: counts calls by purpose, enforces the budget,
/// rejects non-finite values and tracks the best objective-purpose call.
class CountedObjective {
public:
    CountedObjective(const ObjectiveFn& f, std::size_t max_total_calls);

    double value(std::span<const double> x);
    double probe(std::span<const double> x);
    std::vector<double> gradient(std::span<const double> x, double h);

    std::size_t nfev() const noexcept { return nfev_; }
    std::size_t probes() const noexcept { return probes_; }
    std::size_t gradients() const noexcept { return gradients_; }
    std::size_t total() const noexcept { return nfev_ + probes_; }
    bool has_best() const noexcept { return !best_x_.empty(); }
    const std::vector<double>& best_x() const noexcept { return best_x_; }
    double best_f() const noexcept { return best_f_; }

private:
    double call(std::span<const double> x, EvalPurpose purpose);

    const ObjectiveFn& f_;
    std::size_t budget_;
    std::size_t nfev_ = 0;
    std::size_t probes_ = 0;
    std::size_t gradients_ = 0;
    std::vector<double> best_x_;
    double best_f_ = std::numeric_limits<double>::infinity();
};

/// Shared state of one minimize() call.
struct Run {
    CountedObjective& f;
    const OptimizerSpec& spec;
    Rng& rng;
    const IterationCallback& on_iteration;

    std::size_t iterations = 0;
    Termination termination = Termination::iteration_cap;
    /// Gradient-based methods and SPSA report their accepted iterate instead
    /// of the best logged call.
    bool report_incumbent = false;
    std::vector<double> incumbent_x;
    double incumbent_f = std::numeric_limits<double>::infinity();

    void iterate(std::span<const double> x, double fx)
    {
        if (on_iteration) {
            on_iteration(iterations, x, fx);
        }
        ++iterations;
    }
};

void run_spsa(Run& run, std::vector<double> x0);
void run_nelder_mead(Run& run, std::vector<double> x0);
void run_powell(Run& run, std::vector<double> x0);
void run_cobyla(Run& run, std::vector<double> x0);
void run_cg(Run& run, std::vector<double> x0);
void run_lbfgs(Run& run, std::vector<double> x0);

// small dense helpers on std::vector<double>
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// a + t * d
std::vector<double> axpy(std::span<const double> a, double t, std::span<const double> d);

} // namespace qumode::detail
