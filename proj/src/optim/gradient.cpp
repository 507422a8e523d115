#include <algorithm>
#include <cmath>
#include <deque>

#include "common.hpp"

namespace qumode::detail {

namespace {

struct Step {
    bool accepted = false;
    double t = 0.0;
    std::vector<double> x;
    double f = 0.0;
};

/// Backtracking search for f(x + t d) <= f(x) + c1 t g.d, halving t.
Step backtrack(Run& run, const std::vector<double>& x, double fx, double slope, const std::vector<double>& d,
               double t0)
{
    double t = t0;
    for (int i = 0; i < run.spec.max_line_search_steps; ++i) {
        std::vector<double> xt = axpy(x, t, d);
        const double ft = run.f.value(xt);
        if (ft <= fx + run.spec.armijo_c1 * t * slope) {
            return {true, t, std::move(xt), ft};
        }
        t *= 0.5;
    }
    return {};
}

/// Direction rule shared by CG and L-BFGS. Returns a search direction from
/// the current gradient; reset() drops accumulated curvature information.
class DirectionRule {
public:
    virtual ~DirectionRule() = default;
    virtual std::vector<double> direction(const std::vector<double>& g) = 0;
    virtual void update(const std::vector<double>& s, const std::vector<double>& g_old,
                        const std::vector<double>& g_new) = 0;
    virtual void reset() = 0;
    /// Initial trial step for the line search.
    virtual double initial_step(const std::vector<double>& g, const std::vector<double>& d) = 0;
    virtual void accepted(double t, const std::vector<double>& g, const std::vector<double>& d) = 0;
};

/// Polak-Ribiere+ nonlinear conjugate gradient.
class ConjugateGradient final : public DirectionRule {
public:
    std::vector<double> direction(const std::vector<double>& g) override
    {
        std::vector<double> d(g.size());
        if (prev_d_.empty()) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                d[i] = -g[i];
            }
            return d;
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            d[i] = -g[i] + beta_ * prev_d_[i];
        }
        return d;
    }

    void update(const std::vector<double>&, const std::vector<double>& g_old,
                const std::vector<double>& g_new) override
    {
        double num = 0.0;
        for (std::size_t i = 0; i < g_new.size(); ++i) {
            num += g_new[i] * (g_new[i] - g_old[i]);
        }
        const double den = dot(g_old, g_old);
        beta_ = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    }

    void reset() override
    {
        prev_d_.clear();
        beta_ = 0.0;
    }

    double initial_step(const std::vector<double>& g, const std::vector<double>& d) override
    {
        const double slope = dot(g, d);
        if (prev_slope_ == 0.0 || slope == 0.0) {
            return std::min(1.0, 1.0 / norm2(d));
        }
        return std::min(prev_t_ * prev_slope_ / slope, 1e3);
    }

    void accepted(double t, const std::vector<double>& g, const std::vector<double>& d) override
    {
        prev_t_ = t;
        prev_slope_ = dot(g, d);
        prev_d_ = d;
    }

private:
    std::vector<double> prev_d_;
    double beta_ = 0.0;
    double prev_t_ = 0.0;
    double prev_slope_ = 0.0;
};

/// Limited-memory BFGS two-loop recursion.
class LimitedMemoryBfgs final : public DirectionRule {
public:
    explicit LimitedMemoryBfgs(int memory) : memory_(static_cast<std::size_t>(memory)) {}

    std::vector<double> direction(const std::vector<double>& g) override
    {
        std::vector<double> q = g;
        std::vector<double> alpha(pairs_.size());
        for (std::size_t k = pairs_.size(); k-- > 0;) {
            const auto& p = pairs_[k];
            alpha[k] = p.rho * dot(p.s, q);
            for (std::size_t i = 0; i < q.size(); ++i) {
                q[i] -= alpha[k] * p.y[i];
            }
        }
        double gamma = 1.0;
        if (!pairs_.empty()) {
            const auto& last = pairs_.back();
            gamma = dot(last.s, last.y) / dot(last.y, last.y);
        }
        for (double& v : q) {
            v *= gamma;
        }
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            const auto& p = pairs_[k];
            const double beta = p.rho * dot(p.y, q);
            for (std::size_t i = 0; i < q.size(); ++i) {
                q[i] += (alpha[k] - beta) * p.s[i];
            }
        }
        for (double& v : q) {
            v = -v;
        }
        return q;
    }

    void update(const std::vector<double>& s, const std::vector<double>& g_old,
                const std::vector<double>& g_new) override
    {
        std::vector<double> y(g_new.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = g_new[i] - g_old[i];
        }
        const double sy = dot(s, y);
        // Skip pairs that would break positive definiteness.
        if (!(sy > 1e-10 * norm2(s) * norm2(y))) {
            return;
        }
        pairs_.push_back({s, std::move(y), 1.0 / sy});
        if (pairs_.size() > memory_) {
            pairs_.pop_front();
        }
    }

    void reset() override { pairs_.clear(); }

    double initial_step(const std::vector<double>&, const std::vector<double>& d) override
    {
        return pairs_.empty() ? std::min(1.0, 1.0 / norm2(d)) : 1.0;
    }

    void accepted(double, const std::vector<double>&, const std::vector<double>&) override {}

private:
    struct Pair {
        std::vector<double> s;
        std::vector<double> y;
        double rho;
    };
    std::size_t memory_;
    std::deque<Pair> pairs_;
};

void run_gradient_method(Run& run, std::vector<double> x, DirectionRule& rule)
{
    run.report_incumbent = true;
    const double h = run.spec.fd_step;
    double fx = run.f.value(x);
    run.incumbent_x = x;
    run.incumbent_f = fx;
    std::vector<double> g = run.f.gradient(x, h);

    while (true) {
        if (run.iterations >= static_cast<std::size_t>(run.spec.max_iterations)) {
            run.termination = Termination::iteration_cap;
            return;
        }
        if (norm_inf(g) <= run.spec.gtol) {
            run.termination = Termination::gradient_small;
            return;
        }
        std::vector<double> d = rule.direction(g);
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            rule.reset();
            d = rule.direction(g);
            slope = dot(g, d);
        }
        Step step = backtrack(run, x, fx, slope, d, rule.initial_step(g, d));
        if (!step.accepted) {
            run.termination = Termination::line_search_failed;
            return;
        }
        rule.accepted(step.t, g, d);

        std::vector<double> s(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = step.x[i] - x[i];
        }
        const double f_old = fx;
        x = std::move(step.x);
        fx = step.f;
        run.incumbent_x = x;
        run.incumbent_f = fx;
        run.iterate(x, fx);

        if (f_old - fx <= run.spec.tolerance * std::max({std::abs(f_old), std::abs(fx), 1.0})) {
            run.termination = Termination::tolerance;
            return;
        }
        std::vector<double> g_new = run.f.gradient(x, h);
        rule.update(s, g, g_new);
        g = std::move(g_new);
    }
}

} // namespace

void run_cg(Run& run, std::vector<double> x0)
{
    ConjugateGradient rule;
    run_gradient_method(run, std::move(x0), rule);
}

void run_lbfgs(Run& run, std::vector<double> x0)
{
    LimitedMemoryBfgs rule(run.spec.lbfgs_memory);
    run_gradient_method(run, std::move(x0), rule);
}

} // namespace qumode::detail
