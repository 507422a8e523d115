#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qumode/errors.hpp"

namespace qumode::detail {

CountedObjective::CountedObjective(const ObjectiveFn& f, std::size_t max_total_calls)
    : f_(f), budget_(max_total_calls)
{
}

double CountedObjective::call(std::span<const double> x, EvalPurpose purpose)
{
    if (total() >= budget_) {
        throw BudgetExhausted{};
    }
    const double v = f_(x, purpose);
    if (purpose == EvalPurpose::objective) {
        ++nfev_;
    } else {
        ++probes_;
    }
    if (!std::isfinite(v)) {
        throw OptimizerAbort("objective returned a non-finite value at call " + std::to_string(total()));
    }
    return v;
}

double CountedObjective::value(std::span<const double> x)
{
    const double v = call(x, EvalPurpose::objective);
    if (v < best_f_) {
        best_f_ = v;
        best_x_.assign(x.begin(), x.end());
    }
    return v;
}

double CountedObjective::probe(std::span<const double> x)
{
    return call(x, EvalPurpose::gradient_probe);
}

std::vector<double> CountedObjective::gradient(std::span<const double> x, double h)
{
    // Whole gradient or nothing: a partial probe set would break accounting.
    if (total() + 2 * x.size() > budget_) {
        throw BudgetExhausted{};
    }
    std::vector<double> g(x.size());
    std::vector<double> xp(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = probe(xp);
        xp[i] = x[i] - h;
        const double fm = probe(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    ++gradients_;
    return g;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

std::vector<double> axpy(std::span<const double> a, double t, std::span<const double> d)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + t * d[i];
    }
    return out;
}

} // namespace qumode::detail
