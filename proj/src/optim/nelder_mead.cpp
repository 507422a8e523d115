#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace qumode::detail {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
// Initial simplex: 5% relative perturbation per coordinate, absolute for zeros.
constexpr double kNonzeroDelta = 0.05;
constexpr double kZeroDelta = 0.00025;

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

std::vector<double> blend(std::span<const double> a, double wa, std::span<const double> b, double wb)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = wa * a[i] + wb * b[i];
    }
    return out;
}

} // namespace

void run_nelder_mead(Run& run, std::vector<double> x0)
{
    const std::size_t n = x0.size();
    std::vector<Vertex> sim(n + 1);
    sim[0].x = x0;
    sim[0].f = run.f.value(x0);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> y = x0;
        y[k] = y[k] != 0.0 ? (1.0 + kNonzeroDelta) * y[k] : kZeroDelta;
        sim[k + 1].f = run.f.value(y);
        sim[k + 1].x = std::move(y);
    }
    const auto order = [&] {
        std::stable_sort(sim.begin(), sim.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    const double tol = run.spec.tolerance;
    while (true) {
        double x_spread = 0.0;
        double f_spread = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            f_spread = std::max(f_spread, std::abs(sim[j].f - sim[0].f));
            for (std::size_t i = 0; i < n; ++i) {
                x_spread = std::max(x_spread, std::abs(sim[j].x[i] - sim[0].x[i]));
            }
        }
        if (x_spread <= tol && f_spread <= tol) {
            run.termination = Termination::tolerance;
            return;
        }
        if (run.iterations >= static_cast<std::size_t>(run.spec.max_iterations)) {
            run.termination = Termination::iteration_cap;
            return;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += sim[j].x[i];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(n);
        }
        const Vertex& worst = sim[n];

        const auto xr = blend(centroid, 1.0 + kReflect, worst.x, -kReflect);
        const double fr = run.f.value(xr);
        bool shrink = false;
        if (fr < sim[0].f) {
            const auto xe = blend(centroid, 1.0 + kReflect * kExpand, worst.x, -kReflect * kExpand);
            const double fe = run.f.value(xe);
            if (fe < fr) {
                sim[n] = {xe, fe};
            } else {
                sim[n] = {xr, fr};
            }
        } else if (fr < sim[n - 1].f) {
            sim[n] = {xr, fr};
        } else if (fr < worst.f) {
            const auto xc = blend(centroid, 1.0 + kContract * kReflect, worst.x, -kContract * kReflect);
            const double fc = run.f.value(xc);
            if (fc <= fr) {
                sim[n] = {xc, fc};
            } else {
                shrink = true;
            }
        } else {
            const auto xcc = blend(centroid, 1.0 - kContract, worst.x, kContract);
            const double fcc = run.f.value(xcc);
            if (fcc < worst.f) {
                sim[n] = {xcc, fcc};
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t j = 1; j <= n; ++j) {
                sim[j].x = blend(sim[0].x, 1.0 - kShrink, sim[j].x, kShrink);
                sim[j].f = run.f.value(sim[j].x);
            }
        }
        order();
        run.iterate(sim[0].x, sim[0].f);
    }
}

} // namespace qumode::detail
