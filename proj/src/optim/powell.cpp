#include <algorithm>
#include <cmath>
#include <utility>

#include "common.hpp"

namespace qumode::detail {

namespace {

constexpr double kGold = 1.618034;
constexpr double kGoldSection = 0.3819660;
constexpr double kTiny = 1e-21;
constexpr double kBrentMinTol = 1e-11;
constexpr double kGrowLimit = 110.0;
constexpr int kBracketMaxIter = 1000;
constexpr int kBrentMaxIter = 500;

struct Bracket {
    double xa, xb, xc;
    double fa, fb, fc;
};

/// Downhill bracket search from (0, 1) with parabolic extrapolation.
template <typename F>
Bracket bracket_minimum(F&& func)
{
    double xa = 0.0;
    double xb = 1.0;
    double fa = func(xa);
    double fb = func(xb);
    if (fa < fb) {
        std::swap(xa, xb);
        std::swap(fa, fb);
    }
    double xc = xb + kGold * (xb - xa);
    double fc = func(xc);
    for (int iter = 0; fc < fb && iter < kBracketMaxIter; ++iter) {
        const double tmp1 = (xb - xa) * (fb - fc);
        const double tmp2 = (xb - xc) * (fb - fa);
        const double val = tmp2 - tmp1;
        const double denom = std::abs(val) < kTiny ? 2.0 * kTiny : 2.0 * val;
        double w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom;
        const double wlim = xb + kGrowLimit * (xc - xb);
        double fw = 0.0;
        if ((w - xc) * (xb - w) > 0.0) {
            fw = func(w);
            if (fw < fc) {
                return {xb, w, xc, fb, fw, fc};
            }
            if (fw > fb) {
                return {xa, xb, w, fa, fb, fw};
            }
            w = xc + kGold * (xc - xb);
            fw = func(w);
        } else if ((w - wlim) * (wlim - xc) >= 0.0) {
            w = wlim;
            fw = func(w);
        } else if ((w - wlim) * (xc - w) > 0.0) {
            fw = func(w);
            if (fw < fc) {
                xb = xc;
                xc = w;
                w = xc + kGold * (xc - xb);
                fb = fc;
                fc = fw;
                fw = func(w);
            }
        } else {
            w = xc + kGold * (xc - xb);
            fw = func(w);
        }
        xa = xb;
        xb = xc;
        xc = w;
        fa = fb;
        fb = fc;
        fc = fw;
    }
    return {xa, xb, xc, fa, fb, fc};
}

/// Brent's parabolic/golden-section minimizer inside a bracket.
template <typename F>
std::pair<double, double> brent(F&& func, const Bracket& br, double tol)
{
    double x = br.xb;
    double w = x;
    double v = x;
    double fx = br.fb;
    double fw = fx;
    double fv = fx;
    double a = std::min(br.xa, br.xc);
    double b = std::max(br.xa, br.xc);
    double deltax = 0.0;
    double rat = 0.0;
    for (int iter = 0; iter < kBrentMaxIter; ++iter) {
        const double tol1 = tol * std::abs(x) + kBrentMinTol;
        const double tol2 = 2.0 * tol1;
        const double xmid = 0.5 * (a + b);
        if (std::abs(x - xmid) < tol2 - 0.5 * (b - a)) {
            break;
        }
        if (std::abs(deltax) <= tol1) {
            deltax = x >= xmid ? a - x : b - x;
            rat = kGoldSection * deltax;
        } else {
            const double t1 = (x - w) * (fx - fv);
            double t2 = (x - v) * (fx - fw);
            double p = (x - v) * t2 - (x - w) * t1;
            t2 = 2.0 * (t2 - t1);
            if (t2 > 0.0) {
                p = -p;
            }
            t2 = std::abs(t2);
            const double prev = deltax;
            deltax = rat;
            if (p > t2 * (a - x) && p < t2 * (b - x) && std::abs(p) < std::abs(0.5 * t2 * prev)) {
                rat = p / t2;
                const double u = x + rat;
                if (u - a < tol2 || b - u < tol2) {
                    rat = xmid - x >= 0.0 ? tol1 : -tol1;
                }
            } else {
                deltax = x >= xmid ? a - x : b - x;
                rat = kGoldSection * deltax;
            }
        }
        const double u = std::abs(rat) < tol1 ? (rat >= 0.0 ? x + tol1 : x - tol1) : x + rat;
        const double fu = func(u);
        if (fu > fx) {
            if (u < x) {
                a = u;
            } else {
                b = u;
            }
            if (fu <= fw || w == x) {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        } else {
            if (u >= x) {
                a = x;
            } else {
                b = x;
            }
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        }
    }
    return {x, fx};
}

struct LineResult {
    double f;
    std::vector<double> x;
    std::vector<double> step;
};

LineResult line_minimize(Run& run, const std::vector<double>& p, const std::vector<double>& dir, double fval)
{
    if (norm_inf(dir) == 0.0) {
        return {fval, p, dir};
    }
    const auto along = [&](double t) { return run.f.value(axpy(p, t, dir)); };
    const Bracket br = bracket_minimum(along);
    const auto [t, ft] = brent(along, br, run.spec.powell_line_tol);
    std::vector<double> step(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) {
        step[i] = t * dir[i];
    }
    return {ft, axpy(p, 1.0, step), std::move(step)};
}

} // namespace

void run_powell(Run& run, std::vector<double> x0)
{
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> directions(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        directions[i][i] = 1.0;
    }
    std::vector<double> x = std::move(x0);
    double fval = run.f.value(x);
    std::vector<double> x_start = x;

    while (true) {
        const double f_start = fval;
        std::size_t biggest = 0;
        double biggest_drop = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double before = fval;
            LineResult lr = line_minimize(run, x, directions[i], fval);
            fval = lr.f;
            x = std::move(lr.x);
            if (before - fval > biggest_drop) {
                biggest_drop = before - fval;
                biggest = i;
            }
        }
        run.iterate(x, fval);

        if (2.0 * (f_start - fval) <= run.spec.tolerance * (std::abs(f_start) + std::abs(fval)) + 1e-20) {
            run.termination = Termination::tolerance;
            return;
        }
        if (run.iterations >= static_cast<std::size_t>(run.spec.max_iterations)) {
            run.termination = Termination::iteration_cap;
            return;
        }

        // Conjugate-direction update along the net displacement of the cycle.
        std::vector<double> net(n);
        std::vector<double> extrapolated(n);
        for (std::size_t i = 0; i < n; ++i) {
            net[i] = x[i] - x_start[i];
            extrapolated[i] = 2.0 * x[i] - x_start[i];
        }
        x_start = x;
        const double f_extra = run.f.value(extrapolated);
        if (f_start > f_extra) {
            double t = 2.0 * (f_start + f_extra - 2.0 * fval);
            double tmp = f_start - fval - biggest_drop;
            t *= tmp * tmp;
            tmp = f_start - f_extra;
            t -= biggest_drop * tmp * tmp;
            if (t < 0.0) {
                LineResult lr = line_minimize(run, x, net, fval);
                fval = lr.f;
                x = std::move(lr.x);
                if (norm_inf(lr.step) > 0.0) {
                    directions[biggest] = directions.back();
                    directions.back() = std::move(lr.step);
                }
            }
        }
    }
}

} // namespace qumode::detail
