#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "common.hpp"

namespace qumode::detail {

namespace {

// Simplex acceptability: every vertex within 2.1 rho of the pivot and no
// vertex closer than 0.25 rho to the face spanned by the others.
constexpr double kSigmaFactor = 0.25;
constexpr double kEtaFactor = 2.1;
constexpr double kGeometryStep = 0.5;
constexpr double kGoodRatio = 0.1;

/// Pivot (best point) plus n vertices stored as displacements from it.
class Simplex {
public:
    Simplex(std::vector<double> pivot, double f_pivot, Eigen::MatrixXd sim, Eigen::VectorXd fvals)
        : pivot_(std::move(pivot)), f_pivot_(f_pivot), sim_(std::move(sim)), fvals_(std::move(fvals))
    {
        refresh();
    }

    std::size_t dim() const { return pivot_.size(); }
    const std::vector<double>& pivot() const { return pivot_; }
    double f_pivot() const { return f_pivot_; }
    const Eigen::MatrixXd& sim() const { return sim_; }
    const Eigen::MatrixXd& simi() const { return simi_; }

    std::vector<double> point(const Eigen::VectorXd& d) const
    {
        std::vector<double> x = pivot_;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += d(static_cast<Eigen::Index>(i));
        }
        return x;
    }

    /// Moves the pivot onto the lowest vertex when it beats the current pivot.
    void make_pivot_optimal()
    {
        Eigen::Index j = 0;
        const double fmin = fvals_.minCoeff(&j);
        if (!(fmin < f_pivot_)) {
            return;
        }
        const Eigen::VectorXd shift = sim_.col(j);
        for (std::size_t i = 0; i < pivot_.size(); ++i) {
            pivot_[i] += shift(static_cast<Eigen::Index>(i));
        }
        for (Eigen::Index k = 0; k < sim_.cols(); ++k) {
            sim_.col(k) -= shift;
        }
        sim_.col(j) = -shift;
        std::swap(fvals_(j), f_pivot_);
        refresh();
    }

    /// Gradient of the linear interpolant through the n + 1 points.
    Eigen::VectorXd model_gradient() const
    {
        const Eigen::VectorXd df = fvals_.array() - f_pivot_;
        return simi_.transpose() * df;
    }

    void replace(Eigen::Index j, const Eigen::VectorXd& d, double f)
    {
        sim_.col(j) = d;
        fvals_(j) = f;
        refresh();
    }

private:
    void refresh() { simi_ = sim_.inverse(); }

    std::vector<double> pivot_;
    double f_pivot_;
    Eigen::MatrixXd sim_;
    Eigen::MatrixXd simi_;
    Eigen::VectorXd fvals_;
};

} // namespace

void run_cobyla(Run& run, std::vector<double> x0)
{
    const auto n = static_cast<Eigen::Index>(x0.size());
    const double rho_end = run.spec.cobyla_rho_end;
    double rho = run.spec.cobyla_rho_begin;

    const double f0 = run.f.value(x0);
    Eigen::VectorXd fvals(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<double> xj = x0;
        xj[static_cast<std::size_t>(j)] += rho;
        fvals(j) = run.f.value(xj);
    }
    Simplex simplex(x0, f0, rho * Eigen::MatrixXd::Identity(n, n), fvals);

    bool skip_geometry_check = false;
    while (true) {
        simplex.make_pivot_optimal();
        const Eigen::VectorXd g = simplex.model_gradient();

        Eigen::VectorXd veta(n);
        Eigen::VectorXd vsig(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            veta(j) = simplex.sim().col(j).norm();
            vsig(j) = 1.0 / simplex.simi().row(j).norm();
        }
        const double par_sig = kSigmaFactor * rho;
        const double par_eta = kEtaFactor * rho;
        const bool acceptable = (veta.array() <= par_eta).all() && (vsig.array() >= par_sig).all();

        if (!acceptable && !skip_geometry_check) {
            Eigen::Index jdrop = -1;
            double worst = par_eta;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (veta(j) > worst) {
                    worst = veta(j);
                    jdrop = j;
                }
            }
            if (jdrop < 0) {
                double smallest = par_sig;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (vsig(j) < smallest) {
                        smallest = vsig(j);
                        jdrop = j;
                    }
                }
            }
            // Step of length kGeometryStep * rho normal to the face opposite jdrop.
            Eigen::VectorXd d = kGeometryStep * rho * vsig(jdrop) * simplex.simi().row(jdrop).transpose();
            if (g.dot(d) > 0.0) {
                d = -d;
            }
            const double fd = run.f.value(simplex.point(d));
            simplex.replace(jdrop, d, fd);
            skip_geometry_check = true;
            continue;
        }
        skip_geometry_check = false;

        bool reduce = false;
        const double gnorm = g.norm();
        if (gnorm == 0.0) {
            reduce = true;
        } else {
            const Eigen::VectorXd d = -(rho / gnorm) * g;
            const double f_new = run.f.value(simplex.point(d));
            const double predicted = rho * gnorm;
            const double actual = simplex.f_pivot() - f_new;
            const double ratio = actual / predicted;

            // Drop the vertex whose replacement keeps the simplex best conditioned,
            // weighting far-away vertices up when the step made progress.
            const Eigen::VectorXd weights = simplex.simi() * d;
            Eigen::Index jdrop = -1;
            double best = actual > 0.0 ? 0.0 : 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                double temp = std::abs(weights(j));
                if (actual > 0.0) {
                    const double dist = (simplex.sim().col(j) - d).norm() / rho;
                    temp *= std::max(1.0, dist * dist);
                }
                if (temp > best) {
                    best = temp;
                    jdrop = j;
                }
            }
            if (jdrop >= 0) {
                simplex.replace(jdrop, d, f_new);
            }
            run.iterate(simplex.pivot(), std::min(simplex.f_pivot(), f_new));
            if (!(actual > 0.0 && ratio >= kGoodRatio)) {
                reduce = acceptable;
            }
        }

        if (reduce) {
            if (rho <= rho_end) {
                run.termination = Termination::trust_region_final;
                return;
            }
            rho *= 0.5;
            if (rho <= 1.5 * rho_end) {
                rho = rho_end;
            }
        }
    }
}

} // namespace qumode::detail
