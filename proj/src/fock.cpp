#include "qumode/fock.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qumode/errors.hpp"

namespace qumode {

FockCutoff::FockCutoff(int n_levels) : n_levels_(n_levels)
{
    if (n_levels < 2) {
        throw ConfigError("Fock cutoff must keep at least 2 levels, got " + std::to_string(n_levels));
    }
}

ComplexMatrix annihilation(FockCutoff cutoff)
{
    const int n = cutoff.levels();
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return a;
}

ComplexMatrix creation(FockCutoff cutoff)
{
    return annihilation(cutoff).adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (rows > kMaxDimension || cols > kMaxDimension) {
        throw DimensionError("kron result " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " exceeds the maximum dimension " + std::to_string(kMaxDimension));
    }
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix expm_anti_hermitian(const ComplexMatrix& g)
{
    if (g.rows() != g.cols()) {
        throw DimensionError("generator must be square");
    }
    const double skew = (g + g.adjoint()).cwiseAbs().maxCoeff();
    if (skew > 1e-8) {
        throw GeneratorError("generator is not anti-Hermitian (max |G + G^dagger| = " +
                             std::to_string(skew) + ")");
    }
    // H = -iG, symmetrized so the solver sees an exactly Hermitian input.
    ComplexMatrix h = Complex(0.0, -1.0) * g;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const ComplexMatrix& v = eig.eigenvectors();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::polar(1.0, lambda(k));
    }
    return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix partial_trace_qubit(const StateVector& psi, FockCutoff cutoff)
{
    const int n = cutoff.levels();
    if (psi.size() != 2 * n) {
        throw DimensionError("state of dimension " + std::to_string(psi.size()) +
                             " does not match qubit x " + std::to_string(n) + "-level mode");
    }
    // rho_mn = sum_q psi(q, m) psi(q, n)^*
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (int q = 0; q < 2; ++q) {
        const auto block = psi.segment(q * n, n);
        rho.noalias() += block * block.adjoint();
    }
    return rho;
}

double unitarity_error(const ComplexMatrix& u)
{
    const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

double hermiticity_error(const ComplexMatrix& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace qumode
