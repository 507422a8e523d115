#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qumode {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Largest row or column count kron() will produce.
inline constexpr Eigen::Index kMaxDimension = 4096;

/// Number of retained Fock levels |0>..|N-1> of a truncated qumode.
class FockCutoff {
public:
    explicit FockCutoff(int n_levels);

    int levels() const noexcept { return n_levels_; }
    friend bool operator==(FockCutoff, FockCutoff) = default;

private:
    int n_levels_;
};

/// Truncated ladder operator a, with a(n-1, n) = sqrt(n).
ComplexMatrix annihilation(FockCutoff cutoff);
/// a^dagger.
ComplexMatrix creation(FockCutoff cutoff);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// exp(G) for anti-Hermitian G, through the eigendecomposition of the
/// Hermitian matrix H = -iG: exp(G) = V exp(i diag(lambda)) V^dagger.
/// Throws GeneratorError when max|G + G^dagger| exceeds 1e-8.
ComplexMatrix expm_anti_hermitian(const ComplexMatrix& g);

/// Reduced qumode density matrix of a joint qubit (x) mode state whose
/// amplitudes are indexed q * N + n.
ComplexMatrix partial_trace_qubit(const StateVector& psi, FockCutoff cutoff);

/// max |U^dagger U - I|.
double unitarity_error(const ComplexMatrix& u);

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-10)
{
    return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

/// max |A - A^dagger|.
double hermiticity_error(const ComplexMatrix& a);

} // namespace qumode
