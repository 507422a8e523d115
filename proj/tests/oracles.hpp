#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks.

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// exp(G) by Taylor series with scaling and squaring.
inline Matrix expm_taylor(const Matrix& g)
{
    const double norm = g.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.25) {
        ++squarings;
    }
    const Matrix scaled = g / std::ldexp(1.0, squarings);
    Matrix term = Matrix::Identity(g.rows(), g.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) {
        sum = sum * sum;
    }
    return sum;
}

/// Coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!), n < levels.
inline Vector coherent(Complex alpha, int levels)
{
    Vector c(levels);
    for (int n = 0; n < levels; ++n) {
        c(n) = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
    }
    return c;
}

/// Wigner function of |m><n| at phase-space point alpha (hbar = 1 scaling,
/// W_vacuum(0) = 1/pi), from the associated Laguerre closed form.
inline Complex wigner_element(int m, int n, Complex alpha)
{
    if (m < n) {
        return std::conj(wigner_element(n, m, alpha));
    }
    const double r2 = std::norm(alpha);
    const int k = m - n;
    const double pref = std::pow(-1.0, n) / M_PI *
                        std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0))) * std::exp(-2.0 * r2);
    return pref * std::pow(2.0 * std::conj(alpha), k) *
           std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(k), 4.0 * r2);
}

/// W(x, p) = sum_mn rho_mn W_{|m><n|}, alpha = (x + i p) / sqrt(2).
inline double wigner(const Matrix& rho, double x, double p)
{
    const Complex alpha(x / std::sqrt(2.0), p / std::sqrt(2.0));
    Complex w = 0.0;
    for (Eigen::Index m = 0; m < rho.rows(); ++m) {
        for (Eigen::Index n = 0; n < rho.cols(); ++n) {
            w += rho(m, n) * wigner_element(static_cast<int>(m), static_cast<int>(n), alpha);
        }
    }
    return w.real();
}

inline Vector random_state(int dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
        v(i) = Complex(normal(rng), normal(rng));
    }
    return v.normalized();
}

inline Matrix random_anti_hermitian(int dim, double scale, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            a(i, j) = Complex(normal(rng), normal(rng)) * scale;
        }
    }
    return 0.5 * (a - a.adjoint());
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("qumode_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace oracle
