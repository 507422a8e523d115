#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qumode/fock.hpp"

namespace qumode {

/// W(x, p) sampled on a rectangular grid, values(ix, ip).
/// Convention: hbar = 1, x = sqrt(2) Re(alpha), p = sqrt(2) Im(alpha).
struct WignerGrid {
    std::vector<double> x_axis;
    std::vector<double> p_axis;
    Eigen::MatrixXd values;
    std::string source;
    std::vector<std::string> warnings;

    /// Riemann sum of W dx dp (uniform spacing assumed).
    double integral() const;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Wigner function of a Fock-basis density matrix (N <= 64). A rho that is
/// Hermitian only up to 1e-8 is symmetrized and a warning recorded; larger
/// asymmetry throws GeneratorError.
WignerGrid wigner(const ComplexMatrix& rho, std::span<const double> x_axis, std::span<const double> p_axis);

/// Single-point evaluation with the same recurrence.
double wigner_at(const ComplexMatrix& rho, double x, double p);

/// '#' convention comment, header "x,p,w", then one row per grid point with
/// p varying fastest; values printed with 17 significant digits.
void write_grid(const WignerGrid& grid, std::ostream& out);
void export_grid(const WignerGrid& grid, const std::filesystem::path& path);
WignerGrid import_grid(const std::filesystem::path& path);

} // namespace qumode
