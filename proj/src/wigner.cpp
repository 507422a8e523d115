#include "qumode/wigner.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "qumode/errors.hpp"

namespace qumode {

namespace {

constexpr Eigen::Index kMaxWignerDim = 64;

/// Iterative evaluation over Fock indices: `terms[n]` holds the Wigner
/// function of |m><n| for the current row m, built from row m-1, which avoids
/// factorials and explicit Laguerre polynomials.
double wigner_recurrence(const ComplexMatrix& rho, Complex alpha, std::vector<Complex>& terms)
{
    const Eigen::Index dim = rho.rows();
    terms.assign(static_cast<std::size_t>(dim), Complex(0.0));
    const Complex two_alpha = 2.0 * alpha;
    const Complex two_alpha_conj = std::conj(two_alpha);

    terms[0] = std::exp(-2.0 * std::norm(alpha)) / std::numbers::pi;
    double w = std::real(rho(0, 0)) * std::real(terms[0]);
    for (Eigen::Index n = 1; n < dim; ++n) {
        terms[n] = two_alpha * terms[n - 1] / std::sqrt(static_cast<double>(n));
        w += 2.0 * std::real(rho(0, n) * terms[n]);
    }
    for (Eigen::Index m = 1; m < dim; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        Complex carry = terms[m];
        terms[m] = (two_alpha_conj * carry - sm * terms[m - 1]) / sm;
        w += std::real(rho(m, m) * terms[m]);
        for (Eigen::Index n = m + 1; n < dim; ++n) {
            const Complex next = (two_alpha * terms[n - 1] - sm * carry) / std::sqrt(static_cast<double>(n));
            carry = terms[n];
            terms[n] = next;
            w += 2.0 * std::real(rho(m, n) * terms[n]);
        }
    }
    return w;
}

ComplexMatrix checked_density(const ComplexMatrix& rho, std::vector<std::string>* warnings)
{
    if (rho.rows() != rho.cols() || rho.rows() < 1) {
        throw DimensionError("density matrix must be square and non-empty");
    }
    if (rho.rows() > kMaxWignerDim) {
        throw DimensionError("Wigner evaluation supports at most 64 Fock levels");
    }
    const double asym = hermiticity_error(rho);
    if (asym > 1e-8) {
        throw GeneratorError("density matrix is not Hermitian (max |rho - rho^dagger| = " +
                             std::to_string(asym) + ")");
    }
    if (asym > 0.0) {
        if (warnings != nullptr) {
            warnings->push_back("density matrix symmetrized (asymmetry " + std::to_string(asym) + ")");
        }
        return 0.5 * (rho + rho.adjoint());
    }
    return rho;
}

std::string format17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

double WignerGrid::integral() const
{
    if (x_axis.size() < 2 || p_axis.size() < 2) {
        return 0.0;
    }
    const double dx = (x_axis.back() - x_axis.front()) / static_cast<double>(x_axis.size() - 1);
    const double dp = (p_axis.back() - p_axis.front()) / static_cast<double>(p_axis.size() - 1);
    return values.sum() * dx * dp;
}

std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    return out;
}

WignerGrid wigner(const ComplexMatrix& rho_in, std::span<const double> x_axis, std::span<const double> p_axis)
{
    WignerGrid grid;
    const ComplexMatrix rho = checked_density(rho_in, &grid.warnings);
    grid.x_axis.assign(x_axis.begin(), x_axis.end());
    grid.p_axis.assign(p_axis.begin(), p_axis.end());
    grid.values.resize(static_cast<Eigen::Index>(x_axis.size()), static_cast<Eigen::Index>(p_axis.size()));
    std::vector<Complex> terms;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < x_axis.size(); ++i) {
        for (std::size_t j = 0; j < p_axis.size(); ++j) {
            const Complex alpha(x_axis[i] * inv_sqrt2, p_axis[j] * inv_sqrt2);
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                wigner_recurrence(rho, alpha, terms);
        }
    }
    return grid;
}

double wigner_at(const ComplexMatrix& rho_in, double x, double p)
{
    const ComplexMatrix rho = checked_density(rho_in, nullptr);
    std::vector<Complex> terms;
    return wigner_recurrence(rho, Complex(x, p) / std::numbers::sqrt2, terms);
}

void write_grid(const WignerGrid& grid, std::ostream& out)
{
    out << "# hbar=1, x=sqrt(2)*Re(alpha), p=sqrt(2)*Im(alpha)";
    if (!grid.source.empty()) {
        out << "; source=" << grid.source;
    }
    out << "\nx,p,w\n";
    for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
        const std::string xs = format17(grid.x_axis[i]);
        for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
            out << xs << ',' << format17(grid.p_axis[j]) << ','
                << format17(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
        }
    }
}

void export_grid(const WignerGrid& grid, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    }
    write_grid(grid, out);
    out.flush();
    if (!out) {
        throw Error("write to " + path.string() + " failed: " + std::strerror(errno));
    }
}

WignerGrid import_grid(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
    }
    std::vector<double> xs;
    std::vector<double> ps;
    std::vector<double> ws;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != "x,p,w") {
                throw ConfigError(path.string() + ": expected header x,p,w");
            }
            header_seen = true;
            continue;
        }
        double v[3];
        const char* cursor = line.c_str();
        for (int k = 0; k < 3; ++k) {
            char* end = nullptr;
            v[k] = std::strtod(cursor, &end);
            if (end == cursor) {
                throw ConfigError(path.string() + ": malformed row '" + line + "'");
            }
            cursor = (*end == ',') ? end + 1 : end;
        }
        xs.push_back(v[0]);
        ps.push_back(v[1]);
        ws.push_back(v[2]);
    }
    WignerGrid grid;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (grid.x_axis.empty() || grid.x_axis.back() != xs[k]) {
            grid.x_axis.push_back(xs[k]);
        }
        if (grid.x_axis.size() == 1) {
            grid.p_axis.push_back(ps[k]);
        }
    }
    const auto nx = static_cast<Eigen::Index>(grid.x_axis.size());
    const auto np = static_cast<Eigen::Index>(grid.p_axis.size());
    if (nx * np != static_cast<Eigen::Index>(ws.size())) {
        throw ConfigError(path.string() + ": rows do not form a rectangular grid");
    }
    grid.values.resize(nx, np);
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index j = 0; j < np; ++j) {
            grid.values(i, j) = ws[static_cast<std::size_t>(i * np + j)];
        }
    }
    return grid;
}

} // namespace qumode
