#include "qumode/ansatz.hpp"

#include <cmath>
#include <string>

#include "qumode/errors.hpp"

namespace qumode {

namespace {

Eigen::Matrix2cd axis_rotation(double theta, int axis)
{
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd r;
    switch (axis) {
    case 0:
        r << c, -i * s, -i * s, c;
        break;
    case 1:
        r << c, -s, s, c;
        break;
    default:
        r << std::polar(1.0, -0.5 * theta), 0.0, 0.0, std::polar(1.0, 0.5 * theta);
        break;
    }
    return r;
}

} // namespace

void AnsatzConfig::validate() const
{
    if (n_layers < 1) {
        throw ConfigError("ansatz needs at least one layer");
    }
    if (initial_qubit < 0 || initial_qubit > 1) {
        throw ConfigError("initial_qubit must be 0 or 1");
    }
    if (initial_mode < 0 || initial_mode >= cutoff.levels()) {
        throw ConfigError("initial_mode outside the truncated Fock space");
    }
}

ComplexMatrix vp_gate(Complex alpha, FockCutoff cutoff, double alpha_bound)
{
    if (!(std::abs(alpha) < alpha_bound)) {
        throw ConfigError("displacement |alpha| = " + std::to_string(std::abs(alpha)) +
                          " exceeds the bound " + std::to_string(alpha_bound));
    }
    const int n = cutoff.levels();
    const ComplexMatrix a = annihilation(cutoff);
    const ComplexMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    // sigma_z (x) G is block-diagonal: exp(G) on |0>, exp(-G) = exp(G)^dagger on |1>.
    const ComplexMatrix d = expm_anti_hermitian(generator);
    ComplexMatrix u = ComplexMatrix::Zero(2 * n, 2 * n);
    u.topLeftCorner(n, n) = d;
    u.bottomRightCorner(n, n) = d.adjoint();
    return u;
}

Eigen::Matrix2cd qubit_rotation(double theta_x, double theta_y, double theta_z, RotationOrder order)
{
    const Eigen::Matrix2cd rx = axis_rotation(theta_x, 0);
    const Eigen::Matrix2cd ry = axis_rotation(theta_y, 1);
    const Eigen::Matrix2cd rz = axis_rotation(theta_z, 2);
    return order == RotationOrder::zyx ? Eigen::Matrix2cd(rz * ry * rx) : Eigen::Matrix2cd(rx * ry * rz);
}

ComplexMatrix rotation_gate(double theta_x, double theta_y, double theta_z, FockCutoff cutoff,
                            RotationOrder order)
{
    const ComplexMatrix r = qubit_rotation(theta_x, theta_y, theta_z, order);
    return kron(r, ComplexMatrix::Identity(cutoff.levels(), cutoff.levels()));
}

std::vector<LayerParams> unpack_layers(std::span<const double> flat)
{
    if (flat.size() % LayerParams::kCount != 0) {
        throw DimensionError("parameter vector length " + std::to_string(flat.size()) +
                             " is not a multiple of 5");
    }
    std::vector<LayerParams> layers(flat.size() / LayerParams::kCount);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const double* p = flat.data() + LayerParams::kCount * l;
        layers[l] = LayerParams{p[0], p[1], p[2], p[3], p[4]};
    }
    return layers;
}

std::vector<double> pack_layers(std::span<const LayerParams> layers)
{
    std::vector<double> flat;
    flat.reserve(layers.size() * LayerParams::kCount);
    for (const auto& l : layers) {
        flat.insert(flat.end(), {l.v_r, l.v_i, l.theta_x, l.theta_y, l.theta_z});
    }
    return flat;
}

StateVector apply_ansatz(std::span<const LayerParams> layers, const AnsatzConfig& cfg, GateCounter* counter)
{
    cfg.validate();
    if (layers.size() != static_cast<std::size_t>(cfg.n_layers)) {
        throw DimensionError("expected " + std::to_string(cfg.n_layers) + " layers, got " +
                             std::to_string(layers.size()));
    }
    const int n = cfg.cutoff.levels();
    StateVector psi = StateVector::Zero(2 * n);
    psi(cfg.initial_qubit * n + cfg.initial_mode) = 1.0;
    for (const auto& layer : layers) {
        const ComplexMatrix rot =
            rotation_gate(layer.theta_x, layer.theta_y, layer.theta_z, cfg.cutoff, cfg.rotation_order);
        const ComplexMatrix vp = vp_gate(layer.alpha(), cfg.cutoff, cfg.alpha_bound);
        if (counter != nullptr) {
            ++counter->rotations;
            ++counter->displacements;
        }
        psi = vp * (rot * psi);
    }
    return psi;
}

StateVector apply_ansatz(std::span<const double> flat_params, const AnsatzConfig& cfg, GateCounter* counter)
{
    if (flat_params.size() != cfg.param_count()) {
        throw DimensionError("expected " + std::to_string(cfg.param_count()) + " parameters, got " +
                             std::to_string(flat_params.size()));
    }
    const auto layers = unpack_layers(flat_params);
    return apply_ansatz(std::span<const LayerParams>(layers), cfg, counter);
}

} // namespace qumode
