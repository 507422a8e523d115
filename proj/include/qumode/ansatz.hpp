#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qumode/fock.hpp"

namespace qumode {

/// One circuit layer: a transmon rotation followed by a qubit-conditioned
/// displacement with alpha = v_r + i v_i.
struct LayerParams {
    double v_r = 0.0;
    double v_i = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double theta_z = 0.0;

    static constexpr std::size_t kCount = 5;

    Complex alpha() const noexcept { return {v_r, v_i}; }
};

/// Matrix-product order of the single-qubit rotations inside one layer.
enum class RotationOrder {
    zyx, ///< RZ * RY * RX (RX acts first)
    xyz, ///< RX * RY * RZ (RZ acts first)
};

struct AnsatzConfig {
    int n_layers = 1;
    FockCutoff cutoff{10};
    int initial_qubit = 0;
    int initial_mode = 0;
    RotationOrder rotation_order = RotationOrder::zyx;
    /// Displacements with |alpha| above this are rejected as truncation misuse.
    double alpha_bound = 50.0;

    std::size_t param_count() const noexcept
    {
        return LayerParams::kCount * static_cast<std::size_t>(n_layers);
    }
    void validate() const;
};

/// Number of gate matrices built; lets tests observe apply_ansatz's work.
struct GateCounter {
    std::size_t rotations = 0;
    std::size_t displacements = 0;
};

/// exp(sigma_z (x) (alpha a^dagger - alpha^* a)): D(alpha) on qubit |0>,
/// D(-alpha) on qubit |1>. Returned as the full (2N)x(2N) matrix.
ComplexMatrix vp_gate(Complex alpha, FockCutoff cutoff, double alpha_bound = 50.0);

/// Single-qubit rotation RA(theta) = exp(-i theta/2 sigma_A), composed per
/// `order` and lifted to (2N)x(2N) by (x) I_N.
ComplexMatrix rotation_gate(double theta_x, double theta_y, double theta_z, FockCutoff cutoff,
                            RotationOrder order = RotationOrder::zyx);

/// 2x2 qubit factor of rotation_gate.
Eigen::Matrix2cd qubit_rotation(double theta_x, double theta_y, double theta_z,
                                RotationOrder order = RotationOrder::zyx);

std::vector<LayerParams> unpack_layers(std::span<const double> flat);
std::vector<double> pack_layers(std::span<const LayerParams> layers);

/// |initial_qubit> (x) |initial_mode>, then per layer: rotation, then Vp.
StateVector apply_ansatz(std::span<const LayerParams> layers, const AnsatzConfig& cfg,
                         GateCounter* counter = nullptr);
StateVector apply_ansatz(std::span<const double> flat_params, const AnsatzConfig& cfg,
                         GateCounter* counter = nullptr);

} // namespace qumode
