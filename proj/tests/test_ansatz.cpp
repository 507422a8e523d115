#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qumode/ansatz.hpp"
#include "qumode/errors.hpp"

using namespace qumode;

namespace {

double max_abs(const ComplexMatrix& m)
{
    return m.cwiseAbs().maxCoeff();
}

Eigen::Matrix2cd pauli(char axis)
{
    Eigen::Matrix2cd s;
    const Complex i(0.0, 1.0);
    switch (axis) {
    case 'x':
        s << 0, 1, 1, 0;
        break;
    case 'y':
        s << 0, -i, i, 0;
        break;
    default:
        s << 1, 0, 0, -1;
    }
    return s;
}

Eigen::Matrix2cd rotation_oracle(char axis, double theta)
{
    return oracle::expm_taylor(Complex(0.0, -theta / 2.0) * ComplexMatrix(pauli(axis)));
}

} // namespace

TEST_CASE("vp gate at zero displacement is the identity")
{
    CHECK(max_abs(vp_gate(0.0, FockCutoff(10)) - ComplexMatrix::Identity(20, 20)) <= 1e-14);
}

TEST_CASE("vp gate on |0,0> prepares a coherent state")
{
    const FockCutoff cut(10);
    const ComplexMatrix vp = vp_gate(1.0, cut);
    const StateVector out = vp.col(0);
    const StateVector expected = oracle::coherent(1.0, 10);
    // Truncation at 10 levels bends the top amplitudes by about 1e-4.
    CHECK((out.head(10) - expected).cwiseAbs().maxCoeff() <= 2e-4);
    CHECK((out.head(6) - expected.head(6)).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(out.tail(10).norm() == doctest::Approx(0.0));
}

TEST_CASE("vp gate block structure")
{
    const FockCutoff cut(8);
    const Complex alpha(0.4, -0.7);
    const ComplexMatrix vp = vp_gate(alpha, cut);
    const ComplexMatrix d_plus = vp.topLeftCorner(8, 8);
    const ComplexMatrix d_minus = vp.bottomRightCorner(8, 8);
    CHECK(max_abs(vp.topRightCorner(8, 8)) == 0.0);
    CHECK(max_abs(vp.bottomLeftCorner(8, 8)) == 0.0);
    CHECK(max_abs(d_minus - d_plus.adjoint()) <= 1e-12);

    const ComplexMatrix a = annihilation(cut);
    const ComplexMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    CHECK(max_abs(d_plus - oracle::expm_taylor(gen)) <= 1e-12);
    CHECK(max_abs(vp * vp_gate(-alpha, cut) - ComplexMatrix::Identity(16, 16)) <= 1e-10);
}

TEST_CASE("gates are unitary for random parameters")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> disp(-2.0, 2.0);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    const FockCutoff cut(10);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        worst = std::max(worst, unitarity_error(vp_gate(Complex(disp(rng), disp(rng)), cut)));
        worst = std::max(worst, unitarity_error(rotation_gate(angle(rng), angle(rng), angle(rng), cut)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("vp gate leakage into the top level stays small for modest displacements")
{
    const FockCutoff cut(10);
    for (auto [r, bound] : {std::pair{0.5, 1e-8}, std::pair{1.0, 1e-5}, std::pair{1.5, 1e-3}}) {
        for (double phase : {0.0, 1.0, 2.5}) {
            const StateVector out = vp_gate(std::polar(r, phase), cut).col(0);
            CHECK(std::norm(out(9)) < bound);
        }
    }
}

TEST_CASE("vp gate enforces the displacement bound")
{
    CHECK_THROWS_AS(vp_gate(60.0, FockCutoff(4)), ConfigError);
    CHECK_THROWS_AS(vp_gate(Complex(3.0, 0.0), FockCutoff(4), 2.0), ConfigError);
}

TEST_CASE("rotation gate examples")
{
    const FockCutoff cut(3);
    CHECK(max_abs(rotation_gate(0, 0, 0, cut) - ComplexMatrix::Identity(6, 6)) <= 1e-15);

    StateVector q0m0 = StateVector::Zero(6);
    q0m0(0) = 1.0;
    const StateVector rx = rotation_gate(M_PI, 0, 0, cut) * q0m0;
    CHECK(std::abs(rx(3) - Complex(0.0, -1.0)) <= 1e-15); // -i |1>_q |0>_m
    CHECK(std::abs(rx(0)) <= 1e-15);

    const StateVector ry = rotation_gate(0, M_PI / 2, 0, cut) * q0m0;
    CHECK(std::abs(ry(0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(std::abs(ry(3) - 1.0 / std::sqrt(2.0)) <= 1e-15);
}

TEST_CASE("qubit rotation composes RZ RY RX with RX applied first")
{
    const double tx = 0.3;
    const double ty = -1.1;
    const double tz = 2.2;
    const Eigen::Matrix2cd zyx = rotation_oracle('z', tz) * rotation_oracle('y', ty) * rotation_oracle('x', tx);
    const Eigen::Matrix2cd xyz = rotation_oracle('x', tx) * rotation_oracle('y', ty) * rotation_oracle('z', tz);
    CHECK((qubit_rotation(tx, ty, tz) - zyx).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((qubit_rotation(tx, ty, tz, RotationOrder::xyz) - xyz).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(max_abs(rotation_gate(tx, ty, tz, FockCutoff(4)) -
                  kron(ComplexMatrix(zyx), ComplexMatrix::Identity(4, 4))) <= 1e-13);
}

TEST_CASE("apply_ansatz examples")
{
    AnsatzConfig cfg;
    const std::vector<double> zeros(5, 0.0);
    const StateVector idle = apply_ansatz(std::span<const double>(zeros), cfg);
    CHECK(std::abs(idle(0) - Complex(1.0)) <= 1e-15);
    CHECK(idle.norm() == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> shift = {1, 0, 0, 0, 0};
    const StateVector coh = apply_ansatz(std::span<const double>(shift), cfg);
    CHECK((coh.head(10) - oracle::coherent(1.0, 10)).cwiseAbs().maxCoeff() <= 2e-4);
}

TEST_CASE("apply_ansatz keeps the state normalized")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int layers = 1; layers <= 6; ++layers) {
        AnsatzConfig cfg;
        cfg.n_layers = layers;
        std::vector<double> p(cfg.param_count());
        for (double& v : p) {
            v = u(rng) / 2.0;
        }
        CHECK(std::abs(apply_ansatz(std::span<const double>(p), cfg).norm() - 1.0) <= 1e-10);
    }
}

TEST_CASE("apply_ansatz builds one rotation and one Vp per layer")
{
    AnsatzConfig cfg;
    cfg.n_layers = 4;
    const std::vector<double> p(cfg.param_count(), 0.1);
    GateCounter counter;
    apply_ansatz(std::span<const double>(p), cfg, &counter);
    CHECK(counter.rotations == 4);
    CHECK(counter.displacements == 4);
}

TEST_CASE("apply_ansatz rejects a parameter count mismatch")
{
    AnsatzConfig cfg;
    cfg.n_layers = 2;
    const std::vector<double> p(5, 0.0);
    CHECK_THROWS_AS(apply_ansatz(std::span<const double>(p), cfg), DimensionError);
    const std::vector<double> ragged(7, 0.0);
    CHECK_THROWS_AS(unpack_layers(ragged), DimensionError);
}

TEST_CASE("layers pack and unpack in v_r, v_i, theta_x, theta_y, theta_z order")
{
    const std::vector<double> flat = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto layers = unpack_layers(flat);
    REQUIRE(layers.size() == 2);
    CHECK(layers[1].v_r == 6);
    CHECK(layers[1].v_i == 7);
    CHECK(layers[1].theta_z == 10);
    CHECK(pack_layers(layers) == flat);
}

TEST_CASE("initial qubit and mode are configurable")
{
    AnsatzConfig cfg;
    cfg.cutoff = FockCutoff(4);
    cfg.initial_qubit = 1;
    cfg.initial_mode = 2;
    const std::vector<double> zeros(5, 0.0);
    const StateVector psi = apply_ansatz(std::span<const double>(zeros), cfg);
    CHECK(std::abs(psi(4 + 2) - Complex(1.0)) <= 1e-15);

    cfg.initial_mode = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
