#include <doctest.h>

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "qumode/errors.hpp"
#include "qumode/targets.hpp"

using namespace qumode;

namespace {

// Amplitude envelope exp(-n^2 / (2 * 0.75^2)), normalized, evaluated with numpy.
constexpr double kLocalGaussianGolden[10] = {
    0.9245677297844217,     0.38010115712070397,    0.026410740210526858,   0.0003101579203073416,
    6.1561061482700427e-07, 2.0651435461454785e-10, 1.1708878791340085e-14, 1.1220218055879225e-19,
    1.8172229172350119e-25, 4.9743465037883087e-32};

} // namespace

TEST_CASE("wide Gaussian envelope is flat")
{
    const TargetState t = make_gaussian_target(0.0, 1e6, FockCutoff(10));
    for (int n = 0; n < 10; ++n) {
        CHECK(t.amplitudes(n).real() == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-10));
    }
}

TEST_CASE("Gaussian target peaks at its mean and is symmetric")
{
    const TargetState t = make_gaussian_target(5.0, 1.0, FockCutoff(10));
    Eigen::Index peak = 0;
    t.amplitudes.cwiseAbs().maxCoeff(&peak);
    CHECK(peak == 5);
    CHECK(std::abs(t.amplitudes(4) - t.amplitudes(6)) <= 1e-12);
    for (int d = 1; d <= 4; ++d) {
        CHECK(std::abs(t.amplitudes(5 - d) - t.amplitudes(5 + d)) <= 1e-12);
    }
}

TEST_CASE("local Gaussian target matches the golden vector")
{
    const TargetState t = TargetSpec::local_gaussian().resolve();
    for (int n = 0; n < 10; ++n) {
        CHECK(t.amplitudes(n).real() == doctest::Approx(kLocalGaussianGolden[n]).epsilon(1e-12));
        CHECK(t.amplitudes(n).imag() == 0.0);
    }
}

TEST_CASE("Gaussian target rejects non-positive std")
{
    CHECK_THROWS_AS(make_gaussian_target(0.0, 0.0, FockCutoff(10)), ConfigError);
    CHECK_THROWS_AS(make_gaussian_target(0.0, -1.0, FockCutoff(10)), ConfigError);
}

TEST_CASE("non-Gaussian preset")
{
    const double raw[10] = {0, 0.209, 0.417, 0.209, 0, 0.417, 0.626, 0.417, 0, 0};
    double norm = 0.0;
    for (double v : raw) {
        norm += v * v;
    }
    norm = std::sqrt(norm);
    const TargetState t = make_non_gaussian_preset(FockCutoff(10));
    for (int n = 0; n < 10; ++n) {
        CHECK(t.amplitudes(n).real() == doctest::Approx(raw[n] / norm).epsilon(1e-14));
    }
    CHECK(t.amplitudes.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.amplitudes(0) == Complex(0.0));
    CHECK(t.amplitudes(8) == Complex(0.0));
    CHECK(t.amplitudes(9) == Complex(0.0));
    CHECK_THROWS_AS(make_non_gaussian_preset(FockCutoff(8)), ConfigError);
}

TEST_CASE("explicit targets are normalized copies")
{
    const FockCutoff cut(4);
    const std::vector<Complex> one = {1, 0, 0, 0};
    const std::vector<Complex> two = {2, 0, 0, 0};
    const std::vector<Complex> pair = {1, 1, 0, 0};
    CHECK(load_explicit_target(one, cut).amplitudes == load_explicit_target(two, cut).amplitudes);
    const StateVector p = load_explicit_target(pair, cut).amplitudes;
    CHECK(p(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    const std::vector<Complex> zero(4, 0.0);
    CHECK_THROWS_AS(load_explicit_target(zero, cut), ConfigError);
    CHECK_THROWS_AS(load_explicit_target(one, FockCutoff(5)), DimensionError);
}

TEST_CASE("every family resolves to a unit vector, deterministically")
{
    const FockCutoff cut(10);
    for (const auto& spec : {TargetSpec::local_gaussian(cut), TargetSpec::gaussian(cut),
                             TargetSpec::non_gaussian(cut), TargetSpec::fock(3, cut)}) {
        const StateVector a = spec.resolve().amplitudes;
        CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
        CHECK(a == spec.resolve().amplitudes);
        CHECK(a.size() == 10);
    }
}

TEST_CASE("target names parse")
{
    CHECK(TargetSpec::parse("local-gaussian").family == TargetFamily::local_gaussian);
    CHECK(TargetSpec::parse("gaussian").mean == 5.0);
    CHECK(TargetSpec::parse("non-gaussian").family == TargetFamily::non_gaussian_preset);
    const StateVector vac = TargetSpec::parse("vacuum", FockCutoff(4)).resolve().amplitudes;
    CHECK(vac(0) == Complex(1.0));
    const StateVector f2 = TargetSpec::parse("fock:2", FockCutoff(4)).resolve().amplitudes;
    CHECK(f2(2) == Complex(1.0));
    CHECK_THROWS_AS(TargetSpec::parse("fock:9", FockCutoff(4)), ConfigError);
    CHECK_THROWS_AS(TargetSpec::parse("squeezed"), ConfigError);
}

TEST_CASE("amplitude files accept re/im pairs and comments")
{
    const auto dir = oracle::scratch_dir("targets");
    const auto path = dir / "amps.txt";
    {
        std::ofstream out(path);
        out << "# two-level superposition\n1 0\n0 1  # imaginary\n0\n\n0\n";
    }
    const auto values = read_amplitude_file(path);
    REQUIRE(values.size() == 4);
    CHECK(values[1] == Complex(0.0, 1.0));
    const StateVector t = TargetSpec::parse("file:" + path.string(), FockCutoff(4)).resolve().amplitudes;
    CHECK(std::abs(t(1) - Complex(0.0, 1.0 / std::sqrt(2.0))) <= 1e-15);

    {
        std::ofstream out(dir / "bad.txt");
        out << "1 x\n";
    }
    CHECK_THROWS_AS(read_amplitude_file(dir / "bad.txt"), ConfigError);
    CHECK_THROWS_AS(read_amplitude_file(dir / "missing.txt"), ConfigError);
}
