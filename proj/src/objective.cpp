#include "qumode/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "qumode/errors.hpp"

namespace qumode {

std::string_view mode_name(EvalMode mode)
{
    return mode == EvalMode::ideal ? "ideal" : "sampled";
}

EvalMode parse_mode(std::string_view text)
{
    if (text == "ideal") {
        return EvalMode::ideal;
    }
    if (text == "sampled" || text == "sampling") {
        return EvalMode::sampled;
    }
    throw ConfigError("unknown evaluation mode '" + std::string(text) + "'");
}

std::string_view purpose_name(EvalPurpose purpose)
{
    return purpose == EvalPurpose::objective ? "objective" : "gradient_probe";
}

void ObjectiveConfig::validate() const
{
    ansatz.validate();
    if (mode == EvalMode::sampled && shots < 1) {
        throw ConfigError("sampled evaluation needs shots >= 1");
    }
    if (!(clamp_floor >= 0.0 && clamp_floor <= 1.0)) {
        throw ConfigError("clamp_floor must lie in [0, 1]");
    }
    if (target.amplitudes.size() != ansatz.cutoff.levels()) {
        throw DimensionError("target dimension " + std::to_string(target.amplitudes.size()) +
                             " does not match cutoff " + std::to_string(ansatz.cutoff.levels()));
    }
}

double fidelity(std::span<const double> params, const ObjectiveConfig& cfg)
{
    if (cfg.target.amplitudes.size() != cfg.ansatz.cutoff.levels()) {
        throw DimensionError("target dimension " + std::to_string(cfg.target.amplitudes.size()) +
                             " does not match cutoff " + std::to_string(cfg.ansatz.cutoff.levels()));
    }
    // Displacements past the bound leave the truncated space; their physical
    // overlap with a cutoff-sized target is negligible, so report F = 0.
    if (params.size() == cfg.ansatz.param_count()) {
        for (const LayerParams& layer : unpack_layers(params)) {
            const double r = std::abs(layer.alpha());
            if (std::isfinite(r) && r >= cfg.ansatz.alpha_bound) {
                return 0.0;
            }
        }
    }
    const StateVector psi = apply_ansatz(params, cfg.ansatz);
    const ComplexMatrix rho = partial_trace_qubit(psi, cfg.ansatz.cutoff);
    const StateVector& phi = cfg.target.amplitudes;
    const double f = std::real(phi.dot(rho * phi));
    return std::clamp(f, 0.0, 1.0);
}

double swap_test_p0(double fid)
{
    if (!(fid >= 0.0 && fid <= 1.0)) {
        throw ConfigError("fidelity " + std::to_string(fid) + " outside [0, 1]");
    }
    return 0.5 + 0.5 * fid;
}

double objective_from_p0(double p0, double clamp_floor)
{
    const double p = std::clamp(std::max(p0, clamp_floor), 0.5, 1.0);
    return std::clamp(1.0 - std::sqrt(2.0 * (p - 0.5)), 0.0, 1.0);
}

EvalRecord evaluate(std::span<const double> params, const ObjectiveConfig& cfg, Rng* rng, EvalPurpose purpose)
{
    if (cfg.mode == EvalMode::sampled && rng == nullptr) {
        throw ConfigError("sampled evaluation requires a random stream");
    }
    EvalRecord rec;
    rec.params.assign(params.begin(), params.end());
    rec.purpose = purpose;
    const double fid = fidelity(params, cfg);
    const double exact_p0 = swap_test_p0(fid);
    rec.true_infidelity = 1.0 - std::sqrt(fid);
    if (cfg.mode == EvalMode::ideal) {
        rec.p0 = exact_p0;
    } else {
        std::binomial_distribution<long> draw(cfg.shots, exact_p0);
        rec.p0 = static_cast<double>(draw(*rng)) / static_cast<double>(cfg.shots);
    }
    rec.objective = objective_from_p0(rec.p0, cfg.clamp_floor);
    return rec;
}

double swap_circuit_oracle(const TargetState& a, const TargetState& b)
{
    const Eigen::Index n = a.amplitudes.size();
    if (b.amplitudes.size() != n) {
        throw DimensionError("swap test states have different cutoffs");
    }
    if (n > 8) {
        throw DimensionError("swap_circuit_oracle is limited to cutoff <= 8");
    }
    const Eigen::Index nn = n * n;
    ComplexMatrix swap = ComplexMatrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            swap(j * n + i, i * n + j) = 1.0;
        }
    }
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix h(2, 2);
    h << r, r, r, -r;
    const ComplexMatrix id = ComplexMatrix::Identity(nn, nn);
    ComplexMatrix cswap = ComplexMatrix::Zero(2 * nn, 2 * nn);
    cswap.topLeftCorner(nn, nn) = id;
    cswap.bottomRightCorner(nn, nn) = swap;
    const ComplexMatrix h_full = kron(h, id);

    StateVector ancilla = StateVector::Zero(2);
    ancilla(0) = 1.0;
    const StateVector ab = kron(a.amplitudes, b.amplitudes);
    const StateVector in = kron(ancilla, ab);
    const StateVector out = h_full * (cswap * (h_full * in));
    return out.head(nn).squaredNorm();
}

Evaluator::Evaluator(ObjectiveConfig cfg, Rng* rng) : cfg_(std::move(cfg)), rng_(rng)
{
    cfg_.validate();
    if (cfg_.mode == EvalMode::sampled && rng_ == nullptr) {
        throw ConfigError("sampled evaluation requires a random stream");
    }
}

const EvalRecord& Evaluator::evaluate(std::span<const double> params, EvalPurpose purpose)
{
    EvalRecord rec = qumode::evaluate(params, cfg_, rng_, purpose);
    rec.call_index = log_.size();
    log_.push_back(std::move(rec));
    return log_.back();
}

double Evaluator::operator()(std::span<const double> params, EvalPurpose purpose)
{
    return evaluate(params, purpose).objective;
}

std::size_t Evaluator::calls(EvalPurpose purpose) const
{
    return static_cast<std::size_t>(
        std::count_if(log_.begin(), log_.end(), [&](const EvalRecord& r) { return r.purpose == purpose; }));
}

void Evaluator::write_csv(std::ostream& out) const
{
    out << "call_index,purpose,p0,objective,true_infidelity\n";
    char buf[128];
    for (const auto& r : log_) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.p0, r.objective, r.true_infidelity);
        out << r.call_index << ',' << purpose_name(r.purpose) << ',' << buf << '\n';
    }
}

} // namespace qumode
