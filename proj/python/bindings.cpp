#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "qumode/ansatz.hpp"
#include "qumode/archive.hpp"
#include "qumode/bench.hpp"
#include "qumode/fock.hpp"
#include "qumode/objective.hpp"
#include "qumode/optimize.hpp"
#include "qumode/targets.hpp"
#include "qumode/wigner.hpp"

namespace py = pybind11;
using namespace qumode;

namespace {

AnsatzConfig ansatz_for(std::size_t n_params, int cutoff, int initial_qubit, int initial_mode)
{
    if (n_params % LayerParams::kCount != 0 || n_params == 0) {
        throw ConfigError("parameter count must be a positive multiple of 5");
    }
    AnsatzConfig cfg;
    cfg.n_layers = static_cast<int>(n_params / LayerParams::kCount);
    cfg.cutoff = FockCutoff(cutoff);
    cfg.initial_qubit = initial_qubit;
    cfg.initial_mode = initial_mode;
    return cfg;
}

TargetSpec target_spec(const std::string& text, int cutoff, std::optional<double> mean, std::optional<double> std)
{
    TargetSpec spec = TargetSpec::parse(text, FockCutoff(cutoff));
    if (mean) {
        spec.mean = *mean;
    }
    if (std) {
        spec.std = *std;
    }
    return spec;
}

ObjectiveConfig objective_for(const std::vector<double>& params, const StateVector& target, const std::string& mode,
                              int shots)
{
    ObjectiveConfig cfg;
    cfg.ansatz = ansatz_for(params.size(), static_cast<int>(target.size()), 0, 0);
    cfg.target = TargetState{target};
    cfg.mode = parse_mode(mode);
    cfg.shots = shots;
    return cfg;
}

py::dict row_dict(const BenchRow& r)
{
    py::dict d;
    d["cell_key"] = r.cell_key;
    d["target"] = r.target;
    d["optimizer"] = r.optimizer;
    d["layers"] = r.layers;
    d["mode"] = r.mode;
    d["shots"] = r.shots;
    d["fd_step"] = r.fd_step;
    d["trials"] = r.trials;
    d["infidelity_mean"] = r.infidelity_mean;
    d["infidelity_std"] = r.infidelity_std;
    d["nfev_mean"] = r.nfev_mean;
    d["nfev_std"] = r.nfev_std;
    d["nonconverged_pct"] = r.nonconverged_pct;
    d["total_evals_mean"] = r.total_evals_mean;
    d["objective_mean"] = r.objective_mean;
    d["objective_std"] = r.objective_std;
    return d;
}

py::dict trial_dict(const TrialResult& t)
{
    py::dict d;
    d["trial_index"] = t.trial_index;
    d["seed"] = t.seed;
    d["initial_params"] = t.initial_params;
    d["final_params"] = t.final_params;
    d["final_objective"] = t.final_objective;
    d["final_true_infidelity"] = t.final_true_infidelity;
    d["nfev"] = t.nfev;
    d["grad_probe_evals"] = t.grad_probe_evals;
    d["total_evals"] = t.total_evals;
    d["iterations"] = t.iterations;
    d["termination"] = std::string(termination_name(t.termination));
    d["converged"] = t.converged;
    d["wall_time"] = t.wall_time;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Qubit-qumode variational state preparation: gates, objective, optimizers, Wigner functions.";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "QumodeError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    m.def("annihilation", [](int cutoff) { return annihilation(FockCutoff(cutoff)); }, py::arg("cutoff"));
    m.def("expm_anti_hermitian", &expm_anti_hermitian, py::arg("generator"));
    m.def(
        "vp_gate", [](Complex alpha, int cutoff) { return vp_gate(alpha, FockCutoff(cutoff)); }, py::arg("alpha"),
        py::arg("cutoff"), "Conditional displacement blockdiag(D(alpha), D(-alpha)), index q*N + n.");
    m.def(
        "rotation_gate",
        [](double tx, double ty, double tz, int cutoff) { return rotation_gate(tx, ty, tz, FockCutoff(cutoff)); },
        py::arg("theta_x"), py::arg("theta_y"), py::arg("theta_z"), py::arg("cutoff"));
    m.def(
        "partial_trace_qubit", [](const StateVector& psi, int cutoff) { return partial_trace_qubit(psi, FockCutoff(cutoff)); },
        py::arg("psi"), py::arg("cutoff"));
    m.def(
        "apply_ansatz",
        [](const std::vector<double>& params, int cutoff, int initial_qubit, int initial_mode) {
            return apply_ansatz(std::span<const double>(params), ansatz_for(params.size(), cutoff, initial_qubit, initial_mode));
        },
        py::arg("params"), py::arg("cutoff") = 10, py::arg("initial_qubit") = 0, py::arg("initial_mode") = 0,
        "Joint qubit-qumode state after the layered ansatz, flattened as q*N + n.");

    m.def(
        "target",
        [](const std::string& spec, int cutoff, std::optional<double> mean, std::optional<double> std) {
            return target_spec(spec, cutoff, mean, std).resolve().amplitudes;
        },
        py::arg("spec"), py::arg("cutoff") = 10, py::arg("mean") = py::none(), py::arg("std") = py::none(),
        "Unit-norm target amplitudes for local-gaussian, gaussian, non-gaussian, vacuum, fock:<n> or file:<path>.");

    m.def(
        "fidelity",
        [](const std::vector<double>& params, const StateVector& target) {
            return fidelity(params, objective_for(params, target, "ideal", kDefaultShots));
        },
        py::arg("params"), py::arg("target"));
    m.def("swap_test_p0", &swap_test_p0, py::arg("fidelity"));
    m.def("objective_from_p0", &objective_from_p0, py::arg("p0"), py::arg("clamp_floor") = 0.5);
    m.def(
        "objective",
        [](const std::vector<double>& params, const StateVector& target, const std::string& mode, int shots,
           std::uint64_t seed) {
            Rng rng(seed);
            return evaluate(params, objective_for(params, target, mode, shots), &rng).objective;
        },
        py::arg("params"), py::arg("target"), py::arg("mode") = "ideal", py::arg("shots") = kDefaultShots,
        py::arg("seed") = 0);

    m.def(
        "minimize",
        [](const std::function<double(std::vector<double>)>& f, const std::vector<double>& x0,
           const std::string& optimizer, std::uint64_t seed, int max_iterations) {
            OptimizerSpec spec = OptimizerSpec::defaults(parse_optimizer(optimizer));
            if (max_iterations > 0) {
                spec.max_iterations = max_iterations;
            }
            Rng rng(seed);
            const OptResult r = minimize(
                [&](std::span<const double> x, EvalPurpose) { return f(std::vector<double>(x.begin(), x.end())); }, x0,
                spec, rng);
            py::dict d;
            d["x"] = r.best_params;
            d["fun"] = r.best_objective;
            d["nfev"] = r.nfev;
            d["grad_probe_evals"] = r.grad_probe_evals;
            d["total_evals"] = r.total_evals;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            d["termination"] = std::string(termination_name(r.termination));
            return d;
        },
        py::arg("f"), py::arg("x0"), py::arg("optimizer") = "powell", py::arg("seed") = 0,
        py::arg("max_iterations") = 0, "Minimizes a Python callable; 0 keeps the optimizer's iteration default.");

    m.def(
        "wigner",
        [](const ComplexMatrix& rho, const std::vector<double>& xs, const std::vector<double>& ps) {
            return wigner(rho, xs, ps).values;
        },
        py::arg("rho"), py::arg("x"), py::arg("p"), "W(x, p) on the grid, hbar = 1, rows indexed by x.");
    m.def("wigner_at", &wigner_at, py::arg("rho"), py::arg("x"), py::arg("p"));

    m.def(
        "run_cell",
        [](const std::string& config_json, int parallelism) {
            const SweepConfig sweep = parse_sweep_config(config_json);
            if (sweep.cells.size() != 1) {
                throw ConfigError("config expands to " + std::to_string(sweep.cells.size()) + " cells, expected 1");
            }
            CellResult r;
            {
                py::gil_scoped_release release;
                r = run_cell(sweep.cells[0], parallelism);
            }
            py::dict d;
            d["row"] = row_dict(r.row);
            py::list trials;
            for (const auto& t : r.trials) {
                trials.append(trial_dict(t));
            }
            d["trials"] = trials;
            return d;
        },
        py::arg("config_json"), py::arg("parallelism") = 1, "Runs the single cell described by a sweep JSON.");
    m.def(
        "run_sweep",
        [](const std::string& config_json, const std::filesystem::path& output_dir, int parallelism, bool resume) {
            const SweepConfig sweep = parse_sweep_config(config_json);
            SweepOptions opt;
            opt.output_dir = output_dir;
            opt.parallelism = parallelism;
            opt.resume = resume;
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = run_sweep(sweep, opt);
            }
            py::list rows;
            for (const auto& row : r.rows) {
                rows.append(row_dict(row));
            }
            return rows;
        },
        py::arg("config_json"), py::arg("output_dir"), py::arg("parallelism") = 1, py::arg("resume") = false);
}
