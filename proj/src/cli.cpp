#include "qumode/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qumode/ansatz.hpp"
#include "qumode/archive.hpp"
#include "qumode/report.hpp"
#include "qumode/wigner.hpp"

namespace qumode {

namespace {

using nlohmann::json;

std::string default_output_dir()
{
    const char* env = std::getenv("QUMODE_OUTPUT_DIR");
    return (env != nullptr && *env != '\0') ? env : "results";
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string config;
    std::string target = "local-gaussian";
    double mean = 0.0;
    double std = 0.0;
    int cutoff = 10;
    std::string optimizer = "powell";
    int layers = 1;
    std::string mode = "ideal";
    int shots = kDefaultShots;
    double fd_step = 0.0;
    int trials = 30;
    std::uint64_t seed = 0;
    double threshold = 0.1;
    std::vector<std::string> overrides;
    int parallelism = 1;
    std::string output_dir = default_output_dir();
    bool trace = false;
};

struct SweepArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::string output_dir = default_output_dir();
    bool resume = false;
};

struct WignerArgs {
    std::string target;
    std::string params;
    int cutoff = 10;
    double range = 5.0;
    std::size_t points = 201;
    std::string output = "-";
};

struct ReportArgs {
    std::string sweep_dir;
};

std::string assign(const std::string& key, const json& value)
{
    return key + "=" + value.dump();
}

int cmd_run(const RunArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    const bool have_config = !a.config.empty();
    const auto given = [&](const char* name) { return !have_config || sub.count(name) > 0; };

    std::vector<std::string> overrides;
    if (given("--cutoff")) {
        overrides.push_back(assign("cutoff", a.cutoff));
    }
    if (given("--target") || sub.count("--mean") > 0 || sub.count("--std") > 0) {
        json target = json::object();
        target["family"] = a.target;
        if (sub.count("--mean") > 0) {
            target["mean"] = a.mean;
        }
        if (sub.count("--std") > 0) {
            target["std"] = a.std;
        }
        overrides.push_back(assign("target", target.size() == 1 ? json(a.target) : target));
    }
    if (given("--optimizer")) {
        overrides.push_back(assign("optimizer", a.optimizer));
    }
    if (given("--layers")) {
        overrides.push_back(assign("layers", a.layers));
    }
    if (given("--mode")) {
        overrides.push_back(assign("mode", a.mode));
    }
    if (given("--shots")) {
        overrides.push_back(assign("shots", a.shots));
    }
    if (sub.count("--fd-step") > 0) {
        overrides.push_back(assign("fd_step", a.fd_step));
    }
    if (given("--trials")) {
        overrides.push_back(assign("trials", a.trials));
    }
    if (given("--seed")) {
        overrides.push_back(assign("seed", a.seed));
    }
    if (given("--threshold")) {
        overrides.push_back(assign("threshold", a.threshold));
    }
    if (a.trace) {
        overrides.push_back(assign("record_trace", true));
    }
    overrides.insert(overrides.end(), a.overrides.begin(), a.overrides.end());

    const SweepConfig sweep = parse_sweep_config(have_config ? read_text(a.config) : "{}", overrides);
    if (sweep.cells.size() != 1) {
        throw ConfigError("run needs exactly one cell but the configuration expands to " +
                          std::to_string(sweep.cells.size()) + "; use the sweep subcommand");
    }
    const ExperimentConfig& cfg = sweep.cells.front();
    const CellResult cell = run_cell(cfg, a.parallelism);
    out << aggregate_csv_header() << '\n' << aggregate_csv_row(cell.row) << '\n';

    if (a.trace) {
        std::vector<ArchivedTrial> archived;
        for (const auto& t : cell.trials) {
            if (!t.trace.empty()) {
                archived.push_back(parse_archive_line(archive_line(cfg, 0, t)));
            }
        }
        const auto dir = std::filesystem::path(a.output_dir) / "traces";
        std::filesystem::create_directories(dir);
        for (const auto& t : archived) {
            const auto path = dir / (slug(t.target + "_" + t.optimizer + "_l" + std::to_string(t.layers) + "_" +
                                          t.mode + "_seed" + std::to_string(cfg.base_seed)) +
                                     ".csv");
            write_file_atomic(path, trace_csv(t.trial.trace));
            err << "trace written to " << path.string() << '\n';
        }
    }
    return kExitOk;
}

int cmd_sweep(const SweepArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> overrides;
    if (sub.count("--seed") > 0) {
        overrides.push_back(assign("seed", a.seed));
    }
    overrides.insert(overrides.end(), a.overrides.begin(), a.overrides.end());
    const SweepConfig sweep = load_sweep_config(a.config, overrides);

    SweepOptions options;
    options.output_dir = std::filesystem::path(a.output_dir) / slug(sweep.name);
    options.parallelism = a.parallelism;
    options.resume = a.resume;
    options.progress = &err;
    const SweepResult result = run_sweep(sweep, options);
    report_from_archive(options.output_dir);
    out << "wrote " << result.rows.size() << " rows to " << (options.output_dir / "aggregate.csv").string() << " ("
        << result.cells_run << " run, " << result.cells_skipped << " resumed)\n";
    return kExitOk;
}

std::vector<double> read_params(const std::string& path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + " is not valid JSON: " + std::string(e.what()));
    }
    try {
        if (j.is_array()) {
            return j.get<std::vector<double>>();
        }
        if (j.contains("final_params")) {
            return j.at("final_params").get<std::vector<double>>();
        }
        if (j.contains("trial")) {
            return j.at("trial").at("final_params").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": parameters must be numbers: " + std::string(e.what()));
    }
    throw ConfigError(path + ": expected a parameter array or an object with final_params");
}

int cmd_wigner(const WignerArgs& a, std::ostream& out, std::ostream& err)
{
    const FockCutoff cutoff(a.cutoff);
    ComplexMatrix rho;
    std::string source;
    if (!a.target.empty()) {
        const StateVector phi = TargetSpec::parse(a.target, cutoff).resolve().amplitudes;
        rho = phi * phi.adjoint();
        source = "target " + a.target;
    } else {
        const std::vector<double> params = read_params(a.params);
        if (params.empty() || params.size() % LayerParams::kCount != 0) {
            throw ConfigError("parameter count " + std::to_string(params.size()) + " is not a positive multiple of " +
                              std::to_string(LayerParams::kCount));
        }
        AnsatzConfig ansatz;
        ansatz.n_layers = static_cast<int>(params.size() / LayerParams::kCount);
        ansatz.cutoff = cutoff;
        rho = partial_trace_qubit(apply_ansatz(std::span<const double>(params), ansatz), cutoff);
        source = "ansatz " + a.params;
    }
    const auto axis = linspace(-a.range, a.range, a.points);
    WignerGrid grid = wigner(rho, axis, axis);
    grid.source = source;
    for (const auto& w : grid.warnings) {
        err << "warning: " << w << '\n';
    }
    if (a.output == "-") {
        write_grid(grid, out);
    } else {
        export_grid(grid, a.output);
    }
    return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out)
{
    const ReportFiles files = report_from_archive(a.sweep_dir);
    out << "wrote " << files.tables.size() << " tables and " << files.traces.size() << " traces under " << a.sweep_dir
        << '\n';
    return kExitOk;
}

} // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variational qubit-qumode state preparation benchmarks", "qumode-bench"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    const std::vector<std::string> optimizers = {"spsa", "nelder-mead", "nelder_mead", "powell", "cobyla", "cg", "lbfgs", "l-bfgs"};
    const std::vector<std::string> modes = {"ideal", "sampled", "sampling"};

    RunArgs run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one benchmark cell and print its aggregate row");
    run_cmd->add_option("--config", run.config, "Sweep JSON expanding to one cell; flags override it")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--target", run.target,
                        "local-gaussian | gaussian | non-gaussian | vacuum | fock:N | file:PATH");
    run_cmd->add_option("--mean", run.mean, "Gaussian envelope mean (family default when omitted)")
        ->default_str("auto");
    run_cmd->add_option("--std", run.std, "Gaussian envelope width (family default when omitted)")
        ->default_str("auto");
    run_cmd->add_option("--cutoff", run.cutoff, "Fock cutoff")->check(CLI::Range(2, 64));
    run_cmd->add_option("--optimizer", run.optimizer, "Optimizer")->check(CLI::IsMember(optimizers));
    run_cmd->add_option("--layers", run.layers, "Ansatz layers")->check(CLI::PositiveNumber);
    run_cmd->add_option("--mode", run.mode, "Objective evaluation mode")->check(CLI::IsMember(modes));
    run_cmd->add_option("--shots", run.shots, "Swap-test shots in sampled mode")->check(CLI::PositiveNumber);
    run_cmd->add_option("--fd-step", run.fd_step, "Finite-difference step (0.03 ideal, 0.08 sampled when omitted)")
        ->default_str("auto");
    run_cmd->add_option("--trials", run.trials, "Trials in the cell")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", run.seed, "Base seed");
    run_cmd->add_option("--threshold", run.threshold, "True-infidelity threshold for convergence");
    run_cmd->add_option("--set", run.overrides, "Extra key=value overrides (dotted keys, JSON values)");
    run_cmd->add_option("--parallelism", run.parallelism, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--output-dir", run.output_dir, "Directory for trace files (env QUMODE_OUTPUT_DIR)");
    run_cmd->add_flag("--trace", run.trace, "Write the iteration trace of trial 0 under output-dir/traces");

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a sweep grid and write aggregate, archive and report");
    sweep_cmd->add_option("--config", sweep.config, "Sweep JSON file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--set", sweep.overrides, "key=value overrides (dotted keys, JSON values)");
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed (overrides the config)");
    sweep_cmd->add_option("--parallelism", sweep.parallelism, "Worker threads per cell")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--output-dir", sweep.output_dir, "Results root; files go to <dir>/<sweep name>");
    sweep_cmd->add_flag("--resume", sweep.resume, "Reuse cells already complete in trials.jsonl");

    WignerArgs wig;
    CLI::App* wigner_cmd = app.add_subcommand("wigner", "Write the Wigner function of a target or learnt state as CSV");
    auto* target_opt = wigner_cmd->add_option("--target", wig.target, "Target spec, as for run --target");
    auto* params_opt =
        wigner_cmd->add_option("--params", wig.params, "JSON parameter array, trial object or archive line")
            ->check(CLI::ExistingFile);
    target_opt->excludes(params_opt);
    wigner_cmd->add_option("--cutoff", wig.cutoff, "Fock cutoff")->check(CLI::Range(2, 64));
    wigner_cmd->add_option("--range", wig.range, "Grid spans [-range, range] on both axes")
        ->check(CLI::PositiveNumber);
    wigner_cmd->add_option("--points", wig.points, "Points per axis")->check(CLI::Range(2, 4001));
    wigner_cmd->add_option("--output", wig.output, "CSV path, '-' for stdout");

    ReportArgs report;
    CLI::App* report_cmd = app.add_subcommand("report", "Regenerate tables and traces from a sweep directory");
    report_cmd->add_option("--sweep-dir", report.sweep_dir, "Directory holding aggregate.csv and trials.jsonl")
        ->required();

    try {
        app.parse(argc, argv);
        if (wigner_cmd->parsed() && wig.target.empty() && wig.params.empty()) {
            throw CLI::RequiredError("wigner needs --target or --params");
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run, *run_cmd, out, err);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep, *sweep_cmd, out, err);
        }
        if (wigner_cmd->parsed()) {
            return cmd_wigner(wig, out, err);
        }
        return cmd_report(report, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace qumode
