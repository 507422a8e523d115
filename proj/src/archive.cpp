#include "qumode/archive.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qumode/errors.hpp"

namespace qumode {

using nlohmann::json;

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

json as_list(const json& v)
{
    return v.is_array() ? v : json::array({v});
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback)
{
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        return it->get<T>();
    }
    return fallback;
}

json parse_override_value(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text);
    }
}

void apply_override(json& root, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            (*node)[part] = parse_override_value(assignment.substr(eq + 1));
            return;
        }
        json& child = (*node)[part];
        if (!child.is_object()) {
            child = json::object();
        }
        node = &child;
        start = dot + 1;
    }
}

TargetSpec parse_target(const json& t, FockCutoff cutoff)
{
    if (t.is_string()) {
        return TargetSpec::parse(t.get<std::string>(), cutoff);
    }
    if (!t.is_object()) {
        throw ConfigError("target must be a name or an object");
    }
    if (t.contains("amplitudes")) {
        std::vector<Complex> values;
        for (const auto& a : t.at("amplitudes")) {
            if (a.is_array()) {
                values.emplace_back(a.at(0).get<double>(), a.size() > 1 ? a.at(1).get<double>() : 0.0);
            } else {
                values.emplace_back(a.get<double>(), 0.0);
            }
        }
        return TargetSpec::from_amplitudes(std::move(values), cutoff, get_or<std::string>(t, "name", "explicit"));
    }
    TargetSpec spec = TargetSpec::parse(get_or<std::string>(t, "family", "local-gaussian"), cutoff);
    spec.mean = get_or(t, "mean", spec.mean);
    spec.std = get_or(t, "std", spec.std);
    return spec;
}

void apply_optimizer_options(OptimizerSpec& s, const json& o)
{
    if (!o.is_object()) {
        return;
    }
    static const std::set<std::string> known = {
        "max_iterations", "max_evaluations", "tolerance",   "gtol",         "lbfgs_memory",
        "max_line_search_steps", "armijo_c1", "powell_line_tol", "cobyla_rho_begin", "cobyla_rho_end",
        "spsa_a",         "spsa_c",          "spsa_A",      "spsa_alpha",   "spsa_gamma",
        "spsa_first_step", "spsa_calibration_window"};
    for (const auto& [k, v] : o.items()) {
        if (!known.contains(k) && !v.is_object()) {
            throw ConfigError("unknown optimizer option '" + k + "'");
        }
    }
    s.max_iterations = get_or(o, "max_iterations", s.max_iterations);
    s.max_evaluations = get_or(o, "max_evaluations", s.max_evaluations);
    s.tolerance = get_or(o, "tolerance", s.tolerance);
    s.gtol = get_or(o, "gtol", s.gtol);
    s.lbfgs_memory = get_or(o, "lbfgs_memory", s.lbfgs_memory);
    s.max_line_search_steps = get_or(o, "max_line_search_steps", s.max_line_search_steps);
    s.armijo_c1 = get_or(o, "armijo_c1", s.armijo_c1);
    s.powell_line_tol = get_or(o, "powell_line_tol", s.powell_line_tol);
    s.cobyla_rho_begin = get_or(o, "cobyla_rho_begin", s.cobyla_rho_begin);
    s.cobyla_rho_end = get_or(o, "cobyla_rho_end", s.cobyla_rho_end);
    s.spsa.a = get_or(o, "spsa_a", s.spsa.a);
    s.spsa.c = get_or(o, "spsa_c", s.spsa.c);
    s.spsa.A = get_or(o, "spsa_A", s.spsa.A);
    s.spsa.alpha_exp = get_or(o, "spsa_alpha", s.spsa.alpha_exp);
    s.spsa.gamma_exp = get_or(o, "spsa_gamma", s.spsa.gamma_exp);
    s.spsa.first_step = get_or(o, "spsa_first_step", s.spsa.first_step);
    s.spsa.calibration_window = get_or(o, "spsa_calibration_window", s.spsa.calibration_window);
}

json trial_to_json(const TrialResult& t)
{
    json j;
    j["trial_index"] = t.trial_index;
    j["seed"] = t.seed;
    j["initial_params"] = t.initial_params;
    j["final_params"] = t.final_params;
    j["final_objective"] = t.final_objective;
    j["final_true_infidelity"] = t.final_true_infidelity;
    j["nfev"] = t.nfev;
    j["grad_probe_evals"] = t.grad_probe_evals;
    j["total_evals"] = t.total_evals;
    j["iterations"] = t.iterations;
    j["termination"] = termination_name(t.termination);
    j["converged"] = t.converged;
    j["wall_time"] = t.wall_time;
    if (!t.trace.empty()) {
        json tr = json::array();
        for (const auto& r : t.trace) {
            tr.push_back({r.iteration, r.objective, r.true_infidelity});
        }
        j["trace"] = std::move(tr);
    }
    return j;
}

Termination parse_termination(const std::string& s)
{
    for (auto t : {Termination::tolerance, Termination::gradient_small, Termination::line_search_failed,
                   Termination::trust_region_final, Termination::iteration_cap, Termination::evaluation_cap}) {
        if (termination_name(t) == s) {
            return t;
        }
    }
    throw ConfigError("unknown termination '" + s + "' in archive");
}

TrialResult trial_from_json(const json& j)
{
    TrialResult t;
    t.trial_index = j.at("trial_index").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.initial_params = j.at("initial_params").get<std::vector<double>>();
    t.final_params = j.at("final_params").get<std::vector<double>>();
    t.final_objective = j.at("final_objective").get<double>();
    t.final_true_infidelity = j.at("final_true_infidelity").get<double>();
    t.nfev = j.at("nfev").get<std::size_t>();
    t.grad_probe_evals = j.at("grad_probe_evals").get<std::size_t>();
    t.total_evals = j.at("total_evals").get<std::size_t>();
    t.iterations = j.at("iterations").get<std::size_t>();
    t.termination = parse_termination(j.at("termination").get<std::string>());
    t.converged = j.at("converged").get<bool>();
    t.wall_time = j.at("wall_time").get<double>();
    if (const auto it = j.find("trace"); it != j.end()) {
        for (const auto& r : *it) {
            t.trace.push_back({r.at(0).get<std::size_t>(), r.at(1).get<double>(), r.at(2).get<double>()});
        }
    }
    return t;
}

} // namespace

SweepConfig parse_sweep_config(std::string_view json_text, std::span<const std::string> overrides)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("sweep config must be a JSON object");
    }
    for (const auto& o : overrides) {
        apply_override(root, o);
    }

    static const std::set<std::string> known = {
        "name",  "cutoff", "target",   "targets",   "optimizer",    "optimizers",        "layers",
        "mode",  "modes",  "shots",    "fd_step",   "fd_steps",     "trials",            "seed",
        "threshold", "clamp_floor", "record_trace", "init", "optimizer_options", "per_optimizer"};
    for (const auto& [k, v] : root.items()) {
        if (!known.contains(k)) {
            throw ConfigError("unknown sweep config key '" + k + "'");
        }
    }

    SweepConfig sweep;
    try {
        sweep.name = get_or<std::string>(root, "name", "sweep");
        const FockCutoff cutoff(get_or(root, "cutoff", 10));
        const json targets = as_list(root.contains("targets") ? root["targets"] : root.value("target", json("local-gaussian")));
        const json optimizers = as_list(root.contains("optimizers") ? root["optimizers"] : root.value("optimizer", json("powell")));
        const json layers = as_list(root.value("layers", json(1)));
        const json modes = as_list(root.contains("modes") ? root["modes"] : root.value("mode", json("ideal")));
        const json shots = as_list(root.value("shots", json(kDefaultShots)));
        const json fd_steps = root.contains("fd_steps") ? as_list(root["fd_steps"])
                              : root.contains("fd_step") ? as_list(root["fd_step"])
                                                          : json(nullptr);
        const int trials = get_or(root, "trials", 30);
        const auto seed = get_or<std::uint64_t>(root, "seed", 0);
        const double threshold = get_or(root, "threshold", 0.1);
        const double clamp_floor = get_or(root, "clamp_floor", 0.5);
        const bool record_trace = get_or(root, "record_trace", false);
        InitRanges init;
        if (const auto it = root.find("init"); it != root.end()) {
            init.angle_lo = get_or(*it, "angle_lo", init.angle_lo);
            init.angle_hi = get_or(*it, "angle_hi", init.angle_hi);
            init.displacement_lo = get_or(*it, "displacement_lo", init.displacement_lo);
            init.displacement_hi = get_or(*it, "displacement_hi", init.displacement_hi);
        }
        const json opt_options = root.value("optimizer_options", json::object());
        const json per_optimizer = root.value("per_optimizer", json::object());

        std::set<std::string> seen;
        for (const auto& t : targets) {
            const TargetSpec target = parse_target(t, cutoff);
            for (const auto& o : optimizers) {
                const OptimizerKind kind = parse_optimizer(o.get<std::string>());
                for (const auto& l : layers) {
                    for (const auto& m : modes) {
                        const EvalMode mode = parse_mode(m.get<std::string>());
                        const json shot_list = mode == EvalMode::ideal ? json::array({kDefaultShots}) : shots;
                        const bool fd_matters = kind == OptimizerKind::cg || kind == OptimizerKind::lbfgs;
                        for (const auto& s : shot_list) {
                            OptimizerSpec base = OptimizerSpec::defaults(kind, mode);
                            const json fd_list = (fd_steps.is_null() || !fd_matters) ? json::array({base.fd_step}) : fd_steps;
                            for (const auto& h : fd_list) {
                                ExperimentConfig cfg;
                                cfg.target = target;
                                cfg.optimizer = base;
                                cfg.optimizer.fd_step = h.get<double>();
                                apply_optimizer_options(cfg.optimizer, opt_options);
                                if (const auto it = per_optimizer.find(std::string(optimizer_name(kind)));
                                    it != per_optimizer.end()) {
                                    apply_optimizer_options(cfg.optimizer, *it);
                                }
                                cfg.layers = l.get<int>();
                                cfg.mode = mode;
                                cfg.shots = s.get<int>();
                                cfg.trials = trials;
                                cfg.base_seed = seed;
                                cfg.init = init;
                                cfg.convergence_threshold = threshold;
                                cfg.clamp_floor = clamp_floor;
                                cfg.record_trace = record_trace;
                                cfg.validate();
                                if (seen.insert(cfg.cell_key()).second) {
                                    sweep.cells.push_back(std::move(cfg));
                                }
                            }
                        }
                    }
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sweep config has a value of the wrong type: ") + e.what());
    }
    if (sweep.cells.empty()) {
        throw ConfigError("sweep config expands to no cells");
    }
    root["name"] = sweep.name;
    sweep.resolved_json = root.dump(2);
    return sweep;
}

SweepConfig load_sweep_config(const std::filesystem::path& path, std::span<const std::string> overrides)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open sweep config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str(), overrides);
}

std::string archive_line(const ExperimentConfig& cfg, std::size_t cell_index, const TrialResult& trial)
{
    json j;
    j["cell_key"] = cfg.cell_key();
    j["cell_index"] = cell_index;
    j["target"] = cfg.target.label();
    j["optimizer"] = optimizer_name(cfg.optimizer.kind);
    j["layers"] = cfg.layers;
    j["mode"] = mode_name(cfg.mode);
    j["shots"] = cfg.mode == EvalMode::sampled ? cfg.shots : 0;
    j["fd_step"] = cfg.optimizer.fd_step;
    j["trial"] = trial_to_json(trial);
    return j.dump();
}

ArchivedTrial parse_archive_line(std::string_view line)
{
    try {
        const json j = json::parse(line);
        ArchivedTrial a;
        a.cell_key = j.at("cell_key").get<std::string>();
        a.cell_index = j.at("cell_index").get<std::size_t>();
        a.target = j.at("target").get<std::string>();
        a.optimizer = j.at("optimizer").get<std::string>();
        a.layers = j.at("layers").get<int>();
        a.mode = j.at("mode").get<std::string>();
        a.shots = j.at("shots").get<int>();
        a.fd_step = j.at("fd_step").get<double>();
        a.trial = trial_from_json(j.at("trial"));
        return a;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed archive line: ") + e.what());
    }
}

std::vector<ArchivedTrial> read_archive(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open archive " + path.string());
    }
    std::vector<ArchivedTrial> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(parse_archive_line(line));
        }
    }
    return out;
}

std::string_view aggregate_csv_header()
{
    return "target,optimizer,layers,mode,shots,fd_step,trials,infidelity_mean,infidelity_std,nfev_mean,nfev_std,"
           "nonconverged_pct,total_evals_mean,objective_mean,objective_std";
}

std::string aggregate_csv_row(const BenchRow& r)
{
    std::ostringstream os;
    os << csv_field(r.target) << ',' << r.optimizer << ',' << r.layers << ',' << r.mode << ',' << r.shots << ','
       << fmt17(r.fd_step) << ',' << r.trials << ',' << fmt17(r.infidelity_mean) << ',' << fmt17(r.infidelity_std)
       << ',' << fmt17(r.nfev_mean) << ',' << fmt17(r.nfev_std) << ',' << fmt17(r.nonconverged_pct) << ','
       << fmt17(r.total_evals_mean) << ',' << fmt17(r.objective_mean) << ',' << fmt17(r.objective_std);
    return os.str();
}

void write_aggregate_csv(std::span<const BenchRow> rows, std::ostream& out)
{
    out << aggregate_csv_header() << '\n';
    for (const auto& r : rows) {
        out << aggregate_csv_row(r) << '\n';
    }
}

std::vector<BenchRow> read_aggregate_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != aggregate_csv_header()) {
        throw ConfigError(path.string() + ": missing or unexpected header");
    }
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 15) {
            throw ConfigError(path.string() + ": row has " + std::to_string(f.size()) + " fields");
        }
        BenchRow r;
        r.target = f[0];
        r.optimizer = f[1];
        r.layers = std::stoi(f[2]);
        r.mode = f[3];
        r.shots = std::stoi(f[4]);
        r.fd_step = std::stod(f[5]);
        r.trials = std::stoul(f[6]);
        r.infidelity_mean = std::stod(f[7]);
        r.infidelity_std = std::stod(f[8]);
        r.nfev_mean = std::stod(f[9]);
        r.nfev_std = std::stod(f[10]);
        r.nonconverged_pct = std::stod(f[11]);
        r.total_evals_mean = std::stod(f[12]);
        r.objective_mean = std::stod(f[13]);
        r.objective_std = std::stod(f[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing: " + std::strerror(errno));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw Error("write to " + tmp.string() + " failed: " + std::strerror(errno));
        }
    }
    std::filesystem::rename(tmp, path);
}

SweepResult run_sweep(const SweepConfig& sweep, const SweepOptions& options)
{
    if (sweep.cells.empty()) {
        throw ConfigError("sweep has no cells");
    }
    std::filesystem::create_directories(options.output_dir);
    const auto archive_path = options.output_dir / "trials.jsonl";
    const auto aggregate_path = options.output_dir / "aggregate.csv";
    write_file_atomic(options.output_dir / "config.resolved.json", sweep.resolved_json + "\n");

    // cell_key -> trial_index -> archived line
    std::map<std::string, std::map<std::size_t, std::string>> archived;
    if (options.resume && std::filesystem::exists(archive_path)) {
        std::ifstream in(archive_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            const ArchivedTrial a = parse_archive_line(line);
            archived[a.cell_key][a.trial.trial_index] = line;
        }
    }

    SweepResult result;
    std::vector<std::string> lines;
    std::vector<BenchRow> rows;
    const auto flush = [&] {
        std::string text;
        for (const auto& l : lines) {
            text += l;
            text += '\n';
        }
        write_file_atomic(archive_path, text);
        std::ostringstream csv;
        write_aggregate_csv(rows, csv);
        write_file_atomic(aggregate_path, csv.str());
    };

    for (std::size_t ci = 0; ci < sweep.cells.size(); ++ci) {
        const ExperimentConfig& cfg = sweep.cells[ci];
        const std::string key = cfg.cell_key();
        const auto found = archived.find(key);
        if (found != archived.end() && found->second.size() == static_cast<std::size_t>(cfg.trials) &&
            found->second.rbegin()->first + 1 == static_cast<std::size_t>(cfg.trials)) {
            std::vector<TrialResult> trials;
            for (const auto& [idx, line] : found->second) {
                lines.push_back(line);
                trials.push_back(parse_archive_line(line).trial);
            }
            rows.push_back(aggregate(cfg, trials));
            ++result.cells_skipped;
            if (options.progress != nullptr) {
                *options.progress << "[" << ci + 1 << "/" << sweep.cells.size() << "] resumed " << rows.back().target
                                  << " " << rows.back().optimizer << " L" << cfg.layers << "\n";
            }
            continue;
        }
        try {
            CellResult cell = run_cell(cfg, options.parallelism);
            for (const auto& t : cell.trials) {
                lines.push_back(archive_line(cfg, ci, t));
            }
            rows.push_back(cell.row);
            ++result.cells_run;
        } catch (const CellAborted& e) {
            for (const auto& t : e.completed()) {
                lines.push_back(archive_line(cfg, ci, t));
            }
            flush();
            throw;
        }
        flush();
        if (options.progress != nullptr) {
            const auto& r = rows.back();
            *options.progress << "[" << ci + 1 << "/" << sweep.cells.size() << "] " << r.target << " " << r.optimizer
                              << " L" << r.layers << " " << r.mode << " infidelity " << r.infidelity_mean << "\n";
        }
    }
    flush();
    result.rows = std::move(rows);
    return result;
}

} // namespace qumode
