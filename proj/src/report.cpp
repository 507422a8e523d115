#include "qumode/report.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

#include "qumode/errors.hpp"

namespace qumode {

namespace {

std::string fixed(double v, int digits)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell_slug(const ArchivedTrial& a)
{
    std::string s = a.target + "_" + a.optimizer + "_l" + std::to_string(a.layers) + "_" + a.mode;
    if (a.mode == "sampled") {
        s += "_s" + std::to_string(a.shots);
    }
    s += "_h" + fmt17(a.fd_step) + "_t" + std::to_string(a.trial.trial_index);
    return slug(s);
}

} // namespace

std::string slug(std::string_view text)
{
    std::string out;
    bool gap = false;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) != 0) {
            if (gap && !out.empty()) {
                out += '_';
            }
            gap = false;
            out += static_cast<char>(std::tolower(u));
        } else {
            gap = true;
        }
    }
    return out.empty() ? "unnamed" : out;
}

std::string markdown_table(std::span<const BenchRow> rows)
{
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"layers", "method", "infidelity_mean", "infidelity_std", "nfev_mean", "nfev_std", "shots",
                     "fd_step", "trials", "nonconverged_pct", "total_evals_mean", "objective_mean", "objective_std"});
    for (const auto& r : rows) {
        const bool sampled = r.mode == "sampled";
        cells.push_back({std::to_string(r.layers), r.optimizer, fixed(r.infidelity_mean, 5), fixed(r.infidelity_std, 5),
                         fixed(r.nfev_mean, 1), fixed(r.nfev_std, 1), sampled ? std::to_string(r.shots) : "-",
                         fixed(r.fd_step, 3), std::to_string(r.trials), fixed(r.nonconverged_pct, 1),
                         fixed(r.total_evals_mean, 1), fixed(r.objective_mean, 5), fixed(r.objective_std, 5)});
    }
    std::vector<std::size_t> width(cells.front().size(), 3);
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            width[i] = std::max(width[i], row[i].size());
        }
    }
    std::ostringstream os;
    const auto emit = [&](const std::vector<std::string>& row) {
        os << '|';
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << ' ' << row[i] << std::string(width[i] - row[i].size(), ' ') << " |";
        }
        os << '\n';
    };
    emit(cells.front());
    os << '|';
    for (std::size_t w : width) {
        os << std::string(w + 2, '-') << '|';
    }
    os << '\n';
    for (std::size_t i = 1; i < cells.size(); ++i) {
        emit(cells[i]);
    }
    return os.str();
}

std::string trace_csv(std::span<const TraceRow> trace)
{
    std::string out = "iteration,objective,true_infidelity\n";
    for (const auto& r : trace) {
        out += std::to_string(r.iteration) + "," + fmt17(r.objective) + "," + fmt17(r.true_infidelity) + "\n";
    }
    return out;
}

ReportFiles emit_report(std::span<const BenchRow> rows, std::span<const ArchivedTrial> trials,
                        const std::filesystem::path& dir)
{
    if (rows.empty()) {
        throw Error("report needs at least one aggregated row");
    }
    ReportFiles files;
    std::map<std::pair<std::string, std::string>, std::vector<BenchRow>> groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.target, r.mode);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        it->second.push_back(r);
    }
    std::filesystem::create_directories(dir / "tables");
    for (const auto& key : order) {
        const auto& group = groups[key];
        std::string text = "# " + key.first + ", " + key.second + "\n\n";
        text += key.second == "sampled"
                    ? "infidelity_* is the ideal re-evaluation at the final parameters; objective_* is the noisy "
                      "value the optimizer saw.\n\n"
                    : "infidelity_* and objective_* coincide in ideal mode.\n\n";
        text += markdown_table(group);
        const auto path = dir / "tables" / (slug(key.first + "_" + key.second) + ".md");
        write_file_atomic(path, text);
        files.tables.push_back(path);
    }
    for (const auto& a : trials) {
        if (a.trial.trace.empty()) {
            continue;
        }
        std::filesystem::create_directories(dir / "traces");
        const auto path = dir / "traces" / (cell_slug(a) + ".csv");
        write_file_atomic(path, trace_csv(a.trial.trace));
        files.traces.push_back(path);
    }
    return files;
}

ReportFiles report_from_archive(const std::filesystem::path& dir)
{
    const auto aggregate_path = dir / "aggregate.csv";
    const auto archive_path = dir / "trials.jsonl";
    if (!std::filesystem::exists(aggregate_path) || !std::filesystem::exists(archive_path)) {
        throw Error("no archive in " + dir.string() + ": expected aggregate.csv and trials.jsonl");
    }
    const auto rows = read_aggregate_csv(aggregate_path);
    if (rows.empty()) {
        throw Error("archive in " + dir.string() + " is empty: aggregate.csv has no rows");
    }
    const auto trials = read_archive(archive_path);
    return emit_report(rows, trials, dir);
}

} // namespace qumode
