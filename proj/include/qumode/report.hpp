#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qumode/archive.hpp"
#include "qumode/bench.hpp"

namespace qumode {

/// Lowercase alphanumerics with runs of anything else folded to '_'.
std::string slug(std::string_view text);

/// Markdown table for rows sharing one (target, mode). Leading columns are
/// layers, method, infidelity mean/std, nfev mean/std.
std::string markdown_table(std::span<const BenchRow> rows);

/// Trace CSV with header `iteration,objective,true_infidelity`.
std::string trace_csv(std::span<const TraceRow> trace);

struct ReportFiles {
    std::vector<std::filesystem::path> tables;
    std::vector<std::filesystem::path> traces;
};

/// Writes tables/<target>_<mode>.md for every (target, mode) group and
/// traces/<cell>.csv for every archived trial that carries a trace.
ReportFiles emit_report(std::span<const BenchRow> rows, std::span<const ArchivedTrial> trials,
                        const std::filesystem::path& dir);

/// Regenerates the report from aggregate.csv and trials.jsonl in `dir`.
/// Throws Error when either is missing or the aggregate has no rows.
ReportFiles report_from_archive(const std::filesystem::path& dir);

} // namespace qumode
