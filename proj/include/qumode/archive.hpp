#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qumode/bench.hpp"

namespace qumode {

/// Expanded experiment grid. Cells are unique by cell_key and kept in
/// declaration order (targets, optimizers, layers, modes, shots, fd steps).
struct SweepConfig {
    std::string name = "sweep";
    std::vector<ExperimentConfig> cells;
    /// Merged configuration (file + overrides) as pretty JSON.
    std::string resolved_json;
};

/// Parses a JSON sweep description. Every grid key accepts a scalar or a list.
/// `overrides` are "key=value" strings applied before expansion; dotted keys
/// reach nested objects and values are read as JSON when they parse as JSON.
SweepConfig parse_sweep_config(std::string_view json_text, std::span<const std::string> overrides = {});
SweepConfig load_sweep_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

struct SweepOptions {
    std::filesystem::path output_dir;
    int parallelism = 1;
    bool resume = false;
    std::ostream* progress = nullptr;
};

struct SweepResult {
    std::vector<BenchRow> rows;
    std::size_t cells_run = 0;
    std::size_t cells_skipped = 0;
};

/// Writes aggregate.csv, trials.jsonl and config.resolved.json under
/// options.output_dir, rewriting each through a temporary file and rename
/// after every cell. With resume, cells whose trials are all archived are
/// re-aggregated from the archive instead of re-run.
SweepResult run_sweep(const SweepConfig& sweep, const SweepOptions& options);

/// One archived trial line.
struct ArchivedTrial {
    std::string cell_key;
    std::size_t cell_index = 0;
    std::string target;
    std::string optimizer;
    int layers = 0;
    std::string mode;
    int shots = 0;
    double fd_step = 0.0;
    TrialResult trial;
};

std::string archive_line(const ExperimentConfig& cfg, std::size_t cell_index, const TrialResult& trial);
ArchivedTrial parse_archive_line(std::string_view line);
std::vector<ArchivedTrial> read_archive(const std::filesystem::path& path);

std::string_view aggregate_csv_header();
std::string aggregate_csv_row(const BenchRow& row);
void write_aggregate_csv(std::span<const BenchRow> rows, std::ostream& out);
std::vector<BenchRow> read_aggregate_csv(const std::filesystem::path& path);

/// Writes `content` to path.tmp, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace qumode
