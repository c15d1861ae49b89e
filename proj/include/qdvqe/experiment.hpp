#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qdvqe/models.hpp"
#include "qdvqe/quasi_dynamic.hpp"

namespace qdvqe {

enum class ModelKind { Heisenberg, Hubbard };
enum class InitialStateKind { Neel, NonInteracting };
enum class AnsatzKind { Heisenberg, Hva };

/// A fully resolved experiment sweep: every default filled in.
struct ExperimentConfig {
    ModelKind model = ModelKind::Heisenberg;
    LatticeSpec lattice = LatticeSpec::chain(2);
    HeisenbergParams heisenberg;
    HubbardParams hubbard;
    InitialStateKind initial_state = InitialStateKind::Neel;
    AnsatzKind ansatz = AnsatzKind::Heisenberg;
    std::vector<int> layers;
    /// 0 runs the unsliced baseline; s >= 1 runs the quasi-dynamic method
    /// with s blocks per layer.
    std::vector<int> slices_per_layer{0};
    double gtol = 1e-5;
    int max_iterations = 200;
    std::string output_dir;

    int qubit_count() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the YAML config document. Throws ConfigError with a line number for
/// unknown keys, missing required fields and invalid combinations.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical YAML form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// 16 hex digits identifying the resolved config.
std::string config_hash(const ExperimentConfig& cfg);

std::string to_string(ModelKind m);
std::string to_string(InitialStateKind s);
std::string to_string(AnsatzKind a);

/// One (layers, slices) cell of a sweep.
struct RunRecord {
    std::string config_hash;
    std::string model;
    std::string lattice;
    int layers = 0;
    int slices = 0;
    std::string arm;  // "baseline" or "quasi_dynamic"
    double exact_energy = 0.0;
    double energy = 0.0;
    double fidelity = 0.0;
    OptimizationTrace trace;
    EvalTotals totals;
    double wall_time_s = 0.0;
    /// Non-empty when the cell failed; the numeric fields are then unset.
    std::string error;
    nlohmann::json config;

    std::string cell_id() const;
    bool ok() const noexcept { return error.empty(); }
};

nlohmann::json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

struct RunOptions {
    int workers = 1;
    /// Cell ids such as "L2-S1"; empty runs every cell.
    std::vector<std::string> cells;
    /// Overrides the config's output_dir when non-empty.
    std::string output_dir;
    /// Write the per-cell JSON files and the CSV.
    bool write_files = true;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::filesystem::path output_dir;
    int failed_cells() const;
};

/// Builds the model, oracle and circuits and runs every selected cell.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string cell_id(int layers, int slices);

/// Fixed CSV header; one row per slicing step plus a "final" row per cell.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_rows(const RunRecord& r);
std::string to_csv(const std::vector<RunRecord>& records);

/// Loads every cell JSON under `dir` (or `dir`/cells), sorted by file name.
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

/// Writes plot-data files and SVG renderings; returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<RunRecord>& records,
                                              const std::filesystem::path& output_dir);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace qdvqe
