#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qdvqe/errors.hpp"
#include "qdvqe/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

std::vector<std::string> split_cells(const std::string& filter) {
    std::vector<std::string> out;
    std::stringstream ss(filter);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

int cmd_validate(const std::string& path) {
    const qdvqe::ExperimentConfig cfg = qdvqe::load_config(path);
    std::cout << "# resolved config (hash " << qdvqe::config_hash(cfg) << ", " << cfg.qubit_count() << " qubits)\n"
              << qdvqe::serialize_config(cfg);
    return kExitOk;
}

int cmd_run(const std::string& path, int workers, const std::string& cells, const std::string& output) {
    const qdvqe::ExperimentConfig cfg = qdvqe::load_config(path);
    qdvqe::RunOptions opts;
    opts.workers = workers;
    opts.cells = split_cells(cells);
    opts.output_dir = output;
    const qdvqe::ExperimentResult result = qdvqe::run_experiment(cfg, opts);
    for (const auto& r : result.records) {
        std::cout << r.cell_id() << " " << r.arm << ": ";
        if (r.ok()) {
            std::cout << "energy " << r.energy << " (exact " << r.exact_energy << "), fidelity " << r.fidelity
                      << ", evaluations " << r.totals.cost_evals << ", " << r.wall_time_s << " s\n";
        } else {
            std::cout << "FAILED: " << r.error << "\n";
        }
    }
    std::cout << "results written to " << result.output_dir.string() << "\n";
    return result.failed_cells() == 0 ? kExitOk : kExitPartial;
}

int cmd_plot(const std::string& records_dir, const std::string& output) {
    const auto records = qdvqe::load_records(records_dir);
    const std::filesystem::path out =
        output.empty() ? std::filesystem::path(records_dir) / "plots" : std::filesystem::path(output);
    const auto files = qdvqe::emit_plots(records, out);
    std::cout << files.size() << " plot files written to " << out.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-dynamical VQE experiment runner"};
    app.require_subcommand(1);

    int workers = 1;
    std::string cells;
    std::string output;
    std::string config_path;
    std::string records_dir;

    auto* run = app.add_subcommand("run", "Run every cell of an experiment sweep");
    run->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "Cells run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--cells", cells, "Comma-separated cell ids, e.g. L1-S0,L2-S1");
    run->add_option("--output", output, "Output directory (overrides output_dir)");

    auto* validate = app.add_subcommand("validate", "Parse a config and print it with defaults resolved");
    validate->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);

    auto* plot = app.add_subcommand("plot", "Write plot data and SVG files from cell records");
    plot->add_option("records", records_dir, "Run output directory or its cells/ directory")->required();
    plot->add_option("--output", output, "Plot directory (default <records>/plots)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path, workers, cells, output);
        }
        if (*validate) {
            return cmd_validate(config_path);
        }
        return cmd_plot(records_dir, output);
    } catch (const qdvqe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
