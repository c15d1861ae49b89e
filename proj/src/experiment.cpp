#include "qdvqe/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

constexpr const char* kSlicesConvention =
    "slices = blocks per layer; 0 runs the unsliced standard VQE (baseline), "
    "s >= 1 optimizes s blocks per layer in order before a final full optimization";

int line_of(const YAML::Node& n) {
    return n.Mark().is_null() ? -1 : n.Mark().line + 1;
}

template <class T>
T read_scalar(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) {
        throw ConfigError(field + " must be a scalar", line_of(n));
    }
    try {
        return n.as<T>();
    } catch (const YAML::BadConversion&) {
        throw ConfigError(field + ": cannot interpret '" + n.Scalar() + "'", line_of(n));
    }
}

std::vector<int> read_int_list(const YAML::Node& n, const std::string& field) {
    std::vector<int> out;
    if (n.IsScalar()) {
        out.push_back(read_scalar<int>(n, field));
    } else if (n.IsSequence()) {
        for (const auto& item : n) {
            out.push_back(read_scalar<int>(item, field));
        }
    } else {
        throw ConfigError(field + " must be an integer or a list of integers", line_of(n));
    }
    std::set<int> seen;
    for (int v : out) {
        if (!seen.insert(v).second) {
            throw ConfigError(field + " lists " + std::to_string(v) + " twice", line_of(n));
        }
    }
    return out;
}

/// Key nodes of a mapping, rejecting anything outside `allowed`.
std::map<std::string, YAML::Node> checked_map(const YAML::Node& n, const std::string& section,
                                              const std::set<std::string>& allowed) {
    if (!n.IsMap()) {
        throw ConfigError((section.empty() ? std::string("config") : section) + " must be a mapping", line_of(n));
    }
    std::map<std::string, YAML::Node> out;
    for (const auto& kv : n) {
        const std::string key = kv.first.Scalar();
        const std::string path = section.empty() ? key : section + "." + key;
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + path + "'", line_of(kv.first));
        }
        out.emplace(key, kv.second);
    }
    return out;
}

const YAML::Node& required(const std::map<std::string, YAML::Node>& m, const std::string& key,
                           const std::string& path, int section_line) {
    auto it = m.find(key);
    if (it == m.end()) {
        throw ConfigError("missing required field '" + path + "'", section_line);
    }
    return it->second;
}

ModelKind model_from_string(const std::string& s, int line) {
    if (s == "heisenberg") return ModelKind::Heisenberg;
    if (s == "hubbard") return ModelKind::Hubbard;
    throw ConfigError("model must be 'heisenberg' or 'hubbard', got '" + s + "'", line);
}

InitialStateKind initial_state_from_string(const std::string& s, int line) {
    if (s == "neel") return InitialStateKind::Neel;
    if (s == "noninteracting") return InitialStateKind::NonInteracting;
    throw ConfigError("initial_state must be 'neel' or 'noninteracting', got '" + s + "'", line);
}

AnsatzKind ansatz_from_string(const std::string& s, int line) {
    if (s == "heisenberg") return AnsatzKind::Heisenberg;
    if (s == "hva") return AnsatzKind::Hva;
    throw ConfigError("ansatz must be 'heisenberg' or 'hva', got '" + s + "'", line);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json step_to_json(const StepRecord& s) {
    return {{"step", s.step},
            {"param_count", s.param_count},
            {"initial_energy", s.initial_energy},
            {"final_energy", s.final_energy},
            {"fidelity", s.fidelity},
            {"cost_evals", s.cost_evals},
            {"grad_evals", s.grad_evals},
            {"status", to_string(s.status)},
            {"warning", s.warning}};
}

BfgsStatus status_from_string(const std::string& s) {
    for (auto st : {BfgsStatus::Converged, BfgsStatus::MaxIterations, BfgsStatus::LineSearchFailed}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw ConsistencyError("unknown optimizer status '" + s + "'");
}

StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord s;
    s.step = j.at("step").get<int>();
    s.param_count = j.at("param_count").get<std::size_t>();
    s.initial_energy = j.at("initial_energy").get<double>();
    s.final_energy = j.at("final_energy").get<double>();
    s.fidelity = j.at("fidelity").get<double>();
    s.cost_evals = j.at("cost_evals").get<int>();
    s.grad_evals = j.at("grad_evals").get<int>();
    s.status = status_from_string(j.at("status").get<std::string>());
    s.warning = j.at("warning").get<bool>();
    return s;
}

struct Cell {
    int layers;
    int slices;
};

/// Everything shared by the cells of one sweep.
struct Setup {
    PauliSum hamiltonian;
    GroundSpace oracle;
    StateVector init{1};
    std::optional<TermGroups> groups;
};

Setup build_setup(const ExperimentConfig& cfg) {
    Setup s;
    OracleOptions opts;
    if (cfg.model == ModelKind::Heisenberg) {
        s.hamiltonian = build_heisenberg(cfg.lattice, cfg.heisenberg);
        s.init = neel_state(cfg.lattice.site_count());
    } else {
        s.hamiltonian = build_hubbard(cfg.lattice, cfg.hubbard);
        s.groups = group_hubbard_terms(s.hamiltonian, cfg.lattice);
        s.init = noninteracting_ground_state(cfg.lattice, cfg.hubbard);
        opts.sector = Sector{{{spin_sector_mask(cfg.lattice, Spin::Up), cfg.hubbard.n_up},
                              {spin_sector_mask(cfg.lattice, Spin::Down), cfg.hubbard.n_down}}};
    }
    s.oracle = ground_space(s.hamiltonian, opts);
    return s;
}

AnsatzCircuit build_circuit(const ExperimentConfig& cfg, const Setup& s, int layers) {
    if (cfg.ansatz == AnsatzKind::Heisenberg) {
        return build_heisenberg_ansatz(cfg.lattice.site_count(), layers);
    }
    return build_hva(*s.groups, layers);
}

RunRecord blank_record(const ExperimentConfig& cfg, const std::string& hash, const nlohmann::json& echo, Cell c) {
    RunRecord r;
    r.config_hash = hash;
    r.model = to_string(cfg.model);
    r.lattice = cfg.lattice.label();
    r.layers = c.layers;
    r.slices = c.slices;
    r.arm = c.slices == 0 ? "baseline" : "quasi_dynamic";
    r.config = echo;
    return r;
}

void run_cell(const ExperimentConfig& cfg, const Setup& s, RunRecord& rec) {
    const auto start = std::chrono::steady_clock::now();
    try {
        rec.exact_energy = s.oracle.energy;
        const AnsatzCircuit circuit = build_circuit(cfg, s, rec.layers);
        VqeResult r;
        if (rec.slices == 0) {
            r = run_standard_vqe(s.hamiltonian, circuit, s.init, cfg.gtol, s.oracle, cfg.max_iterations);
        } else {
            Schedule schedule = make_schedule(circuit, rec.slices, cfg.gtol);
            schedule.max_iterations = cfg.max_iterations;
            r = run_quasi_dynamic(s.hamiltonian, circuit, schedule, s.init, s.oracle);
        }
        rec.energy = r.energy;
        rec.fidelity = r.fidelity;
        rec.trace = std::move(r.trace);
        rec.totals = count_report(rec.trace);
    } catch (const Error& e) {
        rec.error = e.what();
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string to_string(ModelKind m) {
    return m == ModelKind::Heisenberg ? "heisenberg" : "hubbard";
}

std::string to_string(InitialStateKind s) {
    return s == InitialStateKind::Neel ? "neel" : "noninteracting";
}

std::string to_string(AnsatzKind a) {
    return a == AnsatzKind::Heisenberg ? "heisenberg" : "hva";
}

int ExperimentConfig::qubit_count() const {
    return model == ModelKind::Hubbard ? 2 * lattice.site_count() : lattice.site_count();
}

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("malformed document: " + e.msg, e.mark.is_null() ? -1 : e.mark.line + 1);
    }
    if (!root.IsDefined() || root.IsNull()) {
        throw ConfigError("empty config");
    }
    const auto top = checked_map(root, "",
                                 {"model", "lattice", "couplings", "initial_state", "ansatz", "layers",
                                  "slices_per_layer", "gtol", "max_iterations", "output_dir"});
    const int root_line = std::max(1, line_of(root));

    ExperimentConfig cfg;
    const YAML::Node& model_node = required(top, "model", "model", root_line);
    cfg.model = model_from_string(read_scalar<std::string>(model_node, "model"), line_of(model_node));

    const YAML::Node& lat_node = required(top, "lattice", "lattice", root_line);
    const int lat_line = line_of(lat_node);
    const auto lat = checked_map(lat_node, "lattice", {"geometry", "sites", "rows", "cols"});
    const YAML::Node& geo_node = required(lat, "geometry", "lattice.geometry", lat_line);
    Geometry geometry;
    try {
        geometry = geometry_from_string(read_scalar<std::string>(geo_node, "lattice.geometry"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what(), line_of(geo_node));
    }
    int rows = 1;
    int cols = 0;
    if (geometry == Geometry::Rectangle) {
        if (lat.contains("sites")) {
            throw ConfigError("lattice.sites does not apply to rectangle lattices; use rows and cols",
                              line_of(lat.at("sites")));
        }
        rows = read_scalar<int>(required(lat, "rows", "lattice.rows", lat_line), "lattice.rows");
        cols = read_scalar<int>(required(lat, "cols", "lattice.cols", lat_line), "lattice.cols");
    } else {
        for (const char* k : {"rows", "cols"}) {
            if (lat.contains(k)) {
                throw ConfigError(std::string("lattice.") + k + " does not apply to " + to_string(geometry) +
                                      " lattices; use sites",
                                  line_of(lat.at(k)));
            }
        }
        cols = read_scalar<int>(required(lat, "sites", "lattice.sites", lat_line), "lattice.sites");
    }
    try {
        cfg.lattice = LatticeSpec(geometry, rows, cols);
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid lattice: ") + e.what(), lat_line);
    }

    if (cfg.model == ModelKind::Hubbard && geometry == Geometry::Kagome) {
        throw ConfigError("the hubbard model is not supported on kagome lattices", lat_line);
    }
    if (cfg.model == ModelKind::Heisenberg && geometry == Geometry::Rectangle) {
        throw ConfigError("the heisenberg model is supported on chain and kagome lattices only", lat_line);
    }

    cfg.hubbard = HubbardParams::half_filling(cfg.lattice);
    if (auto it = top.find("couplings"); it != top.end()) {
        if (cfg.model == ModelKind::Heisenberg) {
            const auto c = checked_map(it->second, "couplings", {"J"});
            if (c.contains("J")) cfg.heisenberg.J = read_scalar<double>(c.at("J"), "couplings.J");
        } else {
            const auto c = checked_map(it->second, "couplings", {"t", "U", "n_up", "n_down"});
            if (c.contains("t")) cfg.hubbard.t = read_scalar<double>(c.at("t"), "couplings.t");
            if (c.contains("U")) cfg.hubbard.U = read_scalar<double>(c.at("U"), "couplings.U");
            const int sites = cfg.lattice.site_count();
            for (auto [key, slot] : {std::pair{"n_up", &cfg.hubbard.n_up}, std::pair{"n_down", &cfg.hubbard.n_down}}) {
                if (!c.contains(key)) continue;
                const YAML::Node& n = c.at(key);
                *slot = read_scalar<int>(n, std::string("couplings.") + key);
                if (*slot < 0 || *slot > sites) {
                    throw ConfigError(std::string("couplings.") + key + " must lie in [0, " + std::to_string(sites) +
                                          "]",
                                      line_of(n));
                }
            }
        }
    }

    const InitialStateKind paired_state =
        cfg.model == ModelKind::Heisenberg ? InitialStateKind::Neel : InitialStateKind::NonInteracting;
    const AnsatzKind paired_ansatz = cfg.model == ModelKind::Heisenberg ? AnsatzKind::Heisenberg : AnsatzKind::Hva;
    cfg.initial_state = paired_state;
    cfg.ansatz = paired_ansatz;
    if (auto it = top.find("initial_state"); it != top.end()) {
        cfg.initial_state = initial_state_from_string(read_scalar<std::string>(it->second, "initial_state"),
                                                      line_of(it->second));
        if (cfg.initial_state != paired_state) {
            throw ConfigError("the " + to_string(cfg.model) + " model pairs with initial_state '" +
                                  to_string(paired_state) + "'",
                              line_of(it->second));
        }
    }
    if (auto it = top.find("ansatz"); it != top.end()) {
        cfg.ansatz = ansatz_from_string(read_scalar<std::string>(it->second, "ansatz"), line_of(it->second));
        if (cfg.ansatz != paired_ansatz) {
            throw ConfigError("the " + to_string(cfg.model) + " model pairs with ansatz '" + to_string(paired_ansatz) +
                                  "'",
                              line_of(it->second));
        }
    }

    const YAML::Node& layers_node = required(top, "layers", "layers", root_line);
    cfg.layers = read_int_list(layers_node, "layers");
    if (cfg.layers.empty()) {
        throw ConfigError("layers must not be empty", line_of(layers_node));
    }
    if (std::any_of(cfg.layers.begin(), cfg.layers.end(), [](int l) { return l < 1; })) {
        throw ConfigError("layers must be positive", line_of(layers_node));
    }
    if (auto it = top.find("slices_per_layer"); it != top.end()) {
        cfg.slices_per_layer = read_int_list(it->second, "slices_per_layer");
        if (cfg.slices_per_layer.empty()) {
            throw ConfigError("slices_per_layer must not be empty", line_of(it->second));
        }
        if (std::any_of(cfg.slices_per_layer.begin(), cfg.slices_per_layer.end(), [](int s) { return s < 0; })) {
            throw ConfigError("slices_per_layer must be non-negative", line_of(it->second));
        }
    }
    if (auto it = top.find("gtol"); it != top.end()) {
        cfg.gtol = read_scalar<double>(it->second, "gtol");
        if (!(cfg.gtol > 0.0)) {
            throw ConfigError("gtol must be positive", line_of(it->second));
        }
    }
    if (auto it = top.find("max_iterations"); it != top.end()) {
        cfg.max_iterations = read_scalar<int>(it->second, "max_iterations");
        if (cfg.max_iterations < 1) {
            throw ConfigError("max_iterations must be at least 1", line_of(it->second));
        }
    }
    if (auto it = top.find("output_dir"); it != top.end()) {
        cfg.output_dir = read_scalar<std::string>(it->second, "output_dir");
    } else {
        cfg.output_dir = "results/" + to_string(cfg.model) + "_" + cfg.lattice.label();
    }
    if (cfg.qubit_count() > kMaxStateQubits) {
        throw ConfigError("the model needs " + std::to_string(cfg.qubit_count()) + " qubits; at most " +
                              std::to_string(kMaxStateQubits) + " are supported",
                          lat_line);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "model" << YAML::Value << to_string(cfg.model);
    out << YAML::Key << "lattice" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "geometry" << YAML::Value << to_string(cfg.lattice.geometry());
    if (cfg.lattice.geometry() == Geometry::Rectangle) {
        out << YAML::Key << "rows" << YAML::Value << cfg.lattice.rows();
        out << YAML::Key << "cols" << YAML::Value << cfg.lattice.cols();
    } else {
        out << YAML::Key << "sites" << YAML::Value << cfg.lattice.site_count();
    }
    out << YAML::EndMap;
    out << YAML::Key << "couplings" << YAML::Value << YAML::BeginMap;
    if (cfg.model == ModelKind::Heisenberg) {
        out << YAML::Key << "J" << YAML::Value << cfg.heisenberg.J;
    } else {
        out << YAML::Key << "t" << YAML::Value << cfg.hubbard.t;
        out << YAML::Key << "U" << YAML::Value << cfg.hubbard.U;
        out << YAML::Key << "n_up" << YAML::Value << cfg.hubbard.n_up;
        out << YAML::Key << "n_down" << YAML::Value << cfg.hubbard.n_down;
    }
    out << YAML::EndMap;
    out << YAML::Key << "initial_state" << YAML::Value << to_string(cfg.initial_state);
    out << YAML::Key << "ansatz" << YAML::Value << to_string(cfg.ansatz);
    out << YAML::Key << "layers" << YAML::Value << YAML::Flow << cfg.layers;
    out << YAML::Key << "slices_per_layer" << YAML::Value << YAML::Flow << cfg.slices_per_layer;
    out << YAML::Key << "gtol" << YAML::Value << cfg.gtol;
    out << YAML::Key << "max_iterations" << YAML::Value << cfg.max_iterations;
    out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << cfg.output_dir;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json lattice = {{"geometry", to_string(cfg.lattice.geometry())}};
    if (cfg.lattice.geometry() == Geometry::Rectangle) {
        lattice["rows"] = cfg.lattice.rows();
        lattice["cols"] = cfg.lattice.cols();
    } else {
        lattice["sites"] = cfg.lattice.site_count();
    }
    nlohmann::json couplings;
    if (cfg.model == ModelKind::Heisenberg) {
        couplings = {{"J", cfg.heisenberg.J}};
    } else {
        couplings = {{"t", cfg.hubbard.t}, {"U", cfg.hubbard.U}, {"n_up", cfg.hubbard.n_up},
                     {"n_down", cfg.hubbard.n_down}};
    }
    return {{"model", to_string(cfg.model)},
            {"lattice", lattice},
            {"couplings", couplings},
            {"initial_state", to_string(cfg.initial_state)},
            {"ansatz", to_string(cfg.ansatz)},
            {"layers", cfg.layers},
            {"slices_per_layer", cfg.slices_per_layer},
            {"gtol", cfg.gtol},
            {"max_iterations", cfg.max_iterations},
            {"output_dir", cfg.output_dir}};
}

std::string config_hash(const ExperimentConfig& cfg) {
    nlohmann::json j = config_to_json(cfg);
    j.erase("output_dir");
    // FNV-1a over the canonical JSON text.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

std::string cell_id(int layers, int slices) {
    return "L" + std::to_string(layers) + "-S" + std::to_string(slices);
}

std::string RunRecord::cell_id() const {
    return qdvqe::cell_id(layers, slices);
}

nlohmann::json record_to_json(const RunRecord& r) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.trace.steps) {
        steps.push_back(step_to_json(s));
    }
    return {{"cell", r.cell_id()},
            {"config_hash", r.config_hash},
            {"model", r.model},
            {"lattice", r.lattice},
            {"layers", r.layers},
            {"slices", r.slices},
            {"slices_convention", kSlicesConvention},
            {"arm", r.arm},
            {"exact_energy", r.exact_energy},
            {"energy", r.energy},
            {"fidelity", r.fidelity},
            {"steps", steps},
            {"final", step_to_json(r.trace.final)},
            {"totals", {{"cost_evals", r.totals.cost_evals}, {"grad_evals", r.totals.grad_evals}}},
            {"wall_time_s", r.wall_time_s},
            {"error", r.error},
            {"config", r.config}};
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.lattice = j.at("lattice").get<std::string>();
    r.layers = j.at("layers").get<int>();
    r.slices = j.at("slices").get<int>();
    r.arm = j.at("arm").get<std::string>();
    r.exact_energy = j.at("exact_energy").get<double>();
    r.energy = j.at("energy").get<double>();
    r.fidelity = j.at("fidelity").get<double>();
    for (const auto& s : j.at("steps")) {
        r.trace.steps.push_back(step_from_json(s));
    }
    r.trace.final = step_from_json(j.at("final"));
    r.totals.cost_evals = j.at("totals").at("cost_evals").get<long>();
    r.totals.grad_evals = j.at("totals").at("grad_evals").get<long>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.error = j.at("error").get<std::string>();
    r.config = j.at("config");
    return r;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"model",    "lattice",  "layers",     "slices",     "arm",
                                               "step",     "energy",   "fidelity",   "cost_evals", "grad_evals",
                                               "wall_time_s"};
    return cols;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) {
        out += (out.empty() ? "" : ",") + c;
    }
    return out + "\n";
}

std::string csv_rows(const RunRecord& r) {
    if (!r.ok()) {
        return {};
    }
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.6f", r.wall_time_s);
    const std::string prefix =
        r.model + "," + r.lattice + "," + std::to_string(r.layers) + "," + std::to_string(r.slices) + "," + r.arm + ",";
    auto row = [&](const std::string& step, const StepRecord& s) {
        return prefix + step + "," + format_double(s.final_energy) + "," + format_double(s.fidelity) + "," +
               std::to_string(s.cost_evals) + "," + std::to_string(s.grad_evals) + "," + wall + "\n";
    };
    std::string out;
    for (const auto& s : r.trace.steps) {
        out += row(std::to_string(s.step), s);
    }
    out += row("final", r.trace.final);
    return out;
}

std::string to_csv(const std::vector<RunRecord>& records) {
    std::string out = csv_header();
    for (const auto& r : records) {
        out += csv_rows(r);
    }
    return out;
}

int ExperimentResult::failed_cells() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return !r.ok(); }));
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << content;
        if (!out.flush()) {
            throw Error("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    std::vector<Cell> cells;
    for (int l : cfg.layers) {
        for (int s : cfg.slices_per_layer) {
            cells.push_back({l, s});
        }
    }
    if (!options.cells.empty()) {
        std::vector<Cell> selected;
        for (const auto& id : options.cells) {
            auto it = std::find_if(cells.begin(), cells.end(),
                                   [&](const Cell& c) { return cell_id(c.layers, c.slices) == id; });
            if (it == cells.end()) {
                throw ConfigError("cell '" + id + "' is not part of the sweep");
            }
            selected.push_back(*it);
        }
        cells = std::move(selected);
    }

    ExperimentResult result;
    result.output_dir = options.output_dir.empty() ? std::filesystem::path(cfg.output_dir)
                                                   : std::filesystem::path(options.output_dir);
    const std::string hash = config_hash(cfg);
    const nlohmann::json echo = config_to_json(cfg);
    for (const auto& c : cells) {
        result.records.push_back(blank_record(cfg, hash, echo, c));
    }

    std::optional<Setup> setup;
    std::string setup_error;
    try {
        setup = build_setup(cfg);
    } catch (const Error& e) {
        setup_error = std::string("setup failed: ") + e.what();
    }

    auto finish_cell = [&](RunRecord& rec) {
        if (options.write_files) {
            write_atomically(result.output_dir / "cells" / (rec.cell_id() + ".json"), record_to_json(rec).dump(2) + "\n");
        }
    };

    if (!setup) {
        for (auto& rec : result.records) {
            rec.error = setup_error;
            finish_cell(rec);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < result.records.size(); i = next++) {
                run_cell(cfg, *setup, result.records[i]);
                finish_cell(result.records[i]);
            }
        };
        const int n_workers = std::clamp(options.workers, 1, std::max(1, static_cast<int>(cells.size())));
        std::vector<std::thread> pool;
        for (int w = 1; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
        for (auto& t : pool) {
            t.join();
        }
    }

    if (options.write_files) {
        write_atomically(result.output_dir / "results.csv", to_csv(result.records));
        nlohmann::json cell_status = nlohmann::json::array();
        for (const auto& r : result.records) {
            cell_status.push_back({{"cell", r.cell_id()}, {"arm", r.arm}, {"ok", r.ok()}, {"error", r.error}});
        }
        nlohmann::json summary = {{"config", echo},
                                  {"config_hash", hash},
                                  {"qubits", cfg.qubit_count()},
                                  {"slices_convention", kSlicesConvention},
                                  {"cells", cell_status}};
        if (setup) {
            summary["exact_energy"] = setup->oracle.energy;
            summary["ground_multiplicity"] = setup->oracle.multiplicity();
            summary["hamiltonian_terms"] = setup->hamiltonian.size();
            if (cfg.model == ModelKind::Hubbard) {
                summary["mode_ordering"] =
                    "spin-up modes 0..S-1 then spin-down modes S..2S-1, each along the same boustrophedon path";
                summary["oracle_sector"] = {{"n_up", cfg.hubbard.n_up}, {"n_down", cfg.hubbard.n_down}};
            }
            write_atomically(result.output_dir / "hamiltonian.txt", setup->hamiltonian.to_text());
        } else {
            summary["setup_error"] = setup_error;
        }
        write_atomically(result.output_dir / "config.yaml", serialize_config(cfg));
        write_atomically(result.output_dir / "summary.json", summary.dump(2) + "\n");
    }
    return result;
}

std::vector<RunRecord> load_records(const std::filesystem::path& dir) {
    std::filesystem::path cells = dir / "cells";
    if (!std::filesystem::is_directory(cells)) {
        cells = dir;
    }
    if (!std::filesystem::is_directory(cells)) {
        throw Error("records directory " + dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(cells)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
            if (!j.contains("cell")) {
                continue;  // not a cell record (e.g. summary.json)
            }
            out.push_back(record_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw Error("cannot read record " + f.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace qdvqe
