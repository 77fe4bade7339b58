// Command-line front end: run experiment grids, generate synthetic streams,
// list detectors, and pretty-print reports.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "odstream/config.hpp"
#include "odstream/eval.hpp"
#include "odstream/ingest.hpp"
#include "odstream/record.hpp"
#include "odstream/windows.hpp"

namespace {

using namespace odstream;

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

std::string valid_kinds_text() {
    std::string text;
    for (auto kind : kAllDetectorKinds) {
        if (!text.empty()) text += ", ";
        text += to_string(kind);
    }
    return text;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ODSTREAM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring unparseable ODSTREAM_SEED='" << env
                      << "'\n";
        }
    }
    return 42;
}

struct RunSettings {
    std::vector<std::string> data_paths;
    std::string label_col = "label";
    std::vector<std::string> label_map_entries;
    std::vector<std::string> drop_columns;
    std::string detectors_text = "all";
    std::string scenarios_text = "1,2";
    std::string seeds_text;
    std::size_t window = 256;
    std::size_t stride = 128;
    double train_fraction = 0.7;
    std::string split_mode = "prefix";
    bool update_on_test = false;
    std::string out_path = "report.csv";
    std::string format = "csv";
    int jobs = 0;
    std::string config_path;
    DetectorConfig detector_cfg;
};

void add_detector_config_options(CLI::App& app, DetectorConfig& cfg) {
    app.add_option("--storm.radius", cfg.storm_radius,
                   "Neighborhood radius R (0 = auto-calibrate)");
    app.add_option("--storm.k", cfg.storm_k, "Neighbor threshold k");
    app.add_option("--storm.window", cfg.storm_window,
                   "Internal window size (0 = first fit window)");
    app.add_option("--lof.k", cfg.lof_k, "Neighborhood size");
    app.add_option("--cad.k", cfg.cad_k, "k for the summed k-NN distance");
    app.add_option("--iforest.trees", cfg.iforest_trees, "Trees per forest");
    app.add_option("--iforest.psi", cfg.iforest_psi, "Subsample cap per tree");
    app.add_option("--iforest.threshold_u", cfg.iforest_threshold_u,
                   "Anomaly-rate retrain threshold");
    app.add_option("--ocsvm.nu", cfg.ocsvm_nu, "Outlier-fraction bound");
    app.add_option("--ocsvm.lr", cfg.ocsvm_lr, "Initial learning rate");
    app.add_option("--ocsvm.epochs", cfg.ocsvm_epochs, "SGD epochs per window");
    app.add_option("--kitnet.m_max", cfg.kitnet_m_max, "Max features per group");
    app.add_option("--kitnet.beta", cfg.kitnet_beta, "Hidden-layer ratio");
    app.add_option("--kitnet.lr", cfg.kitnet_lr, "Autoencoder learning rate");
}

std::vector<DetectorKind> parse_detectors(const std::string& text) {
    if (text == "all") {
        return {std::begin(kAllDetectorKinds), std::end(kAllDetectorKinds)};
    }
    std::vector<DetectorKind> kinds;
    for (const auto& name : split_commas(text)) kinds.push_back(detector_kind_from_string(name));
    if (kinds.empty()) throw std::invalid_argument("no detectors selected");
    return kinds;
}

std::vector<ScenarioKind> parse_scenarios(const std::string& text) {
    std::vector<ScenarioKind> scenarios;
    for (const auto& part : split_commas(text)) {
        if (part == "1") scenarios.push_back(ScenarioKind::offline);
        else if (part == "2") scenarios.push_back(ScenarioKind::incremental);
        else throw std::invalid_argument("scenario must be 1 or 2, got '" + part + "'");
    }
    if (scenarios.empty()) throw std::invalid_argument("no scenarios selected");
    return scenarios;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    if (text.empty()) return {default_seed()};
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split_commas(text)) seeds.push_back(std::stoull(part));
    return seeds;
}

SplitMode parse_split_mode(const std::string& text) {
    if (text == "prefix") return SplitMode::stream_prefix;
    if (text == "random") return SplitMode::random;
    if (text == "stratified") return SplitMode::stratified;
    throw std::invalid_argument("split mode must be prefix, random or stratified");
}

LoadOptions load_options_from(const RunSettings& rs) {
    LoadOptions opts;
    opts.drop_columns = rs.drop_columns;
    for (const auto& entry : rs.label_map_entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("label map entry must look like TEXT=0 or TEXT=1");
        }
        const std::string value = entry.substr(eq + 1);
        if (value != "0" && value != "1") {
            throw std::invalid_argument("label map target must be 0 or 1");
        }
        opts.label_map.emplace_back(entry.substr(0, eq), value == "1" ? 1 : 0);
    }
    return opts;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

template <typename T>
T config_number(const std::string& key, const std::string& text) {
    if (std::is_unsigned_v<T> && text.find('-') != std::string::npos) {
        throw std::invalid_argument("config: negative value '" + text +
                                    "' for key '" + key + "'");
    }
    std::istringstream in(text);
    T value{};
    in >> value;
    if (!in || !(in >> std::ws).eof()) {
        throw std::invalid_argument("config: bad value '" + text + "' for key '" +
                                    key + "'");
    }
    return value;
}

bool config_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "on") return true;
    if (text == "0" || text == "false" || text == "off") return false;
    throw std::invalid_argument("config: bad boolean '" + text + "' for key '" +
                                key + "'");
}

// Applies KEY=VALUE lines from rs.config_path. Keys mirror the run command's
// long option names without the leading dashes. A key is skipped when the
// matching option was given explicitly, so command-line flags always win.
void apply_config_file(const CLI::App& run, RunSettings& rs) {
    std::ifstream in(rs.config_path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + rs.config_path + "'");
    }

    using Apply = std::function<void(const std::string&, const std::string&)>;
    std::map<std::string, Apply> keys;
    auto text_slot = [](std::string& slot) -> Apply {
        return [&slot](const std::string&, const std::string& value) { slot = value; };
    };
    auto list_slot = [](std::vector<std::string>& slot) -> Apply {
        return [&slot](const std::string&, const std::string& value) {
            slot.push_back(value);
        };
    };
    auto size_slot = [](std::size_t& slot) -> Apply {
        return [&slot](const std::string& key, const std::string& value) {
            slot = config_number<std::size_t>(key, value);
        };
    };
    auto int_slot = [](int& slot) -> Apply {
        return [&slot](const std::string& key, const std::string& value) {
            slot = config_number<int>(key, value);
        };
    };
    auto double_slot = [](double& slot) -> Apply {
        return [&slot](const std::string& key, const std::string& value) {
            slot = config_number<double>(key, value);
        };
    };
    auto bool_slot = [](bool& slot) -> Apply {
        return [&slot](const std::string& key, const std::string& value) {
            slot = config_bool(key, value);
        };
    };

    keys["data"] = list_slot(rs.data_paths);
    keys["label-col"] = text_slot(rs.label_col);
    keys["label-map"] = list_slot(rs.label_map_entries);
    keys["drop"] = list_slot(rs.drop_columns);
    keys["detectors"] = text_slot(rs.detectors_text);
    keys["scenarios"] = text_slot(rs.scenarios_text);
    keys["seeds"] = text_slot(rs.seeds_text);
    keys["window"] = size_slot(rs.window);
    keys["stride"] = size_slot(rs.stride);
    keys["train-fraction"] = double_slot(rs.train_fraction);
    keys["split"] = text_slot(rs.split_mode);
    keys["update-on-test"] = bool_slot(rs.update_on_test);
    keys["out"] = text_slot(rs.out_path);
    keys["format"] = text_slot(rs.format);
    keys["jobs"] = int_slot(rs.jobs);
    auto& cfg = rs.detector_cfg;
    keys["storm.radius"] = double_slot(cfg.storm_radius);
    keys["storm.k"] = int_slot(cfg.storm_k);
    keys["storm.window"] = int_slot(cfg.storm_window);
    keys["lof.k"] = int_slot(cfg.lof_k);
    keys["cad.k"] = int_slot(cfg.cad_k);
    keys["iforest.trees"] = int_slot(cfg.iforest_trees);
    keys["iforest.psi"] = int_slot(cfg.iforest_psi);
    keys["iforest.threshold_u"] = double_slot(cfg.iforest_threshold_u);
    keys["ocsvm.nu"] = double_slot(cfg.ocsvm_nu);
    keys["ocsvm.lr"] = double_slot(cfg.ocsvm_lr);
    keys["ocsvm.epochs"] = int_slot(cfg.ocsvm_epochs);
    keys["kitnet.m_max"] = int_slot(cfg.kitnet_m_max);
    keys["kitnet.beta"] = double_slot(cfg.kitnet_beta);
    keys["kitnet.lr"] = double_slot(cfg.kitnet_lr);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected KEY=VALUE, got '" + text + "'");
        }
        const std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
        if (run.count("--" + key) > 0) continue;
        it->second(key, value);
    }
}

int cmd_run(const RunSettings& rs) {
    const auto kinds = parse_detectors(rs.detectors_text);
    const auto scenarios = parse_scenarios(rs.scenarios_text);
    const auto seeds = parse_seeds(rs.seeds_text);
    const WindowConfig wcfg{rs.window, rs.stride};
    wcfg.validate();
    ScenarioOptions opts;
    opts.train_fraction = rs.train_fraction;
    opts.split_mode = parse_split_mode(rs.split_mode);
    opts.update_on_test = rs.update_on_test;
    if (rs.data_paths.empty()) {
        throw std::invalid_argument("no datasets: pass --data at least once");
    }
    if (rs.format != "csv" && rs.format != "jsonl") {
        throw std::invalid_argument("format must be csv or jsonl");
    }

    std::vector<Dataset> datasets;
    const LoadOptions load_opts = load_options_from(rs);
    for (const auto& path : rs.data_paths) {
        std::cerr << "loading " << path << "...\n";
        datasets.push_back(load_csv(path, rs.label_col, load_opts));
        const auto& ds = datasets.back();
        std::cerr << "  " << ds.name << ": " << ds.meta.n_points << " records, "
                  << ds.meta.n_features << " features, " << ds.meta.neg_pct << ":"
                  << ds.meta.pos_pct << " class split";
        if (ds.meta.dropped_rows > 0) {
            std::cerr << " (" << ds.meta.dropped_rows << " rows dropped)";
        }
        std::cerr << "\n";
    }

    struct Cell {
        const Dataset* dataset;
        DetectorKind kind;
        ScenarioKind scenario;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& ds : datasets) {
        for (auto kind : kinds) {
            for (auto scenario : scenarios) {
                for (auto seed : seeds) cells.push_back({&ds, kind, scenario, seed});
            }
        }
    }

    int jobs = rs.jobs;
#ifdef _OPENMP
    if (jobs <= 0) jobs = omp_get_num_procs();
#else
    if (jobs <= 0) jobs = 1;
#endif

    std::vector<std::optional<EvalRow>> results(cells.size());
    std::vector<std::string> failures(cells.size());
    const auto total = static_cast<std::ptrdiff_t>(cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        const auto& cell = cells[static_cast<std::size_t>(i)];
        const std::string label = cell.dataset->name + " " + to_string(cell.kind) +
                                  " scenario=" +
                                  std::to_string(static_cast<int>(cell.scenario)) +
                                  " seed=" + std::to_string(cell.seed);
#ifdef _OPENMP
#pragma omp critical(odstream_progress)
#endif
        std::cerr << "[" << (i + 1) << "/" << total << "] " << label << "\n";
        try {
            results[static_cast<std::size_t>(i)] =
                run_scenario(cell.scenario, cell.kind, *cell.dataset,
                             rs.detector_cfg, wcfg, cell.seed, opts);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = label + ": " + e.what();
        }
    }

    EvalReport report;
    for (const auto& row : results) {
        if (row) report.push_back(*row);
    }
    sort_report(report);
    for (const auto& row : report) {
        std::ostringstream line;
        line << row.dataset << " " << to_string(row.detector)
             << " scenario=" << static_cast<int>(row.scenario) << " seed=" << row.seed
             << " auc=";
        if (row.auc) line << *row.auc;
        else line << "undefined";
        line << " (" << row.wall_ms << " ms)";
        std::cout << line.str() << "\n";
    }

    bool failed = false;
    for (const auto& failure : failures) {
        if (!failure.empty()) {
            std::cerr << "FAILED " << failure << "\n";
            failed = true;
        }
    }
    if (!report.empty()) {
        if (rs.format == "csv") write_report_csv(report, rs.out_path);
        else write_report_jsonl(report, rs.out_path);
        std::cerr << "wrote " << report.size() << " rows to " << rs.out_path << "\n";
    } else {
        std::cerr << "no successful grid cells, nothing written\n";
        failed = true;
    }
    return failed ? 1 : 0;
}

struct GenSettings {
    std::size_t n = 1000;
    std::size_t d = 8;
    double contamination = 0.05;
    bool drift = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_path = "synthetic.csv";
};

int cmd_gen(const GenSettings& gs) {
    const std::uint64_t seed = gs.seed_set ? gs.seed : default_seed();
    const Dataset ds = gen_synthetic(gs.n, gs.d, gs.contamination, gs.drift, seed);
    write_csv(ds, gs.out_path);
    std::size_t outliers = 0;
    for (const auto& rec : ds.records) {
        if (rec.label && *rec.label == 1) ++outliers;
    }
    std::cout << "wrote " << ds.records.size() << " records (" << outliers
              << " outliers, d=" << gs.d << ", drift="
              << (gs.drift ? "on" : "off") << ", seed=" << seed << ") to "
              << gs.out_path << "\n";
    return 0;
}

int cmd_list() {
    std::cout << "detectors (config keys and defaults):\n";
    std::cout << "  ocsvm        ocsvm.nu=0.1 ocsvm.lr=0.01 ocsvm.epochs=3\n";
    std::cout << "  iforest-asd  iforest.trees=100 iforest.psi=256 "
                 "iforest.threshold_u=0.05\n";
    std::cout << "  lof          lof.k=10\n";
    std::cout << "  abod         (no config keys; exact all-pairs form)\n";
    std::cout << "  exact-storm  storm.radius=0 (auto) storm.k=5 storm.window=0 "
                 "(auto)\n";
    std::cout << "  kitnet       kitnet.m_max=10 kitnet.beta=0.75 kitnet.lr=0.1\n";
    std::cout << "  knn-cad      cad.k=5 (alias: knn-asd)\n";
    return 0;
}

int cmd_report(const std::string& in_path) {
    const EvalReport report = read_report_csv(in_path);
    if (report.empty()) {
        std::cerr << "empty report\n";
        return 1;
    }

    // dataset -> scenario -> detector -> mean AUC over seeds with defined AUC.
    struct CellAgg {
        double sum = 0.0;
        std::size_t defined = 0;
        std::size_t rows = 0;
    };
    std::map<std::string, std::map<int, std::map<DetectorKind, CellAgg>>> grid;
    std::size_t max_seeds = 1;
    for (const auto& row : report) {
        auto& cell = grid[row.dataset][static_cast<int>(row.scenario)][row.detector];
        cell.rows += 1;
        max_seeds = std::max(max_seeds, cell.rows);
        if (row.auc) {
            cell.sum += *row.auc;
            cell.defined += 1;
        }
    }

    std::size_t name_width = std::string("dataset").size();
    for (const auto& [name, _] : grid) name_width = std::max(name_width, name.size());

    std::cout << "dataset" << std::string(name_width - 7, ' ') << "  sc";
    for (auto kind : kAllDetectorKinds) std::cout << "  " << to_string(kind);
    std::cout << "\n";
    for (const auto& [name, scenarios] : grid) {
        for (const auto& [scenario, row] : scenarios) {
            std::cout << name << std::string(name_width - name.size(), ' ') << "  "
                      << scenario << " ";
            for (auto kind : kAllDetectorKinds) {
                const std::size_t width = to_string(kind).size();
                std::string cell = "-";
                auto it = row.find(kind);
                if (it != row.end()) {
                    if (it->second.defined > 0) {
                        char buf[16];
                        std::snprintf(buf, sizeof(buf), "%.3f",
                                      it->second.sum /
                                          static_cast<double>(it->second.defined));
                        cell = buf;
                    } else {
                        cell = "undef";
                    }
                }
                std::cout << "  " << cell
                          << std::string(width > cell.size() ? width - cell.size() : 0,
                                         ' ');
            }
            std::cout << "\n";
        }
    }
    if (max_seeds > 1) {
        std::cout << "(cells averaged over up to " << max_seeds << " seeds)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming outlier detection: seven online detectors, "
                 "sliding-window incremental training, AUC evaluation"};
    app.require_subcommand(1);

    RunSettings rs;
    auto* run = app.add_subcommand(
        "run", "Run a (dataset x detector x scenario x seed) experiment grid");
    run->add_option("--data", rs.data_paths, "Dataset CSV path (repeatable)");
    run->add_option("--label-col", rs.label_col, "Label column name");
    run->add_option("--label-map", rs.label_map_entries,
                    "Label text mapping TEXT=0|1 (repeatable)");
    run->add_option("--drop", rs.drop_columns, "Column to drop (repeatable)");
    run->add_option("--detectors", rs.detectors_text,
                    "Comma list of detectors, or 'all' (" + valid_kinds_text() + ")");
    run->add_option("--scenarios", rs.scenarios_text, "Comma list from {1,2}");
    run->add_option("--seeds", rs.seeds_text,
                    "Comma list of seeds (default: ODSTREAM_SEED or 42)");
    run->add_option("--window", rs.window, "Sliding window length W");
    run->add_option("--stride", rs.stride, "Sliding window stride S");
    run->add_option("--train-fraction", rs.train_fraction, "Training share in (0,1)");
    run->add_option("--split", rs.split_mode, "prefix | random | stratified");
    run->add_flag("--update-on-test", rs.update_on_test,
                  "Keep learning (learn_one) while scoring the test stream");
    run->add_option("--out", rs.out_path, "Report output path");
    run->add_option("--format", rs.format, "csv | jsonl");
    run->add_option("--jobs", rs.jobs, "Parallel grid cells (default: cores)");
    add_detector_config_options(*run, rs.detector_cfg);
    run->add_option("--config", rs.config_path,
                    "Config file of KEY=VALUE lines (keys = option names without "
                    "dashes); explicit flags override file values");

    GenSettings gs;
    auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic stream CSV");
    gen->add_option("--n", gs.n, "Number of records");
    gen->add_option("--d", gs.d, "Feature dimension");
    gen->add_option("--contamination", gs.contamination, "Outlier fraction in (0,0.5)");
    gen->add_flag("--drift", gs.drift, "Drift the population mean over the stream");
    gen->add_option("--seed", gs.seed, "RNG seed (default: ODSTREAM_SEED or 42)")
        ->each([&gs](const std::string&) { gs.seed_set = true; });
    gen->add_option("--out", gs.out_path, "Output CSV path");

    app.add_subcommand("list", "List detector kinds with config keys and defaults");

    std::string report_in = "report.csv";
    auto* report = app.add_subcommand("report", "Pretty-print a report CSV");
    report->add_option("--in", report_in, "Report CSV path");

    if (argc < 2) {
        std::cerr << app.help();
        return 1;
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!rs.config_path.empty()) apply_config_file(*run, rs);
            return cmd_run(rs);
        }
        if (gen->parsed()) return cmd_gen(gs);
        if (app.get_subcommand("list")->parsed()) return cmd_list();
        if (report->parsed()) return cmd_report(report_in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 1;
}
