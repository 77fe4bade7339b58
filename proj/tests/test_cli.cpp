// Integration tests driving the installed CLI binary end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odstream/eval.hpp"
#include "odstream/ingest.hpp"

using namespace odstream;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& suffix) {
        static int counter = 0;
        path = "cli_tmp_" + std::to_string(counter++) + suffix;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

CliResult run_cli(const std::string& args) {
    TempFile out(".out"), err(".err");
    const std::string cmd = std::string(ODSTREAM_CLI_PATH) + " " + args + " > " +
                            out.path + " 2> " + err.path;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out.path);
    r.err = slurp(err.path);
    return r;
}

}  // namespace

TEST_CASE("cli: no arguments prints usage and fails") {
    TempFile out(".out"), err(".err");
    const std::string cmd =
        std::string(ODSTREAM_CLI_PATH) + " > " + out.path + " 2> " + err.path;
    const int status = std::system(cmd.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) != 0);
    CHECK(slurp(err.path).find("Usage") != std::string::npos);
}

TEST_CASE("cli: list names every detector") {
    const auto r = run_cli("list");
    CHECK(r.exit_code == 0);
    for (const char* name :
         {"ocsvm", "iforest-asd", "lof", "abod", "exact-storm", "kitnet", "knn-cad"}) {
        CAPTURE(name);
        CHECK(r.out.find(name) != std::string::npos);
    }
}

TEST_CASE("cli: gen is deterministic and honors the requested counts") {
    TempFile a(".csv"), b(".csv");
    const auto ra = run_cli("gen --n 500 --d 4 --contamination 0.1 --seed 7 --out " + a.path);
    const auto rb = run_cli("gen --n 500 --d 4 --contamination 0.1 --seed 7 --out " + b.path);
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    CHECK(slurp(a.path) == slurp(b.path));

    const Dataset ds = load_csv(a.path, "label");
    CHECK(ds.records.size() == 500);
    CHECK(ds.meta.n_features == 4);
    std::size_t outliers = 0;
    for (const auto& rec : ds.records) {
        if (rec.label == 1) ++outliers;
    }
    CHECK(outliers == 50);

    TempFile c(".csv");
    const auto rc = run_cli("gen --n 500 --d 4 --contamination 0.1 --seed 8 --out " + c.path);
    REQUIRE(rc.exit_code == 0);
    CHECK(slurp(a.path) != slurp(c.path));
}

TEST_CASE("cli: run produces a sorted grid report") {
    TempFile data(".csv"), report(".csv");
    REQUIRE(run_cli("gen --n 600 --d 4 --contamination 0.1 --seed 11 --out " +
                    data.path).exit_code == 0);
    const auto r = run_cli("run --data " + data.path +
                           " --detectors ocsvm,lof --scenarios 1,2 --seeds 42"
                           " --window 100 --stride 50 --out " + report.path);
    REQUIRE(r.exit_code == 0);

    const EvalReport rows = read_report_csv(report.path);
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        CHECK(row.seed == 42);
        REQUIRE(row.auc.has_value());
        CHECK(*row.auc >= 0.0);
        CHECK(*row.auc <= 1.0);
    }
    // enum order puts ocsvm rows first, scenarios ascend within a detector
    CHECK(rows[0].detector == DetectorKind::ocsvm);
    CHECK(rows[0].scenario == ScenarioKind::offline);
    CHECK(rows[1].detector == DetectorKind::ocsvm);
    CHECK(rows[1].scenario == ScenarioKind::incremental);
    CHECK(rows[2].detector == DetectorKind::lof);
    CHECK(rows[3].detector == DetectorKind::lof);
    // scenario 1 collapses to one degenerate window over the training prefix
    CHECK(rows[0].window == rows[0].n_train);
    CHECK(rows[0].stride == rows[0].n_train);
    CHECK(rows[1].window == 100);
    CHECK(rows[1].stride == 50);
}

TEST_CASE("cli: unknown detector names fail loudly") {
    TempFile data(".csv");
    REQUIRE(run_cli("gen --n 200 --d 3 --seed 1 --out " + data.path).exit_code == 0);
    const auto r = run_cli("run --data " + data.path + " --detectors warp-drive");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("warp-drive") != std::string::npos);
    CHECK(r.err.find("knn-cad") != std::string::npos);  // lists the valid kinds
}

TEST_CASE("cli: knn-asd alias selects knn-cad") {
    TempFile data(".csv"), report(".csv");
    REQUIRE(run_cli("gen --n 400 --d 3 --seed 3 --out " + data.path).exit_code == 0);
    const auto r = run_cli("run --data " + data.path +
                           " --detectors knn-asd --scenarios 1 --seeds 42 --out " +
                           report.path);
    REQUIRE(r.exit_code == 0);
    const EvalReport rows = read_report_csv(report.path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].detector == DetectorKind::knn_cad);
}

TEST_CASE("cli: config file and flags set the same digest") {
    TempFile data(".csv"), rep_flag(".csv"), rep_cfg(".csv"), rep_def(".csv");
    TempFile cfg(".cfg");
    REQUIRE(run_cli("gen --n 400 --d 3 --seed 5 --out " + data.path).exit_code == 0);

    {
        std::ofstream out(cfg.path);
        out << "lof.k=7\n";
    }
    const std::string base = "run --data " + data.path +
                             " --detectors lof --scenarios 1 --seeds 42 --out ";
    REQUIRE(run_cli(base + rep_flag.path + " --lof.k 7").exit_code == 0);
    REQUIRE(run_cli(base + rep_cfg.path + " --config " + cfg.path).exit_code == 0);
    REQUIRE(run_cli(base + rep_def.path).exit_code == 0);

    const auto flag_rows = read_report_csv(rep_flag.path);
    const auto cfg_rows = read_report_csv(rep_cfg.path);
    const auto def_rows = read_report_csv(rep_def.path);
    REQUIRE(flag_rows.size() == 1);
    REQUIRE(cfg_rows.size() == 1);
    REQUIRE(def_rows.size() == 1);
    CHECK(flag_rows[0].config_digest == cfg_rows[0].config_digest);
    CHECK(flag_rows[0].config_digest != def_rows[0].config_digest);
    CHECK(flag_rows[0].auc == cfg_rows[0].auc);
}

TEST_CASE("cli: explicit flags override config file values") {
    TempFile data(".csv"), rep_mixed(".csv"), rep_flag(".csv");
    TempFile cfg(".cfg");
    REQUIRE(run_cli("gen --n 400 --d 3 --seed 5 --out " + data.path).exit_code == 0);

    {
        std::ofstream out(cfg.path);
        out << "# comment line\n";
        out << "lof.k = 9\n";
    }
    const std::string base = "run --data " + data.path +
                             " --detectors lof --scenarios 1 --seeds 42 --out ";
    REQUIRE(run_cli(base + rep_mixed.path + " --config " + cfg.path +
                    " --lof.k 7").exit_code == 0);
    REQUIRE(run_cli(base + rep_flag.path + " --lof.k 7").exit_code == 0);

    const auto mixed = read_report_csv(rep_mixed.path);
    const auto flag = read_report_csv(rep_flag.path);
    REQUIRE(mixed.size() == 1);
    REQUIRE(flag.size() == 1);
    CHECK(mixed[0].config_digest == flag[0].config_digest);
}

TEST_CASE("cli: config file errors are reported with nonzero exit") {
    TempFile data(".csv"), report(".csv");
    TempFile cfg(".cfg");
    REQUIRE(run_cli("gen --n 200 --d 2 --seed 5 --out " + data.path).exit_code == 0);
    const std::string base = "run --data " + data.path +
                             " --detectors lof --scenarios 1 --out " + report.path;

    {
        std::ofstream out(cfg.path);
        out << "lof.neighbours=7\n";
    }
    auto r = run_cli(base + " --config " + cfg.path);
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("lof.neighbours") != std::string::npos);

    r = run_cli(base + " --config /nonexistent/odstream.cfg");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("config") != std::string::npos);
}

TEST_CASE("cli: jsonl output parses line by line") {
    TempFile data(".csv"), report(".jsonl");
    REQUIRE(run_cli("gen --n 300 --d 3 --seed 9 --out " + data.path).exit_code == 0);
    const auto r = run_cli("run --data " + data.path +
                           " --detectors abod --scenarios 2 --seeds 42"
                           " --window 64 --stride 32 --format jsonl --out " +
                           report.path);
    REQUIRE(r.exit_code == 0);

    std::ifstream in(report.path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["detector"] == "abod");
        CHECK(j["scenario"] == 2);
        CHECK(j["window"] == 64);
        ++lines;
    }
    CHECK(lines == 1);
}

TEST_CASE("cli: report pretty-printer summarizes a run") {
    TempFile data(".csv"), report(".csv");
    REQUIRE(run_cli("gen --n 400 --d 3 --seed 13 --out " + data.path).exit_code == 0);
    REQUIRE(run_cli("run --data " + data.path +
                    " --detectors ocsvm,abod --scenarios 1,2 --seeds 1,2 --out " +
                    report.path).exit_code == 0);
    const auto r = run_cli("report --in " + report.path);
    CHECK(r.exit_code == 0);
    // the dataset name is the file stem
    const std::string stem = data.path.substr(0, data.path.size() - 4);
    CHECK(r.out.find(stem) != std::string::npos);
    CHECK(r.out.find("ocsvm") != std::string::npos);
    CHECK(r.out.find("abod") != std::string::npos);
    CHECK(r.out.find("seeds") != std::string::npos);  // averaged-over note

    const auto missing = run_cli("report --in does_not_exist.csv");
    CHECK(missing.exit_code != 0);
}
