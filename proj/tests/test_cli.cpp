#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "varma/csv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = VARMAKIT_CLI_PATH;

struct CliRun {
    int exit_code;
    std::string output;  // stdout + stderr
};

CliRun run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cli_output.log";
    const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliRun run;
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    run.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return run;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("cli_test_tmp") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

const char* kVar1Config = R"({
  "model": {
    "phi": [[[0.7, 0.0], [0.3, 0.7]]],
    "theta": [],
    "sigma": [[1.0, 0.2], [0.2, 1.0]]
  },
  "T": 60,
  "burn_in": 200,
  "seed": 99
})";

}  // namespace

TEST_CASE("cli simulate writes a deterministic series") {
    const fs::path dir = fresh_dir("simulate");
    write(dir / "config.json", kVar1Config);

    const CliRun first = run_cli("simulate --config " + (dir / "config.json").string() +
                                     " --out " + dir.string(),
                                 dir);
    REQUIRE(first.exit_code == 0);
    REQUIRE(fs::exists(dir / "series.csv"));
    REQUIRE(fs::exists(dir / "manifest.json"));

    const std::string csv = varma::read_file((dir / "series.csv").string());
    const auto rows = parse_csv(csv);
    CHECK(rows[0] == std::vector<std::string>{"t", "y1", "y2"});
    CHECK(rows.size() == 61);  // header + T rows

    const CliRun second = run_cli("simulate --config " + (dir / "config.json").string() +
                                      " --out " + dir.string(),
                                  dir);
    REQUIRE(second.exit_code == 0);
    CHECK(varma::read_file((dir / "series.csv").string()) == csv);

    const CliRun reseeded = run_cli("simulate --seed 123 --config " +
                                        (dir / "config.json").string() + " --out " + dir.string(),
                                    dir);
    REQUIRE(reseeded.exit_code == 0);
    CHECK(varma::read_file((dir / "series.csv").string()) != csv);
}

TEST_CASE("cli simulate rejects an indefinite sigma with exit 3") {
    const fs::path dir = fresh_dir("simulate_bad_sigma");
    write(dir / "config.json", R"({
      "model": {"phi": [], "theta": [], "sigma": [[1.0, 2.0], [2.0, 1.0]]},
      "T": 10, "seed": 1
    })");
    const CliRun run = run_cli("simulate --config " + (dir / "config.json").string() + " --out " +
                                   dir.string(),
                               dir);
    CHECK(run.exit_code == 3);
    CHECK(run.output.find("eigenvalue") != std::string::npos);
}

TEST_CASE("cli rejects malformed configs with exit 2") {
    const fs::path dir = fresh_dir("bad_config");
    write(dir / "config.json", "{ this is not json");
    const CliRun run = run_cli("simulate --config " + (dir / "config.json").string() + " --out " +
                                   dir.string(),
                               dir);
    CHECK(run.exit_code == 2);

    write(dir / "negative_kappa.json", R"({
      "model": "VAR1", "T": [100], "alpha": [0.1], "zeta": [5],
      "kind": ["AO"], "kappa": [-1], "replications": 1, "base_seed": 1
    })");
    const CliRun mc = run_cli("montecarlo --config " + (dir / "negative_kappa.json").string() +
                                  " --out " + dir.string(),
                              dir);
    CHECK(mc.exit_code == 2);
}

TEST_CASE("cli montecarlo smoke run with one replication") {
    const fs::path dir = fresh_dir("mc_smoke");
    write(dir / "config.json", R"({
      "model": "VAR1", "T": [300], "alpha": [0.1], "zeta": [50],
      "kind": ["AO"], "kappa": [0, 1], "replications": 1, "base_seed": 4,
      "subset": "oracle"
    })");
    const CliRun run = run_cli("montecarlo --config " + (dir / "config.json").string() +
                                   " --out " + dir.string(),
                               dir);
    REQUIRE(run.exit_code == 0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "results.md"));
    const auto rows = parse_csv(varma::read_file((dir / "results.csv").string()));
    CHECK(rows[0][0] == "panel");
}

TEST_CASE("cli fit ingests simulated output losslessly and recovers white noise") {
    const fs::path dir = fresh_dir("fit_roundtrip");
    write(dir / "config.json", R"({
      "model": {"phi": [], "theta": [], "sigma": [[1.0]]},
      "T": 1000, "burn_in": 0, "seed": 31
    })");
    const CliRun sim = run_cli("simulate --config " + (dir / "config.json").string() + " --out " +
                                   dir.string(),
                               dir);
    REQUIRE(sim.exit_code == 0);

    const CliRun fitted = run_cli("fit --data " + (dir / "series.csv").string() +
                                      " --p 1 --q 0 --alpha 0.1 --kappa 2 --out " + dir.string(),
                                  dir);
    REQUIRE(fitted.exit_code == 0);
    REQUIRE(fs::exists(dir / "fit.json"));
    REQUIRE(fs::exists(dir / "retained.csv"));
    REQUIRE(fs::exists(dir / "flagged.csv"));

    const json fit = json::parse(varma::read_file((dir / "fit.json").string()));
    CHECK(fit["converged"].get<bool>());
    CHECK(std::abs(fit["phi"][0][0][0].get<double>()) < 0.1);
}

TEST_CASE("cli fit rejects a malformed CSV header with exit 2") {
    const fs::path dir = fresh_dir("fit_bad_csv");
    write(dir / "data.csv", "time,a,b\n1,0.5,0.2\n");
    const CliRun run = run_cli("fit --data " + (dir / "data.csv").string() +
                                   " --p 1 --q 0 --out " + dir.string(),
                               dir);
    CHECK(run.exit_code == 2);
}

TEST_CASE("cli select emits the five-column table and rejects an empty grid") {
    const fs::path dir = fresh_dir("select");
    write(dir / "config.json", kVar1Config);
    std::string config = kVar1Config;
    config.replace(config.find("\"T\": 60"), 7, "\"T\": 240");
    write(dir / "config.json", config);
    const CliRun sim = run_cli("simulate --config " + (dir / "config.json").string() + " --out " +
                                   dir.string(),
                               dir);
    REQUIRE(sim.exit_code == 0);

    const CliRun empty = run_cli("select --data " + (dir / "series.csv").string() +
                                     " --grid \"\" --out " + dir.string(),
                                 dir);
    CHECK(empty.exit_code == 2);

    const CliRun run = run_cli("select --data " + (dir / "series.csv").string() +
                                   " --grid \"1,0;2,0\" --alpha 0.1 --kappa 1 --out " +
                                   dir.string(),
                               dir);
    REQUIRE(run.exit_code == 0);
    const auto rows = parse_csv(varma::read_file((dir / "selection.csv").string()));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"p", "q", "n_eff", "aic_avg_patch", "aic_avg_full"});
    CHECK(rows[1][0] == "1");
    CHECK(rows[2][0] == "2");
}

TEST_CASE("cli trace emits per-model propagation patterns") {
    const fs::path dir = fresh_dir("trace");
    write(dir / "config.json", R"({
      "phi": 0.7, "theta": 0.5, "T": 80, "tau": 40, "zeta": 10.0, "seed": 6
    })");
    const CliRun run = run_cli("trace --config " + (dir / "config.json").string() + " --out " +
                                   dir.string(),
                               dir);
    REQUIRE(run.exit_code == 0);
    const auto rows = parse_csv(varma::read_file((dir / "trace.csv").string()));
    REQUIRE(rows.size() == 1 + 3 * 2 * 80);
    CHECK(rows[0] == std::vector<std::string>{"model", "kind", "t", "series", "residual",
                                              "clean_series", "clean_residual",
                                              "is_outlier_time"});

    // AR1/AO: residuals differ from clean only at tau and tau+1;
    // AR1/IO: the series differs from clean at every t >= tau, residuals only at tau.
    int ao_resid_diffs = 0, io_resid_diffs = 0, io_series_diffs = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r[0] != "AR1") continue;
        const int t = std::stoi(r[2]);
        const double series = std::stod(r[3]), resid = std::stod(r[4]);
        const double clean_series = std::stod(r[5]), clean_resid = std::stod(r[6]);
        if (r[1] == "AO" && std::abs(resid - clean_resid) > 1e-9) {
            ++ao_resid_diffs;
            CHECK((t == 40 || t == 41));
        }
        if (r[1] == "IO") {
            if (std::abs(resid - clean_resid) > 1e-9) {
                ++io_resid_diffs;
                CHECK(t == 40);
            }
            if (t >= 40) {
                CHECK(std::abs(series - clean_series) > 0.0);
                ++io_series_diffs;
            }
        }
    }
    CHECK(ao_resid_diffs == 2);
    CHECK(io_resid_diffs == 1);
    CHECK(io_series_diffs == 41);

    // zeta = 0: observed equals clean everywhere
    write(dir / "zero.json", R"({"phi": 0.7, "theta": 0.5, "T": 50, "tau": 25, "zeta": 0.0, "seed": 6})");
    const CliRun zero = run_cli("trace --config " + (dir / "zero.json").string() + " --out " +
                                    dir.string(),
                                dir);
    REQUIRE(zero.exit_code == 0);
    for (const auto& r : parse_csv(varma::read_file((dir / "trace.csv").string()))) {
        if (r[0] == "model") continue;
        CHECK(r[3] == r[5]);  // series == clean_series, full-precision text
    }
}
