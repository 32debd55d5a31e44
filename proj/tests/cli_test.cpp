// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the installed gasrec binary over the committed synthetic fixture:
// the full pipeline (CSV ingest -> preprocess -> 5-epoch train -> recommend
// -> backtest -> analyze) must reproduce the committed reference outputs
// byte for byte. Set GASREC_REGEN_GOLDEN=1 to rewrite the references after
// an intentional behavior change.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kBin = GASREC_CLI_BIN;
const fs::path kFixtures = GASREC_FIXTURES;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot read ", path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / "gasrec_cli_test";
        fs::remove_all(dir);
        fs::create_directory(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

Scratch scratch;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const std::string out_path = scratch / ("stdout." + std::to_string(counter));
    const std::string err_path = scratch / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string command = kBin + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

bool regen() {
    return std::getenv("GASREC_REGEN_GOLDEN") != nullptr;
}

// Compares `actual` against the committed reference, or rewrites the
// reference when regenerating.
void check_golden(const std::string& name, const std::string& actual) {
    const fs::path path = kFixtures / "golden" / name;
    if (regen()) {
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << actual;
        MESSAGE("regenerated ", path.string());
        return;
    }
    REQUIRE_MESSAGE(fs::exists(path),
                    path.string(), " is missing; run with GASREC_REGEN_GOLDEN=1");
    CHECK_MESSAGE(read_file(path) == actual, "output differs from ", path.string());
}

}  // namespace

TEST_CASE("help and version") {
    CHECK(run("--help").exit_code == 0);
    CHECK(run("--help").out.find("gasrec") != std::string::npos);
    CHECK(run("--version").exit_code == 0);
    for (const char* sub : {"ingest", "analyze", "preprocess", "train", "recommend",
                            "backtest"}) {
        CHECK(run(std::string(sub) + " --help").exit_code == 0);
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("").exit_code == 1);                  // a subcommand is required
    CHECK(run("frobnicate").exit_code == 1);        // unknown subcommand
    CHECK(run("backtest").exit_code == 1);          // no --trace anywhere
    CHECK(run("recommend").exit_code == 1);         // missing required flags
    CHECK(run("train --epochs five").exit_code == 1);
    CHECK(run("ingest --out x.csv").exit_code == 1);  // neither source given

    // A malformed config file is a usage error naming the offending line.
    const std::string bad_conf = scratch / "bad.conf";
    std::ofstream(bad_conf) << "[pipeline]\nstep_minutes = 5\n";
    const auto result = run("--config " + bad_conf + " analyze --trace x --out y");
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("step_minutes") != std::string::npos);
}

TEST_CASE("data errors exit 2") {
    CHECK(run("analyze --trace " + (scratch / "absent.csv") + " --out " +
              (scratch / "r.csv"))
              .exit_code == 2);

    const std::string garbled = scratch / "garbled.csv";
    std::ofstream(garbled) << "not,a,trace\n";
    CHECK(run("analyze --trace " + garbled + " --out " + (scratch / "r.csv")).exit_code ==
          2);
}

TEST_CASE("golden pipeline") {
    const std::string conf = (kFixtures / "gasrec.conf").string();
    const std::string fixture_trace = (kFixtures / "trace.csv").string();
    const std::string usd = (kFixtures / "usd.csv").string();
    const std::string trace = scratch / "trace.csv";

    // Ingest from CSV: validated import, canonical rewrite is byte-identical.
    REQUIRE(run("ingest --from-csv " + fixture_trace + " --out " + trace).exit_code == 0);
    CHECK(read_file(trace) == read_file(fixture_trace));

    // Preprocess twice: identical bytes out.
    const std::string windows = scratch / "windows.bin";
    const std::string windows2 = scratch / "windows2.bin";
    REQUIRE(run("--config " + conf + " preprocess --trace " + trace + " --eth-prices " +
                usd + " --out " + windows)
                .exit_code == 0);
    REQUIRE(run("--config " + conf + " preprocess --trace " + trace + " --eth-prices " +
                usd + " --out " + windows2)
                .exit_code == 0);
    CHECK(read_file(windows) == read_file(windows2));

    // Train five epochs; the stdout summary and the loss report are pinned.
    const std::string model = scratch / "model.bin";
    const std::string train_report = scratch / "train_report.csv";
    const auto train_run = run("--config " + conf + " train --windows " + windows +
                               " --out " + model + " --report " + train_report);
    REQUIRE(train_run.exit_code == 0);
    check_golden("train_stdout.txt", train_run.out);
    check_golden("train_report.csv", read_file(train_report));

    // Global flags are accepted after the subcommand name too; the config
    // file's seed spelled as a post-subcommand flag trains the same model.
    const std::string model_flagged = scratch / "model_flagged.bin";
    REQUIRE(run("--config " + conf + " train --windows " + windows + " --out " +
                model_flagged + " --seed 424242")
                .exit_code == 0);
    CHECK(read_file(model_flagged) == read_file(model));

    // Model-based recommendation at the trace head.
    const auto rec_run = run("recommend --model " + model + " --trace " + trace +
                             " --eth-prices " + usd + " --at-block 1002879 --urgency 1.0");
    REQUIRE(rec_run.exit_code == 0);
    check_golden("recommend.json", rec_run.out);
    CHECK(rec_run.err.empty());

    // An out-of-band urgency still works but warns.
    const auto urgent = run("recommend --model " + model + " --trace " + trace +
                            " --eth-prices " + usd + " --at-block 1002879 --urgency 2.0");
    REQUIRE(urgent.exit_code == 0);
    CHECK(urgent.err.find("urgency") != std::string::npos);

    // Backtest the configured strategy sweep; --out and stdout agree.
    const std::string backtest_csv = scratch / "backtest.csv";
    REQUIRE(run("--config " + conf + " backtest --trace " + trace + " --model " + model +
                " --eth-prices " + usd + " --out " + backtest_csv)
                .exit_code == 0);
    check_golden("backtest.csv", read_file(backtest_csv));
    const auto backtest_stdout = run("--config " + conf + " backtest --trace " + trace +
                                     " --model " + model + " --eth-prices " + usd);
    REQUIRE(backtest_stdout.exit_code == 0);
    CHECK(backtest_stdout.out == read_file(backtest_csv));

    // Analysis report; without --out the same bytes go to stdout.
    const std::string analyze_csv = scratch / "analyze.csv";
    REQUIRE(run("analyze --trace " + trace + " --interval 3600 --max-lag 48 --out " +
                analyze_csv)
                .exit_code == 0);
    check_golden("analyze.csv", read_file(analyze_csv));
    const auto analyze_stdout = run("analyze --trace " + trace + " --interval 3600 --max-lag 48");
    REQUIRE(analyze_stdout.exit_code == 0);
    CHECK(analyze_stdout.out == read_file(analyze_csv));
}
