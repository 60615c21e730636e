#include "doctest.h"

#include "hyperbo/bench.hpp"
#include "hyperbo/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace hyperbo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hyperbo_bench_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

ExperimentConfig small_config(const fs::path& out, const std::string& extra = "") {
    const std::string text = R"({"task": {"kind": "goldstein_price", "grid_points": 11}, "trials": 3, "budget": 4,
        "m": 1, "K": 2, "seed": 7, "workers": 2, "output_dir": ")" +
                             out.string() + "\"" + extra + "}";
    return ExperimentConfig::from_json(text);
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("HYPERBO_CLI");
    REQUIRE(cli != nullptr);
    const int status = std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config defaults and derived values") {
    const ExperimentConfig c = ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}})");
    CHECK(c.trials == 50);
    CHECK(c.run.m == 5);
    CHECK(c.run.K == 5);
    CHECK(c.run.R == 10);
    CHECK(c.budget == 50);
    CHECK(c.run.mode == ThetaMode::LengthScale);
    CHECK(c.runs(Strategy::StandardBO));
    CHECK(c.runs(Strategy::HyperBO));
    CHECK(c.runs(Strategy::BestThetaRerun));
    CHECK_FALSE(c.runs(Strategy::GoldStandard));
    CHECK(c.task.grid_points == 41);
    // The normalized form reparses to the same thing.
    const ExperimentConfig again = ExperimentConfig::from_json(c.to_json());
    CHECK(again.to_json() == c.to_json());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"trials": 2})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "trials": 0})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "budget": 30, "K": 5, "R": 5})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "strategies": ["gold_standard"]})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "strategies": ["random"]})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "mode": "monotonicity",
        "strategies": ["gold_standard"], "gold_standard_theta": [-6, -6, 0, 0]})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "dataset", "path": "/no/such/file.csv"}})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"task": {"kind": "goldstein_price"}, "trials": "many"})"), ConfigError);
    CHECK_NOTHROW(ExperimentConfig::from_json(R"({"_comment": "ok", "task": {"kind": "goldstein_price"}})"));
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(3.0) == "3");
    CHECK(format_number(1e-7) == "1e-07");
    for (double v : {1.0 / 3.0, 1015684.7597551629, -2.5e-300}) CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("one trial and one strategy give one trace and budget rows") {
    const fs::path out = scratch("counting");
    const ExperimentConfig c = small_config(out, R"(, "trials": 1, "strategies": ["standard_bo"])");
    const ExperimentSummary s = run_experiment(c);
    CHECK(s.within_failure_budget);
    std::size_t traces = 0;
    for (const auto& e : fs::recursive_directory_iterator(out / "traces")) traces += e.is_regular_file();
    CHECK(traces == 1);
    const auto agg = read_csv(out / "aggregate.csv");
    REQUIRE(agg.size() == 5);
    CHECK(agg[0] == std::vector<std::string>{"iteration", "mean_regret_standard_bo", "stderr_standard_bo"});
    CHECK(agg[1][0] == "1");
    CHECK(agg[4][0] == "4");
    CHECK(agg[4][2] == "0");
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "config.json"));
}

TEST_CASE("strategies in one trial share the initial design") {
    const fs::path out = scratch("shared");
    run_experiment(small_config(out, R"(, "strategies": ["standard_bo", "hyperbo", "best_theta_rerun"])"));
    for (int k = 0; k < 3; ++k) {
        const std::string name = "trial_" + std::to_string(k) + ".csv";
        const auto a = read_csv(out / "traces" / "standard_bo" / name);
        const auto b = read_csv(out / "traces" / "hyperbo" / name);
        const auto c = read_csv(out / "traces" / "best_theta_rerun" / name);
        REQUIRE(a.size() == 6);
        CHECK(a[1] == b[1]);
        CHECK(a[1] == c[1]);
    }
    const auto header = read_csv(out / "aggregate.csv")[0];
    CHECK(header == std::vector<std::string>{"iteration", "mean_regret_standard_bo", "mean_regret_hyperbo",
                                             "mean_regret_best_theta_rerun", "stderr_standard_bo", "stderr_hyperbo",
                                             "stderr_best_theta_rerun"});
}

TEST_CASE("aggregate standard error matches a statistics oracle over 50 trials") {
    const fs::path out = scratch("stderr");
    run_experiment(small_config(out, R"(, "trials": 50, "strategies": ["standard_bo"], "workers": 1)"));
    const auto agg = read_csv(out / "aggregate.csv");
    for (int it = 1; it <= 4; ++it) {
        std::vector<double> r;
        for (int k = 0; k < 50; ++k) {
            r.push_back(std::stod(read_csv(out / "traces" / "standard_bo" / ("trial_" + std::to_string(k) + ".csv"))[
                static_cast<std::size_t>(it + 1)][1]));
        }
        double m = 0.0;
        for (double v : r) m += v;
        m /= 50.0;
        double ss = 0.0;
        for (double v : r) ss += (v - m) * (v - m);
        const double se = std::sqrt(ss / 49.0) / std::sqrt(50.0);
        CHECK(std::abs(std::stod(agg[static_cast<std::size_t>(it)][1]) - m) <= 1e-12 * std::max(1.0, m));
        CHECK(std::abs(std::stod(agg[static_cast<std::size_t>(it)][2]) - se) <= 1e-12 * std::max(1.0, se));
    }
}

TEST_CASE("identical config and seed give byte-identical CSVs regardless of worker count") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ExperimentConfig ca = small_config(a, R"(, "mode": "monotonicity", "workers": 1)");
    ExperimentConfig cb = small_config(b, R"(, "mode": "monotonicity", "workers": 3)");
    run_experiment(ca);
    run_experiment(cb);
    CHECK(slurp(a / "aggregate.csv") == slurp(b / "aggregate.csv"));
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        CHECK(slurp(e.path()) == slurp(b / fs::relative(e.path(), a)));
    }
}

TEST_CASE("monotonicity report is written for monotonicity runs only") {
    const fs::path mono = scratch("report_mono");
    run_experiment(small_config(mono, R"(, "mode": "monotonicity")"));
    REQUIRE(fs::exists(mono / "monotonicity_report.csv"));
    const auto rows = read_csv(mono / "monotonicity_report.csv");
    CHECK(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"feature", "correlation", "mean_theta_plus", "mean_theta_minus", "net",
                                              "direction", "match"});
    CHECK(rows[1][0] == "x1");
    CHECK(std::stod(rows[1][1]) < 0.0);
    CHECK(std::stod(rows[2][1]) > 0.0);

    const fs::path ls = scratch("report_ls");
    run_experiment(small_config(ls));
    const ReportResult r = emit_reports(ls);
    CHECK_FALSE(r.written);
    CHECK(r.notice.find("skipped") != std::string::npos);
    CHECK_FALSE(fs::exists(ls / "monotonicity_report.csv"));
}

TEST_CASE("report with no successful trials is an error") {
    const fs::path dir = scratch("report_empty");
    const ExperimentConfig c = small_config(dir, R"(, "mode": "monotonicity")");
    std::ofstream(dir / "config.json") << c.to_json();
    std::ofstream(dir / "manifest.json")
        << R"({"trial_results": [{"index": 0, "strategies": {"hyperbo": {"status": "failed", "error": "x"}}}]})";
    CHECK_THROWS(emit_reports(dir));
    CHECK_FALSE(fs::exists(dir / "monotonicity_report.csv"));
    CHECK_THROWS_AS(emit_reports(scratch("not_a_run")), ConfigError);
}

TEST_CASE("dataset configs resolve relative paths and presets") {
    const fs::path dir = scratch("dataset");
    {
        std::ofstream f(dir / "fish.csv");
        f << "a,b,c,d,e,f,LC50\n";
        for (int r = 0; r < 12; ++r) {
            for (int c = 0; c < 6; ++c) f << (r * 7 + c * 3) % 11 << ",";
            f << (r * 5) % 13 << "\n";
        }
    }
    const ExperimentConfig c = ExperimentConfig::from_json(
        R"({"task": {"kind": "dataset", "preset": "fish", "path": "fish.csv"}, "trials": 2, "budget": 4, "m": 1,
            "K": 2, "strategies": ["standard_bo", "hyperbo"], "output_dir": ")" +
            (dir / "out").string() + "\"}",
        dir);
    CHECK(c.task.path == dir / "fish.csv");
    const ExperimentSummary s = run_experiment(c);
    CHECK(s.successes == std::vector<int>{2, 2});
    const Task t = build_task(c.task);
    CHECK(t.dim() == 6);
    CHECK(t.size() == 12);
}

TEST_CASE("output directory override from the environment") {
    const fs::path dir = scratch("env");
    {
        std::ofstream f(dir / "c.json");
        f << R"({"task": {"kind": "goldstein_price"}, "output_dir": "elsewhere"})";
    }
    ::setenv("HYPERBO_OUTPUT_DIR", (dir / "override").c_str(), 1);
    CHECK(ExperimentConfig::load(dir / "c.json").output_dir == dir / "override");
    ::unsetenv("HYPERBO_OUTPUT_DIR");
    CHECK(ExperimentConfig::load(dir / "c.json").output_dir == "elsewhere");
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    {
        std::ofstream(dir / "good.json") << R"({"task": {"kind": "goldstein_price", "grid_points": 9}, "trials": 2,
            "budget": 2, "m": 1, "K": 2, "strategies": ["standard_bo"], "output_dir": ")"
                                         << (dir / "run").string() << "\"}";
        std::ofstream(dir / "bad.json") << R"({"task": {"kind": "moon"}})";
    }
    CHECK(run_cli("validate " + (dir / "good.json").string()) == 0);
    CHECK(run_cli("validate " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("validate " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("run " + (dir / "good.json").string()) == 0);
    CHECK(fs::exists(dir / "run" / "aggregate.csv"));
    CHECK(run_cli("report " + (dir / "run").string()) == 0);
    CHECK(run_cli("frobnicate") == 2);
}
