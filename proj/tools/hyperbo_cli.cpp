// hyperbo: run, validate and report HyperBO benchmark experiments.
//
// Exit codes: 0 success, 1 too many failed trials (or report failure),
// 2 configuration error.

#include "hyperbo/bench.hpp"
#include "hyperbo/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

int cmd_run(const std::string& path) {
    const hyperbo::ExperimentConfig config = hyperbo::ExperimentConfig::load(path);
    const hyperbo::ExperimentSummary summary = hyperbo::run_experiment(config);
    std::cout << "wrote " << summary.output_dir.string() << "\n";
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
        std::cout << "  " << hyperbo::to_string(config.strategies[s]) << ": " << summary.successes[s] << "/"
                  << config.trials << " trials succeeded\n";
    }
    if (!summary.within_failure_budget) {
        std::cerr << "more than 10% of trials failed; see manifest.json\n";
        return 1;
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    const hyperbo::ExperimentConfig config = hyperbo::ExperimentConfig::load(path);
    std::cout << config.to_json();
    return 0;
}

int cmd_report(const std::string& dir) {
    const hyperbo::ReportResult r = hyperbo::emit_reports(dir);
    if (!r.written) {
        std::cout << r.notice << "\n";
        return 0;
    }
    std::cout << "wrote " << r.path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HyperBO benchmark harness"};
    app.require_subcommand(1);

    std::string run_config, validate_config, report_dir;
    CLI::App* run = app.add_subcommand("run", "Run every trial of an experiment config");
    run->add_option("config", run_config, "Experiment JSON")->required();
    CLI::App* validate = app.add_subcommand("validate", "Check a config and print it with defaults filled in");
    validate->add_option("config", validate_config, "Experiment JSON")->required();
    CLI::App* report = app.add_subcommand("report", "Write the monotonicity report for a run directory");
    report->add_option("run_dir", report_dir, "Output directory of a completed run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(run_config);
        if (*validate) return cmd_validate(validate_config);
        return cmd_report(report_dir);
    } catch (const hyperbo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hyperbo::LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
