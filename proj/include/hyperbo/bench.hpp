#pragma once

#include "hyperbo/dataset.hpp"
#include "hyperbo/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hyperbo {

enum class Strategy { StandardBO, HyperBO, BestThetaRerun, GoldStandard };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);  // ConfigError on unknown names

struct TaskBinding {
    std::string kind = "goldstein_price";  // goldstein_price | gp_sample | dataset
    int grid_points = 41;

    // gp_sample
    Index dim = 2;
    double length_scale = 0.2;
    std::uint64_t task_seed = 0;

    // dataset
    std::string preset;
    std::filesystem::path path;
    DatasetSchema schema;

    double noise_std = 0.0;
};

struct ExperimentConfig {
    TaskBinding task;
    int trials = 50;
    long budget = 50;
    std::vector<Strategy> strategies{Strategy::StandardBO, Strategy::HyperBO, Strategy::BestThetaRerun};
    std::optional<ModelTheta> gold_standard_theta;
    unsigned workers = 0;  // 0: hardware concurrency
    std::filesystem::path output_dir = "runs/default";

    // m, K, R, lambda, seed and the inner-GP settings.
    RunConfig run;

    /// Relative dataset paths resolve against `base_dir`. Throws ConfigError.
    static ExperimentConfig from_json(const std::string& text, const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Normalized JSON form with every default filled in.
    std::string to_json() const;

    bool runs(Strategy s) const;
};

Task build_task(const TaskBinding& binding);

/// Per-feature Pearson correlation between task inputs and values.
std::vector<double> feature_correlations(const Task& task);

struct StrategyOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> trace;  // iterations 0..budget
    std::optional<ModelTheta> theta;
};

struct TrialOutcome {
    int index = 0;
    std::uint64_t seed = 0;
    std::vector<StrategyOutcome> strategies;  // parallel to config.strategies
    std::vector<ScoreRecord> ledger;
};

/// Runs one trial with every configured strategy on a shared initial design.
TrialOutcome run_trial(const Task& task, const ExperimentConfig& config, int index);

struct ExperimentSummary {
    std::vector<TrialOutcome> trials;
    std::vector<int> successes;  // per strategy
    bool within_failure_budget = true;
    std::filesystem::path output_dir;
};

/// Runs all trials, writes traces, aggregate.csv, manifest.json and
/// config.json, then the monotonicity report when applicable.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Shortest round-trip decimal.
std::string format_number(double v);

struct ReportResult {
    bool written = false;
    std::string notice;
    std::filesystem::path path;
};

/// Writes monotonicity_report.csv into a completed run directory.
ReportResult emit_reports(const std::filesystem::path& run_dir);

}  // namespace hyperbo
