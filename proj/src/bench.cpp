#include "hyperbo/bench.hpp"

#include "hyperbo/errors.hpp"
#include "hyperbo/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace hyperbo {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::StandardBO: return "standard_bo";
        case Strategy::HyperBO: return "hyperbo";
        case Strategy::BestThetaRerun: return "best_theta_rerun";
        case Strategy::GoldStandard: return "gold_standard";
    }
    return "unknown";
}

Strategy parse_strategy(const std::string& text) {
    for (Strategy s : {Strategy::StandardBO, Strategy::HyperBO, Strategy::BestThetaRerun, Strategy::GoldStandard}) {
        if (text == to_string(s)) return s;
    }
    throw ConfigError("unknown strategy '" + text + "'");
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// Small helpers that turn JSON type errors into ConfigError with the key name.
template <typename T>
T get(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!it.key().empty() && it.key().front() == '_') continue;  // comments
        if (!known.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

FilterSpec parse_filter(const json& j) {
    if (!j.is_object()) throw ConfigError("filters: each entry must be an object");
    reject_unknown(j, {"kind", "column", "fraction"}, "filter");
    FilterSpec f;
    const std::string kind = get<std::string>(j, "kind", "");
    if (kind == "drop_young_outlier") {
        f.kind = FilterSpec::Kind::DropYoungOutlier;
        f.column = get<std::string>(j, "column", "AGE");
        f.fraction = get<double>(j, "fraction", 0.1);
    } else if (kind == "single_maximum") {
        f.kind = FilterSpec::Kind::SingleMaximum;
    } else {
        throw ConfigError("unknown filter kind '" + kind + "'");
    }
    return f;
}

json filter_to_json(const FilterSpec& f) {
    json j;
    if (f.kind == FilterSpec::Kind::DropYoungOutlier) {
        j["kind"] = "drop_young_outlier";
        j["column"] = f.column;
        j["fraction"] = f.fraction;
    } else {
        j["kind"] = "single_maximum";
    }
    return j;
}

TaskBinding parse_task(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("'task' must be an object");
    TaskBinding t;
    t.kind = get<std::string>(j, "kind", t.kind);
    t.noise_std = get<double>(j, "noise_std", 0.0);
    if (!(t.noise_std >= 0.0)) throw ConfigError("task.noise_std must be non-negative");
    if (t.kind == "goldstein_price") {
        reject_unknown(j, {"kind", "grid_points", "noise_std"}, "task");
        t.dim = 2;
        t.grid_points = get<int>(j, "grid_points", 41);
    } else if (t.kind == "gp_sample") {
        reject_unknown(j, {"kind", "dim", "length_scale", "grid_points", "task_seed", "noise_std"}, "task");
        t.dim = get<Index>(j, "dim", 2);
        t.length_scale = get<double>(j, "length_scale", 0.2);
        t.grid_points = get<int>(j, "grid_points", 30);
        t.task_seed = get<std::uint64_t>(j, "task_seed", 0);
        if (t.dim < 1 || t.dim > 4) throw ConfigError("task.dim must be in [1, 4] for gp_sample");
        if (!(t.length_scale > 0.0)) throw ConfigError("task.length_scale must be positive");
        const double rows = std::pow(static_cast<double>(t.grid_points), static_cast<double>(t.dim));
        if (rows > 5000) throw ConfigError("gp_sample grid exceeds 5000 points");
    } else if (t.kind == "dataset") {
        reject_unknown(j, {"kind", "preset", "path", "target", "features", "filters", "delimiter", "initial_size",
                           "noise_std"},
                       "task");
        t.preset = get<std::string>(j, "preset", "");
        try {
            t.schema = t.preset.empty() ? DatasetSchema{} : preset_schema(t.preset);
        } catch (const LoadError& e) {
            throw ConfigError(e.what());
        }
        const std::string path = get<std::string>(j, "path", "");
        if (path.empty()) throw ConfigError("task.path is required for dataset tasks");
        t.path = fs::path(path).is_absolute() ? fs::path(path) : base_dir / path;
        t.path = t.path.lexically_normal();
        if (!fs::exists(t.path)) throw ConfigError("dataset file not found: " + t.path.string());
        t.schema.target = get<std::string>(j, "target", t.schema.target);
        t.schema.features = get<std::vector<std::string>>(j, "features", t.schema.features);
        if (j.contains("filters")) {
            t.schema.filters.clear();
            if (!j.at("filters").is_array()) throw ConfigError("task.filters must be an array");
            for (const json& f : j.at("filters")) t.schema.filters.push_back(parse_filter(f));
        }
        const std::string delim = get<std::string>(j, "delimiter", ",");
        if (delim.size() != 1) throw ConfigError("task.delimiter must be a single character");
        t.schema.delimiter = delim[0];
        t.schema.initial_size = get<std::size_t>(j, "initial_size", t.schema.initial_size);
    } else {
        throw ConfigError("unknown task kind '" + t.kind + "'");
    }
    if (t.grid_points < 2) throw ConfigError("task.grid_points must be >= 2");
    return t;
}

json task_to_json(const TaskBinding& t) {
    json j;
    j["kind"] = t.kind;
    if (t.kind == "goldstein_price") {
        j["grid_points"] = t.grid_points;
    } else if (t.kind == "gp_sample") {
        j["dim"] = t.dim;
        j["length_scale"] = t.length_scale;
        j["grid_points"] = t.grid_points;
        j["task_seed"] = t.task_seed;
    } else {
        if (!t.preset.empty()) j["preset"] = t.preset;
        j["path"] = t.path.string();
        j["target"] = t.schema.target;
        j["features"] = t.schema.features;
        j["filters"] = json::array();
        for (const FilterSpec& f : t.schema.filters) j["filters"].push_back(filter_to_json(f));
        j["delimiter"] = std::string(1, t.schema.delimiter);
        j["initial_size"] = t.schema.initial_size;
    }
    j["noise_std"] = t.noise_std;
    return j;
}

TConvention parse_t_convention(const std::string& s) {
    if (s == "cumulative") return TConvention::Cumulative;
    if (s == "per_window") return TConvention::PerWindow;
    throw ConfigError("unknown t_convention '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"task", "mode", "trials", "m", "K", "R", "budget", "seed", "strategies", "gold_standard_theta",
                    "lambda", "workers", "output_dir", "length_scale", "signal_variance", "noise_variance",
                    "ucb_delta", "virtual_points_per_dim", "t_convention", "ep", "thompson_exact_limit",
                    "thompson_subset"},
                   "config");

    ExperimentConfig c;
    if (!j.contains("task")) throw ConfigError("config key 'task' is required");
    c.task = parse_task(j.at("task"), base_dir);
    c.run.mode = parse_theta_mode(get<std::string>(j, "mode", "length_scale"));
    c.trials = get<int>(j, "trials", 50);
    c.budget = get<long>(j, "budget", 50);
    c.run.m = get<int>(j, "m", 5);
    c.run.K = get<int>(j, "K", 5);
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (c.budget < 1) throw ConfigError("budget must be >= 1");
    if (c.run.K < 1 || c.run.m < 1) throw ConfigError("m and K must be >= 1");
    const long windows = (c.budget + c.run.K - 1) / c.run.K;
    c.run.R = get<int>(j, "R", static_cast<int>(std::max<long>(windows, c.run.m)));
    if (static_cast<long>(c.run.R) * c.run.K < c.budget) {
        throw ConfigError("R * K must cover the iteration budget");
    }
    c.run.seed = get<std::uint64_t>(j, "seed", 0);
    if (j.contains("lambda")) c.run.lambda = get<double>(j, "lambda", 0.0);
    c.workers = get<unsigned>(j, "workers", 0);
    c.output_dir = get<std::string>(j, "output_dir", c.output_dir.string());
    c.run.length_scale = get<double>(j, "length_scale", c.run.length_scale);
    c.run.signal_variance = get<double>(j, "signal_variance", c.run.signal_variance);
    c.run.noise_variance = get<double>(j, "noise_variance", c.run.noise_variance);
    c.run.ucb_delta = get<double>(j, "ucb_delta", c.run.ucb_delta);
    c.run.virtual_points_per_dim = get<int>(j, "virtual_points_per_dim", c.run.virtual_points_per_dim);
    c.run.t_convention = parse_t_convention(get<std::string>(j, "t_convention", "cumulative"));
    if (j.contains("ep")) {
        const json& ep = j.at("ep");
        reject_unknown(ep, {"damping", "max_sweeps", "tolerance"}, "ep");
        c.run.ep.damping = get<double>(ep, "damping", c.run.ep.damping);
        c.run.ep.max_sweeps = get<int>(ep, "max_sweeps", c.run.ep.max_sweeps);
        c.run.ep.tolerance = get<double>(ep, "tolerance", c.run.ep.tolerance);
        if (!(c.run.ep.damping > 0.0 && c.run.ep.damping <= 1.0) || c.run.ep.max_sweeps < 1 ||
            !(c.run.ep.tolerance > 0.0)) {
            throw ConfigError("invalid EP settings");
        }
    }
    c.run.thompson_exact_limit = get<std::uint64_t>(j, "thompson_exact_limit", c.run.thompson_exact_limit);
    c.run.thompson_subset = get<std::size_t>(j, "thompson_subset", c.run.thompson_subset);
    try {
        c.run.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("strategies")) {
        c.strategies.clear();
        for (const std::string& s : get<std::vector<std::string>>(j, "strategies", {})) {
            const Strategy st = parse_strategy(s);
            if (c.runs(st)) throw ConfigError("duplicate strategy '" + s + "'");
            c.strategies.push_back(st);
        }
        if (c.strategies.empty()) throw ConfigError("at least one strategy is required");
    }
    if (j.contains("gold_standard_theta")) {
        c.gold_standard_theta = ModelTheta{c.run.mode, get<std::vector<double>>(j, "gold_standard_theta", {})};
        if (c.task.kind != "dataset") {
            try {
                validate_theta(*c.gold_standard_theta, c.task.dim);
            } catch (const ContractViolation& e) {
                throw ConfigError(std::string("gold_standard_theta: ") + e.what());
            }
        }
    }
    if (c.runs(Strategy::GoldStandard) && !c.gold_standard_theta) {
        throw ConfigError("strategy gold_standard requires gold_standard_theta");
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    ExperimentConfig c = from_json(buf.str(), path.parent_path());
    if (const char* env = std::getenv("HYPERBO_OUTPUT_DIR"); env && *env) c.output_dir = env;
    return c;
}

bool ExperimentConfig::runs(Strategy s) const {
    return std::find(strategies.begin(), strategies.end(), s) != strategies.end();
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["task"] = task_to_json(task);
    j["mode"] = to_string(run.mode);
    j["trials"] = trials;
    j["m"] = run.m;
    j["K"] = run.K;
    j["R"] = run.R;
    j["budget"] = budget;
    j["seed"] = run.seed;
    j["strategies"] = json::array();
    for (Strategy s : strategies) j["strategies"].push_back(to_string(s));
    if (gold_standard_theta) j["gold_standard_theta"] = gold_standard_theta->values;
    if (run.lambda) j["lambda"] = *run.lambda;
    j["workers"] = workers;
    j["output_dir"] = output_dir.string();
    j["length_scale"] = run.length_scale;
    j["signal_variance"] = run.signal_variance;
    j["noise_variance"] = run.noise_variance;
    j["ucb_delta"] = run.ucb_delta;
    j["virtual_points_per_dim"] = run.virtual_points_per_dim;
    j["t_convention"] = run.t_convention == TConvention::Cumulative ? "cumulative" : "per_window";
    j["ep"] = {{"damping", run.ep.damping}, {"max_sweeps", run.ep.max_sweeps}, {"tolerance", run.ep.tolerance}};
    j["thompson_exact_limit"] = run.thompson_exact_limit;
    j["thompson_subset"] = run.thompson_subset;
    return j.dump(2) + "\n";
}

Task build_task(const TaskBinding& binding) {
    Task task = [&] {
        if (binding.kind == "goldstein_price") return make_goldstein_price_task(binding.grid_points);
        if (binding.kind == "gp_sample") {
            return make_gp_sample_task(binding.dim, binding.length_scale, binding.grid_points, binding.task_seed);
        }
        return load_dataset(binding.path.string(), binding.schema, binding.preset.empty() ? "dataset" : binding.preset);
    }();
    task.set_noise_std(binding.noise_std);
    return task;
}

std::vector<double> feature_correlations(const Task& task) {
    std::vector<double> y(task.values().data(), task.values().data() + task.size());
    std::vector<double> out;
    for (Index d = 0; d < task.dim(); ++d) {
        const Vector col = task.inputs().col(d);
        out.push_back(pearson_correlation(std::vector<double>(col.data(), col.data() + col.size()), y));
    }
    return out;
}

namespace {

std::vector<double> fit_trace(std::vector<double> trace, long budget) {
    const std::size_t want = static_cast<std::size_t>(budget) + 1;
    if (trace.size() > want) trace.resize(want);
    while (trace.size() < want) trace.push_back(trace.back());
    return trace;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string trace_csv(const std::vector<double>& trace) {
    std::string s = "iteration,regret\n";
    for (std::size_t i = 0; i < trace.size(); ++i) s += std::to_string(i) + "," + format_number(trace[i]) + "\n";
    return s;
}

json theta_json(const ModelTheta& t) {
    json a = json::array();
    for (double v : t.values) a.push_back(v);
    return a;
}

}  // namespace

TrialOutcome run_trial(const Task& task, const ExperimentConfig& config, int index) {
    TrialOutcome out;
    out.index = index;
    out.seed = config.run.seed + static_cast<std::uint64_t>(index);
    RunConfig rc = config.run;
    rc.seed = out.seed;

    std::optional<RunResult> framework;
    std::string framework_error;
    bool framework_tried = false;
    auto ensure_framework = [&] {
        if (framework_tried) return;
        framework_tried = true;
        try {
            framework = run_framework(task, rc);
            out.ledger = framework->ledger.records();
        } catch (const std::exception& e) {
            framework_error = e.what();
        }
    };

    for (Strategy s : config.strategies) {
        StrategyOutcome so;
        try {
            RunResult r;
            switch (s) {
                case Strategy::StandardBO:
                    r = run_fixed_theta(task, standard_bo_theta(task.dim(), rc), config.budget, rc);
                    break;
                case Strategy::HyperBO:
                    ensure_framework();
                    if (!framework) throw std::runtime_error(framework_error);
                    r = *framework;
                    break;
                case Strategy::BestThetaRerun:
                    ensure_framework();
                    if (!framework) throw std::runtime_error("hyperbo run failed: " + framework_error);
                    r = rerun_with_best_theta(task, framework->best_theta, config.budget, rc);
                    break;
                case Strategy::GoldStandard:
                    r = run_fixed_theta(task, *config.gold_standard_theta, config.budget, rc);
                    break;
            }
            so.trace = fit_trace(r.regret_trace, config.budget);
            so.theta = r.best_theta;
            so.ok = true;
        } catch (const std::exception& e) {
            so.error = e.what();
        }
        out.strategies.push_back(std::move(so));
    }
    return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    const Task task = build_task(config.task);
    if (config.gold_standard_theta) {
        try {
            validate_theta(*config.gold_standard_theta, task.dim());
        } catch (const ContractViolation& e) {
            throw ConfigError(std::string("gold_standard_theta: ") + e.what());
        }
    }

    ExperimentSummary summary;
    summary.output_dir = config.output_dir;
    summary.trials.resize(static_cast<std::size_t>(config.trials));

    unsigned width = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    width = std::min<unsigned>(width, static_cast<unsigned>(config.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < config.trials; i = next++) {
            summary.trials[static_cast<std::size_t>(i)] = run_trial(task, config, i);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    const fs::path dir = config.output_dir;
    const std::size_t ns = config.strategies.size();
    summary.successes.assign(ns, 0);

    for (const TrialOutcome& trial : summary.trials) {
        for (std::size_t s = 0; s < ns; ++s) {
            const StrategyOutcome& so = trial.strategies[s];
            if (!so.ok) continue;
            ++summary.successes[s];
            write_file(dir / "traces" / to_string(config.strategies[s]) /
                           ("trial_" + std::to_string(trial.index) + ".csv"),
                       trace_csv(so.trace));
        }
        if (!trial.ledger.empty()) {
            std::string s = "window,window_start,gain,score,theta\n";
            for (std::size_t w = 0; w < trial.ledger.size(); ++w) {
                const ScoreRecord& r = trial.ledger[w];
                std::string theta;
                for (std::size_t k = 0; k < r.theta.values.size(); ++k) {
                    theta += (k ? " " : "") + format_number(r.theta.values[k]);
                }
                s += std::to_string(w + 1) + "," + std::to_string(r.window_start_T) + "," +
                     format_number(r.window_gain) + "," + format_number(r.score) + "," + theta + "\n";
            }
            write_file(dir / "ledgers" / ("trial_" + std::to_string(trial.index) + ".csv"), s);
        }
    }

    // aggregate.csv: one row per iteration 1..budget.
    std::string agg = "iteration";
    for (Strategy s : config.strategies) agg += ",mean_regret_" + to_string(s);
    for (Strategy s : config.strategies) agg += ",stderr_" + to_string(s);
    agg += "\n";
    for (long it = 1; it <= config.budget; ++it) {
        std::vector<std::string> means, errs;
        for (std::size_t s = 0; s < ns; ++s) {
            std::vector<double> vals;
            for (const TrialOutcome& trial : summary.trials) {
                if (trial.strategies[s].ok) vals.push_back(trial.strategies[s].trace[static_cast<std::size_t>(it)]);
            }
            means.push_back(vals.empty() ? "" : format_number(mean(vals)));
            errs.push_back(vals.empty() ? "" : format_number(standard_error(vals)));
        }
        agg += std::to_string(it);
        for (const std::string& m : means) agg += "," + m;
        for (const std::string& e : errs) agg += "," + e;
        agg += "\n";
    }
    write_file(dir / "aggregate.csv", agg);

    for (std::size_t s = 0; s < ns; ++s) {
        const int failed = config.trials - summary.successes[s];
        if (10 * failed > config.trials) summary.within_failure_budget = false;
    }

    json manifest;
    manifest["status"] = summary.within_failure_budget ? "ok" : "failed";
    manifest["task"] = task.name();
    manifest["mode"] = to_string(config.run.mode);
    manifest["trials"] = config.trials;
    manifest["budget"] = config.budget;
    manifest["feature_names"] = task.feature_names();
    manifest["successes"] = json::object();
    for (std::size_t s = 0; s < ns; ++s) manifest["successes"][to_string(config.strategies[s])] = summary.successes[s];
    manifest["trial_results"] = json::array();
    for (const TrialOutcome& trial : summary.trials) {
        json t;
        t["index"] = trial.index;
        t["seed"] = trial.seed;
        t["strategies"] = json::object();
        for (std::size_t s = 0; s < ns; ++s) {
            const StrategyOutcome& so = trial.strategies[s];
            json e;
            e["status"] = so.ok ? "ok" : "failed";
            if (so.ok) {
                e["final_regret"] = so.trace.back();
                if (so.theta) e["theta"] = theta_json(*so.theta);
            } else {
                e["error"] = so.error;
            }
            t["strategies"][to_string(config.strategies[s])] = e;
        }
        manifest["trial_results"].push_back(t);
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_file(dir / "config.json", config.to_json());

    const bool any_success = std::any_of(summary.successes.begin(), summary.successes.end(), [](int n) { return n > 0; });
    if (config.run.mode == ThetaMode::Monotonicity && any_success &&
        (config.runs(Strategy::HyperBO) || config.runs(Strategy::BestThetaRerun))) {
        emit_reports(dir);
    }
    return summary;
}

ReportResult emit_reports(const fs::path& run_dir) {
    ReportResult result;
    std::ifstream cfg_in(run_dir / "config.json");
    std::ifstream man_in(run_dir / "manifest.json");
    if (!cfg_in || !man_in) throw ConfigError("not a run directory (missing config.json or manifest.json): " + run_dir.string());
    std::ostringstream cfg_text;
    cfg_text << cfg_in.rdbuf();
    const ExperimentConfig config = ExperimentConfig::from_json(cfg_text.str());
    if (config.run.mode != ThetaMode::Monotonicity) {
        result.notice = "monotonicity report skipped: run used " + to_string(config.run.mode) + " mode";
        return result;
    }

    json manifest;
    try {
        manifest = json::parse(man_in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("unreadable manifest: ") + e.what());
    }
    std::vector<ModelTheta> thetas;
    for (const json& trial : manifest.at("trial_results")) {
        for (const char* key : {"hyperbo", "best_theta_rerun"}) {
            if (!trial.at("strategies").contains(key)) continue;
            const json& e = trial.at("strategies").at(key);
            if (e.at("status") == "ok" && e.contains("theta")) {
                thetas.push_back({ThetaMode::Monotonicity, e.at("theta").get<std::vector<double>>()});
                break;
            }
        }
    }
    if (thetas.empty()) throw std::runtime_error("monotonicity report: no successful trials to summarize");

    const Task task = build_task(config.task);
    const std::vector<MonotonicityRow> rows = monotonicity_report(thetas, feature_correlations(task), task.feature_names());
    std::string csv = "feature,correlation,mean_theta_plus,mean_theta_minus,net,direction,match\n";
    for (const MonotonicityRow& r : rows) {
        csv += r.feature + "," + format_number(r.correlation) + "," + format_number(r.mean_increasing) + "," +
               format_number(r.mean_decreasing) + "," + format_number(r.net) + "," + to_string(r.direction) + "," +
               (r.matches ? "match" : "mismatch") + "\n";
    }
    result.path = run_dir / "monotonicity_report.csv";
    write_file(result.path, csv);
    result.written = true;
    return result;
}

}  // namespace hyperbo
