#pragma once

#include "hyperbo/acquisition.hpp"
#include "hyperbo/gp_mono.hpp"
#include "hyperbo/model_space.hpp"
#include "hyperbo/tasks.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace hyperbo {

/// How T in the score denominator is counted.
enum class TConvention {
    Cumulative,  // inner samples acquired since trial start, at window end
    PerWindow    // outer iteration + inner step index (t_O + K at window end)
};

struct RunConfig {
    ThetaMode mode = ThetaMode::LengthScale;
    int m = 5;  // windows with random theta
    int K = 5;  // inner iterations per window
    int R = 5;  // total windows
    std::optional<double> lambda;
    std::uint64_t seed = 0;
    TConvention t_convention = TConvention::Cumulative;

    // Inner GP on standardized outputs. `length_scale` is the fixed kernel
    // scale of monotonic models and of the standard-BO baseline.
    double length_scale = 0.3;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;
    double ucb_delta = 0.1;

    int virtual_points_per_dim = VirtualDerivativeSet::kPointsPerDimension;
    EpOptions ep;

    // Thompson sampling over the model grid.
    std::uint64_t thompson_exact_limit = 2000;
    std::size_t thompson_subset = 500;

    /// Throws ContractViolation on an inconsistent configuration.
    void validate() const;
    double effective_lambda(Index dim) const;
};

struct ScoreRecord {
    ModelTheta theta;
    double score = 0.0;
    long window_start_T = 0;  // samples acquired before the window
    double window_gain = 0.0; // standardized f+ - y+
};

/// Append-only record of every completed scoring window.
class ScoreLedger {
public:
    void append(ScoreRecord record) { records_.push_back(std::move(record)); }
    const std::vector<ScoreRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Highest score; the earliest window wins ties.
    const ScoreRecord& best() const;

private:
    std::vector<ScoreRecord> records_;
};

/// Mutable state of one trial's inner BO: data, candidate mask, the fixed
/// virtual derivative locations and the trial's random streams.
class RunState {
public:
    RunState(const Task& task, const RunConfig& config);

    const ObservationSet& data() const { return data_; }
    const CandidateSet& candidates() const { return candidates_; }
    const std::vector<Index>& initial_rows() const { return initial_rows_; }
    const std::vector<Index>& sampled_rows() const { return sampled_rows_; }
    const VirtualDerivativeSet& virtual_set() const { return virtual_set_; }

    /// Samples acquired since trial start (excludes the initial design).
    long acquired() const { return static_cast<long>(sampled_rows_.size()); }
    bool exhausted() const { return candidates_.available() == 0; }

    /// Simple regret after the initial design and after every acquisition.
    const std::vector<double>& regret_trace() const { return regret_; }

    /// Queries `row`, appends the observation and extends the regret trace.
    void acquire(const Task& task, Index row);

    Rng& model_rng() { return model_rng_; }
    Rng& thompson_rng() { return thompson_rng_; }
    Rng& subsample_rng() { return subsample_rng_; }

private:
    ObservationSet data_;
    CandidateSet candidates_;
    std::vector<Index> initial_rows_;
    std::vector<Index> sampled_rows_;
    VirtualDerivativeSet virtual_set_;
    std::vector<double> regret_;
    double best_true_;
    Rng model_rng_;
    Rng thompson_rng_;
    Rng subsample_rng_;
    Rng noise_rng_;
};

/// Surrogate for theta fitted on the standardized current data, reporting
/// predictions in original output units.
std::unique_ptr<Surrogate> build_surrogate(const RunState& state, const ModelTheta& theta, const RunConfig& config);

/// One GP-UCB acquisition with theta held fixed. Throws ExhaustedSearchSpace.
void inner_step(const Task& task, RunState& state, const ModelTheta& theta, const RunConfig& config);

struct WindowResult {
    double score = 0.0;
    double gain = 0.0;  // standardized by the data at window start
    long T = 0;         // value used in the denominator
    int steps = 0;
    bool exhausted = false;
};

/// K inner steps with theta, then the regularized regret-normalized score.
/// `outer_iteration` is t_O (1-based), used by the PerWindow convention.
WindowResult model_score_window(const Task& task, RunState& state, const ModelTheta& theta, int K,
                                int outer_iteration, const RunConfig& config);

/// Fits the theta-space GP to the ledger (unit-scaled theta, standardized
/// scores) and Thompson-samples one of `candidates`; returns its position.
std::size_t thompson_over_thetas(const ScoreLedger& ledger, const std::vector<ModelTheta>& candidates,
                                 const ModelSpace& space, Rng& thompson_rng);

/// Thompson-sampled next theta from a GP fitted to the ledger, over the full
/// grid or, for large grids, a random subset plus the incumbent.
ModelTheta hyperbo_step(const ScoreLedger& ledger, const ModelSpace& space, Rng& thompson_rng, Rng& subsample_rng,
                        const RunConfig& config);

struct RunResult {
    Vector best_x;
    double best_y = 0.0;
    ModelTheta best_theta;
    ScoreLedger ledger;
    std::vector<double> regret_trace;
    std::vector<Index> initial_rows;
    std::vector<Index> sampled_rows;
    bool exhausted = false;
};

/// Random-theta warm-up windows, then HyperBO-selected windows up to R.
RunResult run_framework(const Task& task, const RunConfig& config);

/// Plain inner BO for `budget` acquisitions with theta fixed; theta must be
/// a valid grid point.
RunResult rerun_with_best_theta(const Task& task, const ModelTheta& theta_star, long budget, const RunConfig& config);

/// Same loop without the grid check, used for the fixed-kernel baseline.
RunResult run_fixed_theta(const Task& task, const ModelTheta& theta, long budget, const RunConfig& config);

/// Fixed default kernel (config.length_scale on every axis, no monotonicity).
ModelTheta standard_bo_theta(Index dim, const RunConfig& config);

}  // namespace hyperbo
