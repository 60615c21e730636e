#include "hyperbo/engine.hpp"

#include "hyperbo/errors.hpp"
#include "hyperbo/score.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace hyperbo {

void RunConfig::validate() const {
    if (m < 1) throw ContractViolation("RunConfig: m must be >= 1");
    if (K < 1) throw ContractViolation("RunConfig: K must be >= 1");
    if (R < m) throw ContractViolation("RunConfig: R must be >= m");
    if (lambda && !(*lambda >= 0.0)) throw ContractViolation("RunConfig: lambda must be non-negative");
    if (!(length_scale > 0.0) || !(signal_variance > 0.0) || !(noise_variance >= 0.0)) {
        throw ContractViolation("RunConfig: invalid kernel settings");
    }
    if (!(ucb_delta > 0.0)) throw ContractViolation("RunConfig: ucb_delta must be positive");
    if (virtual_points_per_dim < 1) throw ContractViolation("RunConfig: virtual_points_per_dim must be >= 1");
    if (thompson_subset < 1) throw ContractViolation("RunConfig: thompson_subset must be >= 1");
}

double RunConfig::effective_lambda(Index dim) const { return lambda ? *lambda : default_lambda(mode, dim); }

const ScoreRecord& ScoreLedger::best() const {
    if (records_.empty()) throw ContractViolation("ScoreLedger::best: ledger is empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records_.size(); ++i) {
        if (records_[i].score > records_[best].score) best = i;
    }
    return records_[best];
}

RunState::RunState(const Task& task, const RunConfig& config)
    : data_(task.dim()),
      candidates_(task.inputs()),
      virtual_set_([&] {
          Rng rng = make_stream(config.seed, Stream::VirtualPoints);
          return VirtualDerivativeSet::random(task.dim(), rng, config.virtual_points_per_dim);
      }()),
      best_true_(-std::numeric_limits<double>::infinity()),
      model_rng_(make_stream(config.seed, Stream::ModelDraws)),
      thompson_rng_(make_stream(config.seed, Stream::Thompson)),
      subsample_rng_(make_stream(config.seed, Stream::Subsample)),
      noise_rng_(make_stream(config.seed, Stream::Noise)) {
    Rng design_rng = make_stream(config.seed, Stream::InitialDesign);
    initial_rows_ = task.initial_design(design_rng);
    for (Index row : initial_rows_) {
        candidates_.exclude(row);
        data_.add(task.inputs().row(row).transpose(), task.observe(row, noise_rng_));
        best_true_ = std::max(best_true_, task.value(row));
    }
    regret_.push_back(task.optimum() - best_true_);
}

void RunState::acquire(const Task& task, Index row) {
    if (candidates_.excluded(row)) throw ContractViolation("RunState::acquire: row already sampled");
    candidates_.exclude(row);
    sampled_rows_.push_back(row);
    data_.add(task.inputs().row(row).transpose(), task.observe(row, noise_rng_));
    best_true_ = std::max(best_true_, task.value(row));
    regret_.push_back(task.optimum() - best_true_);
}

std::unique_ptr<Surrogate> build_surrogate(const RunState& state, const ModelTheta& theta, const RunConfig& config) {
    const ObservationSet& data = state.data();
    const OutputStandardizer standardizer = OutputStandardizer::from(data.output_vector());
    ObservationSet standardized(data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        standardized.add(data.input(i), standardizer.to_standard(data.output(i)));
    }

    std::unique_ptr<Surrogate> inner;
    if (theta.mode == ThetaMode::LengthScale) {
        KernelParams params;
        params.signal_variance = config.signal_variance;
        params.noise_variance = config.noise_variance;
        params.length_scales = theta.as_vector();
        inner = std::make_unique<FittedGP>(FittedGP::fit(standardized, params));
    } else {
        const KernelParams params = KernelParams::isotropic(data.dim(), config.length_scale, config.signal_variance,
                                                            config.noise_variance);
        inner = std::make_unique<FittedMonotonicGP>(FittedMonotonicGP::fit(
            standardized, params, StrictnessVector(theta.values), state.virtual_set(), config.ep));
    }
    return std::make_unique<DestandardizedSurrogate>(std::move(inner), standardizer);
}

void inner_step(const Task& task, RunState& state, const ModelTheta& theta, const RunConfig& config) {
    if (state.exhausted()) throw ExhaustedSearchSpace("inner BO: every candidate has been sampled");
    const std::unique_ptr<Surrogate> model = build_surrogate(state, theta, config);
    const double beta = ucb_beta(state.acquired() + 1, state.candidates().available(), config.ucb_delta);
    const Selection pick = ucb_select(*model, state.candidates(), beta);
    state.acquire(task, pick.index);
}

WindowResult model_score_window(const Task& task, RunState& state, const ModelTheta& theta, int K,
                                int outer_iteration, const RunConfig& config) {
    if (K < 1) throw ContractViolation("model_score_window: K must be >= 1");
    validate_theta(theta, task.dim());

    const OutputStandardizer standardizer = OutputStandardizer::from(state.data().output_vector());
    const double y_plus = state.data().best_output();

    WindowResult out;
    for (int i = 0; i < K; ++i) {
        try {
            inner_step(task, state, theta, config);
        } catch (const ExhaustedSearchSpace&) {
            out.exhausted = true;
            break;
        }
        ++out.steps;
    }
    if (state.exhausted()) out.exhausted = true;

    const double f_plus = state.data().best_output();
    out.gain = (f_plus - y_plus) / standardizer.scale;
    out.T = config.t_convention == TConvention::Cumulative ? state.acquired() : outer_iteration + out.steps;
    out.score = score_model(standardizer.to_standard(y_plus), standardizer.to_standard(f_plus), std::max(out.T, 2L),
                            task.dim(), theta, config.effective_lambda(task.dim()));
    return out;
}

std::size_t thompson_over_thetas(const ScoreLedger& ledger, const std::vector<ModelTheta>& candidates,
                                 const ModelSpace& space, Rng& thompson_rng) {
    if (ledger.empty()) throw ContractViolation("hyperbo_step: ledger has no records");
    if (candidates.empty()) throw ExhaustedSearchSpace("hyperbo_step: no model candidates");
    const double lo = space.coordinate_min();
    const double span = space.coordinate_max() - lo;
    auto to_unit = [&](const ModelTheta& t) { return Vector((t.as_vector().array() - lo) / span); };

    Vector scores(static_cast<Index>(ledger.size()));
    for (std::size_t i = 0; i < ledger.size(); ++i) scores[static_cast<Index>(i)] = ledger.records()[i].score;
    const OutputStandardizer standardizer = OutputStandardizer::from(scores);
    const Vector standardized = standardizer.to_standard(scores);
    const double spread = (standardized.array() - standardized.mean()).square().mean();

    ObservationSet model_data(space.theta_dim());
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        model_data.add(to_unit(ledger.records()[i].theta), standardized[static_cast<Index>(i)]);
    }
    // 20% of each coordinate's range, in unit coordinates.
    const KernelParams params = KernelParams::isotropic(space.theta_dim(), 0.2, std::max(spread, 1e-6), 1e-4);
    const FittedGP theta_gp = FittedGP::fit(model_data, params);

    Matrix unit_rows(static_cast<Index>(candidates.size()), space.theta_dim());
    for (std::size_t i = 0; i < candidates.size(); ++i) unit_rows.row(static_cast<Index>(i)) = to_unit(candidates[i]).transpose();
    const Selection pick = thompson_select(theta_gp, CandidateSet(unit_rows), thompson_rng);
    return static_cast<std::size_t>(pick.index);
}

ModelTheta hyperbo_step(const ScoreLedger& ledger, const ModelSpace& space, Rng& thompson_rng, Rng& subsample_rng,
                        const RunConfig& config) {
    if (ledger.empty()) throw ContractViolation("hyperbo_step: ledger has no records");
    std::vector<std::uint64_t> indices;
    if (space.size() <= config.thompson_exact_limit) {
        indices.resize(static_cast<std::size_t>(space.size()));
        for (std::uint64_t i = 0; i < space.size(); ++i) indices[static_cast<std::size_t>(i)] = i;
    } else {
        const std::uint64_t incumbent = *space.index_of(ledger.best().theta);
        std::unordered_set<std::uint64_t> seen{incumbent};
        indices.push_back(incumbent);
        std::uniform_int_distribution<std::uint64_t> pick(0, space.size() - 1);
        while (indices.size() < config.thompson_subset + 1) {
            const std::uint64_t i = pick(subsample_rng);
            if (seen.insert(i).second) indices.push_back(i);
        }
        // Keep candidate order independent of hash-set iteration.
        std::sort(indices.begin(), indices.end());
    }

    std::vector<ModelTheta> candidates;
    candidates.reserve(indices.size());
    for (std::uint64_t i : indices) candidates.push_back(space.at(i));
    return candidates[thompson_over_thetas(ledger, candidates, space, thompson_rng)];
}

namespace {

RunResult finish(const RunState& state, ScoreLedger ledger, bool exhausted) {
    RunResult out;
    const std::size_t best = state.data().best_index();
    out.best_x = state.data().input(best);
    out.best_y = state.data().output(best);
    if (!ledger.empty()) out.best_theta = ledger.best().theta;
    out.ledger = std::move(ledger);
    out.regret_trace = state.regret_trace();
    out.initial_rows = state.initial_rows();
    out.sampled_rows = state.sampled_rows();
    out.exhausted = exhausted;
    return out;
}

}  // namespace

RunResult run_framework(const Task& task, const RunConfig& config) {
    config.validate();
    RunState state(task, config);
    const ModelSpace space = ModelSpace::build(config.mode, task.dim());
    ScoreLedger ledger;
    bool exhausted = false;

    std::uniform_int_distribution<std::uint64_t> random_model(0, space.size() - 1);
    for (int t_outer = 1; t_outer <= config.R && !exhausted; ++t_outer) {
        const long start = state.acquired();
        ModelTheta theta = t_outer <= config.m
                               ? space.at(random_model(state.model_rng()))
                               : hyperbo_step(ledger, space, state.thompson_rng(), state.subsample_rng(), config);
        const WindowResult window = model_score_window(task, state, theta, config.K, t_outer, config);
        ledger.append({std::move(theta), window.score, start, window.gain});
        exhausted = window.exhausted;
    }
    return finish(state, std::move(ledger), exhausted);
}

RunResult run_fixed_theta(const Task& task, const ModelTheta& theta, long budget, const RunConfig& config) {
    if (budget < 0) throw ContractViolation("fixed-theta run: budget must be >= 0");
    RunState state(task, config);
    bool exhausted = false;
    for (long i = 0; i < budget; ++i) {
        try {
            inner_step(task, state, theta, config);
        } catch (const ExhaustedSearchSpace&) {
            exhausted = true;
            break;
        }
    }
    RunResult out = finish(state, ScoreLedger{}, exhausted || state.exhausted());
    out.best_theta = theta;
    return out;
}

RunResult rerun_with_best_theta(const Task& task, const ModelTheta& theta_star, long budget, const RunConfig& config) {
    validate_theta(theta_star, task.dim());
    return run_fixed_theta(task, theta_star, budget, config);
}

ModelTheta standard_bo_theta(Index dim, const RunConfig& config) {
    return ModelTheta{ThetaMode::LengthScale, std::vector<double>(static_cast<std::size_t>(dim), config.length_scale)};
}

}  // namespace hyperbo
