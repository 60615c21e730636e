#pragma once

#include "hyperbo/gp.hpp"
#include "hyperbo/rng.hpp"

#include <string>
#include <vector>

namespace hyperbo {

enum class TaskKind { Synthetic, Dataset };

enum class InitialDesign {
    RandomRows,     // n0 distinct rows uniformly at random
    LatinHypercube  // Latin-hypercube points snapped to the nearest unused row
};

/// Per-column min-max map between raw feature values and the unit interval.
struct ColumnScaling {
    Vector min;
    Vector range;  // zero for constant columns

    static ColumnScaling fit(const Matrix& raw);
    Matrix normalize(const Matrix& raw) const;
    Matrix denormalize(const Matrix& unit) const;
};

/// A maximization task over a finite set of rows in [0,1]^d. Synthetic
/// functions are evaluated on a grid; datasets are looked up by row. Either
/// way the known optimum is the best retained value, so regret is >= 0.
class Task {
public:
    Task(std::string name, TaskKind kind, Matrix inputs, Vector values, std::vector<std::string> feature_names,
         InitialDesign design, std::size_t initial_size);

    const std::string& name() const { return name_; }
    TaskKind kind() const { return kind_; }
    Index dim() const { return inputs_.cols(); }
    Index size() const { return inputs_.rows(); }
    const Matrix& inputs() const { return inputs_; }
    const Vector& values() const { return values_; }
    double value(Index row) const { return values_[row]; }
    double optimum() const { return optimum_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    std::size_t initial_size() const { return initial_size_; }
    InitialDesign initial_design_kind() const { return design_; }

    /// Gaussian noise added to observations (regret always uses true values).
    void set_noise_std(double sd);
    double noise_std() const { return noise_std_; }

    /// Distinct rows forming the initial design D0.
    std::vector<Index> initial_design(Rng& rng) const;

    /// Observed value at `row` (true value plus optional noise).
    double observe(Index row, Rng& noise_rng) const;

    void set_scaling(ColumnScaling scaling) { scaling_ = std::move(scaling); }
    const ColumnScaling& scaling() const { return scaling_; }

private:
    std::string name_;
    TaskKind kind_;
    Matrix inputs_;
    Vector values_;
    std::vector<std::string> feature_names_;
    InitialDesign design_;
    std::size_t initial_size_;
    double optimum_;
    double noise_std_ = 0.0;
    ColumnScaling scaling_;
};

/// Standard Goldstein-Price function on its native domain.
double goldstein_price_native(double x1, double x2);

/// Goldstein-Price at a unit-square point mapped affinely onto [-2,2]^2.
double goldstein_price(const Vector& unit_x);

/// Regular grid with `points_per_dim` nodes per axis, endpoints included.
Matrix unit_grid(Index dim, int points_per_dim);

/// Goldstein-Price maximization over a grid; initial design of 3d
/// Latin-hypercube points.
Task make_goldstein_price_task(int points_per_dim = 41);

/// A single draw from a zero-mean SE GP (unit signal variance) on a grid.
Task make_gp_sample_task(Index dim, double length_scale, int points_per_dim, std::uint64_t seed);

/// r_t >= 0 and non-increasing.
bool is_valid_regret_trace(const std::vector<double>& trace);

}  // namespace hyperbo
