#include "hyperbo/tasks.hpp"

#include "hyperbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hyperbo {

ColumnScaling ColumnScaling::fit(const Matrix& raw) {
    ColumnScaling s;
    s.min = raw.colwise().minCoeff().transpose();
    s.range = raw.colwise().maxCoeff().transpose() - s.min;
    return s;
}

Matrix ColumnScaling::normalize(const Matrix& raw) const {
    Matrix out(raw.rows(), raw.cols());
    for (Index c = 0; c < raw.cols(); ++c) {
        if (range[c] > 0.0) {
            out.col(c) = ((raw.col(c).array() - min[c]) / range[c]).cwiseMax(0.0).cwiseMin(1.0).matrix();
        } else {
            out.col(c).setZero();
        }
    }
    return out;
}

Matrix ColumnScaling::denormalize(const Matrix& unit) const {
    Matrix out(unit.rows(), unit.cols());
    for (Index c = 0; c < unit.cols(); ++c) out.col(c) = (unit.col(c).array() * range[c] + min[c]).matrix();
    return out;
}

Task::Task(std::string name, TaskKind kind, Matrix inputs, Vector values, std::vector<std::string> feature_names,
           InitialDesign design, std::size_t initial_size)
    : name_(std::move(name)),
      kind_(kind),
      inputs_(std::move(inputs)),
      values_(std::move(values)),
      feature_names_(std::move(feature_names)),
      design_(design),
      initial_size_(initial_size) {
    if (inputs_.rows() == 0) throw ContractViolation("Task: no rows");
    if (inputs_.rows() != values_.size()) throw ContractViolation("Task: input / value row count mismatch");
    if ((inputs_.array() < 0.0).any() || (inputs_.array() > 1.0).any()) {
        throw ContractViolation("Task: inputs must be normalized to [0,1]");
    }
    if (initial_size_ < 1 || initial_size_ > static_cast<std::size_t>(inputs_.rows())) {
        throw ContractViolation("Task: initial design size must be in [1, rows]");
    }
    if (feature_names_.empty()) {
        for (Index d = 0; d < dim(); ++d) feature_names_.push_back("x" + std::to_string(d + 1));
    }
    if (static_cast<Index>(feature_names_.size()) != dim()) {
        throw ContractViolation("Task: one feature name per input column is required");
    }
    optimum_ = values_.maxCoeff();
}

void Task::set_noise_std(double sd) {
    if (!(sd >= 0.0)) throw ContractViolation("Task: noise std must be non-negative");
    noise_std_ = sd;
}

std::vector<Index> Task::initial_design(Rng& rng) const {
    const Index n = static_cast<Index>(initial_size_);
    std::vector<Index> rows;
    rows.reserve(initial_size_);
    std::vector<char> used(static_cast<std::size_t>(size()), 0);

    if (design_ == InitialDesign::RandomRows) {
        std::uniform_int_distribution<Index> pick(0, size() - 1);
        while (static_cast<Index>(rows.size()) < n) {
            const Index r = pick(rng);
            if (used[static_cast<std::size_t>(r)]) continue;
            used[static_cast<std::size_t>(r)] = 1;
            rows.push_back(r);
        }
        return rows;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix lhs(n, dim());
    for (Index d = 0; d < dim(); ++d) {
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (Index i = 0; i < n; ++i) lhs(i, d) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + unit(rng)) / static_cast<double>(n);
    }
    for (Index i = 0; i < n; ++i) {
        Index best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (Index r = 0; r < size(); ++r) {
            if (used[static_cast<std::size_t>(r)]) continue;
            const double d2 = (inputs_.row(r) - lhs.row(i)).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = r;
            }
        }
        used[static_cast<std::size_t>(best)] = 1;
        rows.push_back(best);
    }
    return rows;
}

double Task::observe(Index row, Rng& noise_rng) const {
    if (row < 0 || row >= size()) throw ContractViolation("Task::observe: row out of range");
    if (noise_std_ == 0.0) return values_[row];
    std::normal_distribution<double> noise(0.0, noise_std_);
    return values_[row] + noise(noise_rng);
}

double goldstein_price_native(double x1, double x2) {
    const double s = x1 + x2 + 1.0;
    const double a = 1.0 + s * s * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
    const double t = 2.0 * x1 - 3.0 * x2;
    const double b = 30.0 + t * t * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
    return a * b;
}

double goldstein_price(const Vector& unit_x) {
    if (unit_x.size() != 2) throw ContractViolation("goldstein_price: expects a 2-vector");
    return goldstein_price_native(-2.0 + 4.0 * unit_x[0], -2.0 + 4.0 * unit_x[1]);
}

Matrix unit_grid(Index dim, int points_per_dim) {
    if (dim < 1 || points_per_dim < 2) throw ContractViolation("unit_grid: need dim >= 1 and >= 2 points per axis");
    Index total = 1;
    for (Index d = 0; d < dim; ++d) total *= points_per_dim;
    Matrix grid(total, dim);
    for (Index i = 0; i < total; ++i) {
        Index rest = i;
        for (Index d = 0; d < dim; ++d) {
            grid(i, d) = static_cast<double>(rest % points_per_dim) / static_cast<double>(points_per_dim - 1);
            rest /= points_per_dim;
        }
    }
    return grid;
}

Task make_goldstein_price_task(int points_per_dim) {
    Matrix grid = unit_grid(2, points_per_dim);
    Vector values(grid.rows());
    for (Index i = 0; i < grid.rows(); ++i) values[i] = goldstein_price(grid.row(i).transpose());
    return Task("goldstein_price", TaskKind::Synthetic, std::move(grid), std::move(values), {"x1", "x2"},
                InitialDesign::LatinHypercube, 6);
}

Task make_gp_sample_task(Index dim, double length_scale, int points_per_dim, std::uint64_t seed) {
    Matrix grid = unit_grid(dim, points_per_dim);
    const KernelParams params = KernelParams::isotropic(dim, length_scale, 1.0, 0.0);
    const JitteredCholesky chol = factorize_with_jitter(gram_matrix(grid, params), 1e-10, 1e-4);
    Rng rng = make_stream(seed, Stream::Task);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(grid.rows());
    for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    Vector values = chol.llt.matrixL() * z;
    return Task("gp_sample", TaskKind::Synthetic, std::move(grid), std::move(values), {}, InitialDesign::LatinHypercube,
                static_cast<std::size_t>(3 * dim));
}

bool is_valid_regret_trace(const std::vector<double>& trace) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!(trace[i] >= 0.0)) return false;
        if (i > 0 && trace[i] > trace[i - 1]) return false;
    }
    return true;
}

}  // namespace hyperbo
