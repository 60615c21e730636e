#include "hyperbo/stats.hpp"

#include "hyperbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyperbo {

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ContractViolation("pearson_correlation: columns differ in length");
    if (x.size() < 2) throw ContractViolation("pearson_correlation: at least two rows are required");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ContractViolation("pearson_correlation: undefined for a constant column");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw ContractViolation("mean: empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double standard_error(const std::vector<double>& v) {
    return sample_std(v) / std::sqrt(static_cast<double>(v.size()));
}

std::string to_string(NetDirection d) {
    switch (d) {
        case NetDirection::Increasing: return "increasing";
        case NetDirection::Decreasing: return "decreasing";
        case NetDirection::None: return "none";
    }
    return "none";
}

std::vector<MonotonicityRow> monotonicity_report(const std::vector<ModelTheta>& best_thetas,
                                                 const std::vector<double>& correlations,
                                                 const std::vector<std::string>& feature_names) {
    if (best_thetas.empty()) throw ContractViolation("monotonicity_report: no trial results");
    const std::size_t dim = correlations.size();
    for (const ModelTheta& t : best_thetas) {
        if (t.mode != ThetaMode::Monotonicity || t.values.size() != 2 * dim) {
            throw ContractViolation("monotonicity_report: theta is not a monotonicity vector of matching dimension");
        }
    }
    std::vector<MonotonicityRow> rows(dim);
    const double n = static_cast<double>(best_thetas.size());
    for (std::size_t d = 0; d < dim; ++d) {
        MonotonicityRow& row = rows[d];
        row.feature = d < feature_names.size() ? feature_names[d] : "x" + std::to_string(d + 1);
        row.correlation = correlations[d];
        for (const ModelTheta& t : best_thetas) {
            row.mean_decreasing += t.values[2 * d] / n;
            row.mean_increasing += t.values[2 * d + 1] / n;
        }
        row.net = row.mean_decreasing - row.mean_increasing;
        if (std::abs(row.net) < 1e-12) {
            row.direction = NetDirection::None;
        } else {
            row.direction = row.net > 0.0 ? NetDirection::Increasing : NetDirection::Decreasing;
        }
        row.matches = (row.direction == NetDirection::Increasing && row.correlation > 0.0) ||
                      (row.direction == NetDirection::Decreasing && row.correlation < 0.0);
    }
    return rows;
}

}  // namespace hyperbo
