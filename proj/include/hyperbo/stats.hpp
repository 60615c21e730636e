#pragma once

#include "hyperbo/model_space.hpp"

#include <string>
#include <vector>

namespace hyperbo {

/// Throws ContractViolation for fewer than two rows or a constant column.
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
/// Unbiased (n-1) sample standard deviation; 0 for a single value.
double sample_std(const std::vector<double>& v);
/// sample_std / sqrt(n).
double standard_error(const std::vector<double>& v);

enum class NetDirection { Increasing, Decreasing, None };
std::string to_string(NetDirection d);

struct MonotonicityRow {
    std::string feature;
    double correlation = 0.0;
    double mean_increasing = 0.0;  // mean theta^+
    double mean_decreasing = 0.0;  // mean theta^-
    double net = 0.0;              // mean theta^- minus mean theta^+
    NetDirection direction = NetDirection::None;
    bool matches = false;
};

/// Averages each trial's best monotonicity theta and compares the implied
/// direction with the sign of the feature/target correlation. A dimension
/// whose theta^+ is stricter (more negative) than theta^- reads "increasing".
std::vector<MonotonicityRow> monotonicity_report(const std::vector<ModelTheta>& best_thetas,
                                                 const std::vector<double>& correlations,
                                                 const std::vector<std::string>& feature_names = {});

}  // namespace hyperbo
