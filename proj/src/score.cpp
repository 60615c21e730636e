#include "hyperbo/score.hpp"

#include "hyperbo/errors.hpp"

#include <cmath>

namespace hyperbo {

double score_denominator(long total_iterations, Index dim) {
    if (total_iterations < 2) throw ContractViolation("score: T must be >= 2 so that ln T > 0");
    if (dim < 1) throw ContractViolation("score: dimension must be >= 1");
    const double t = static_cast<double>(total_iterations);
    return std::sqrt(std::pow(std::log(t), static_cast<double>(dim + 1)) / t);
}

double default_lambda(ThetaMode mode, Index dim) {
    if (dim < 1) throw ContractViolation("default_lambda: dimension must be >= 1");
    const double d = static_cast<double>(dim);
    return mode == ThetaMode::LengthScale ? 1.0 / (0.6 * d) : 1.0 / (2.0 * 6.0 * d);
}

double score_model(double y_plus, double f_plus, long total_iterations, Index dim, const ModelTheta& theta,
                   double lambda) {
    const double denom = score_denominator(total_iterations, dim);
    if (f_plus < y_plus) throw ContractViolation("score: best-so-far decreased within a window");
    const double base = (f_plus - y_plus) / denom;
    const double reg = lambda * theta.norm();
    return theta.mode == ThetaMode::LengthScale ? base * (1.0 - reg) : base * (1.0 + reg);
}

}  // namespace hyperbo
