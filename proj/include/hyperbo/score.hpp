#pragma once

#include "hyperbo/model_space.hpp"

namespace hyperbo {

/// sqrt((ln T)^(d+1) / T), the shape of the GP-UCB average-regret bound.
/// Requires T >= 2 so that ln T > 0.
double score_denominator(long total_iterations, Index dim);

/// 1 / (0.6 d) for length scales, 1 / (2 * 6 * d) for monotonicity.
double default_lambda(ThetaMode mode, Index dim);

/// Regret-normalized window gain with the mode's regularizer:
/// length scale multiplies by (1 - lambda ||theta||), monotonicity by
/// (1 + lambda ||theta||).
double score_model(double y_plus, double f_plus, long total_iterations, Index dim, const ModelTheta& theta,
                   double lambda);

}  // namespace hyperbo
