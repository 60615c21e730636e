#include "hyperbo/acquisition.hpp"

#include "hyperbo/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hyperbo {

CandidateSet::CandidateSet(Matrix points)
    : points_(std::move(points)), excluded_(static_cast<std::size_t>(points_.rows()), 0) {}

void CandidateSet::exclude(Index i) {
    if (i < 0 || i >= size()) throw ContractViolation("CandidateSet::exclude: index out of range");
    if (!excluded_[static_cast<std::size_t>(i)]) {
        excluded_[static_cast<std::size_t>(i)] = 1;
        ++n_excluded_;
    }
}

std::vector<Index> CandidateSet::available_indices() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(available()));
    for (Index i = 0; i < size(); ++i) {
        if (!excluded(i)) out.push_back(i);
    }
    return out;
}

Index ucb_argmax(const Vector& mean, const Vector& variance, const std::vector<char>& excluded, double beta) {
    if (!(beta >= 0.0)) throw ContractViolation("ucb: beta must be non-negative");
    const double sqrt_beta = std::sqrt(beta);
    Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < mean.size(); ++i) {
        if (!excluded.empty() && excluded[static_cast<std::size_t>(i)]) continue;
        const double score = mean[i] + sqrt_beta * std::sqrt(std::max(variance[i], 0.0));
        if (best < 0 || score > best_score) {
            best = i;
            best_score = score;
        }
    }
    if (best < 0) throw ExhaustedSearchSpace("ucb_select: no candidate left");
    return best;
}

Selection ucb_select(const Surrogate& model, const CandidateSet& candidates, double beta) {
    if (candidates.available() == 0) throw ExhaustedSearchSpace("ucb_select: no candidate left");
    const std::vector<Index> idx = candidates.available_indices();
    Matrix pts(static_cast<Index>(idx.size()), candidates.dim());
    for (std::size_t k = 0; k < idx.size(); ++k) pts.row(static_cast<Index>(k)) = candidates.points().row(idx[k]);
    Vector mean, variance;
    model.predict_batch(pts, mean, variance);
    const Index k = ucb_argmax(mean, variance, {}, beta);
    return {idx[static_cast<std::size_t>(k)], candidates.points().row(idx[static_cast<std::size_t>(k)]).transpose()};
}

double ucb_beta(long t, Index n_candidates, double delta) {
    if (t < 1) throw ContractViolation("ucb_beta: t must be >= 1");
    if (n_candidates < 1) throw ContractViolation("ucb_beta: need at least one candidate");
    if (!(delta > 0.0)) throw ContractViolation("ucb_beta: delta must be positive");
    const double td = static_cast<double>(t);
    return 2.0 * std::log(static_cast<double>(n_candidates) * td * td * std::numbers::pi * std::numbers::pi /
                          (6.0 * delta));
}

Index thompson_argmax(const Vector& mean, const Matrix& covariance, Rng& rng) {
    if (mean.size() == 0) throw ExhaustedSearchSpace("thompson_select: no candidate left");
    Matrix cov = covariance;
    cov.diagonal().array() += 1e-9;
    const JitteredCholesky chol = factorize_with_jitter(cov, 1e-8, 1e-4);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(mean.size());
    for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    const Vector draw = mean + chol.llt.matrixL() * z;
    Index best = 0;
    for (Index i = 1; i < draw.size(); ++i) {
        if (draw[i] > draw[best]) best = i;
    }
    return best;
}

Selection thompson_select(const FittedGP& model, const CandidateSet& candidates, Rng& rng) {
    if (candidates.available() == 0) throw ExhaustedSearchSpace("thompson_select: no candidate left");
    const std::vector<Index> idx = candidates.available_indices();
    Matrix pts(static_cast<Index>(idx.size()), candidates.dim());
    for (std::size_t k = 0; k < idx.size(); ++k) pts.row(static_cast<Index>(k)) = candidates.points().row(idx[k]);
    Vector mean, variance;
    model.predict_batch(pts, mean, variance);
    const Matrix cov = model.posterior_covariance(pts);
    const Index k = thompson_argmax(mean, cov, rng);
    return {idx[static_cast<std::size_t>(k)], candidates.points().row(idx[static_cast<std::size_t>(k)]).transpose()};
}

}  // namespace hyperbo
