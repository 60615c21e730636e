#pragma once

#include "hyperbo/gp.hpp"
#include "hyperbo/rng.hpp"

#include <vector>

namespace hyperbo {

/// Discrete candidates (rows of `points`) with an exclusion mask for points
/// that were already sampled.
class CandidateSet {
public:
    explicit CandidateSet(Matrix points);

    const Matrix& points() const { return points_; }
    Index size() const { return points_.rows(); }
    Index dim() const { return points_.cols(); }

    void exclude(Index i);
    bool excluded(Index i) const { return excluded_[static_cast<std::size_t>(i)] != 0; }
    Index available() const { return size() - n_excluded_; }
    std::vector<Index> available_indices() const;

private:
    Matrix points_;
    std::vector<char> excluded_;
    Index n_excluded_ = 0;
};

struct Selection {
    Index index = -1;
    Vector point;
};

/// argmax of mean + sqrt(beta) * sd over non-excluded entries, lowest index
/// on ties. `excluded` may be empty (nothing excluded).
Index ucb_argmax(const Vector& mean, const Vector& variance, const std::vector<char>& excluded, double beta);

Selection ucb_select(const Surrogate& model, const CandidateSet& candidates, double beta);

/// GP-UCB schedule 2 log(n t^2 pi^2 / (6 delta)).
double ucb_beta(long t, Index n_candidates, double delta = 0.1);

/// One joint posterior draw (mean + L z, L from Cholesky of cov + 1e-9 I)
/// and its argmax (lowest index on ties).
Index thompson_argmax(const Vector& mean, const Matrix& covariance, Rng& rng);

Selection thompson_select(const FittedGP& model, const CandidateSet& candidates, Rng& rng);

}  // namespace hyperbo
