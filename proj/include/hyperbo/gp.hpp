#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <vector>

namespace hyperbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Hyperparameters of the squared-exponential ARD kernel plus the Gaussian
/// observation noise. Length scales are in normalized-input units.
struct KernelParams {
    double signal_variance = 1.0;
    Vector length_scales;
    double noise_variance = 1e-6;

    Index dim() const { return length_scales.size(); }

    /// Throws ContractViolation unless all scales and variances are admissible.
    void validate() const;

    static KernelParams isotropic(Index dim, double length_scale, double signal_variance = 1.0,
                                  double noise_variance = 1e-6);
};

/// sigma_f^2 * exp(-0.5 * sum_d (a_d - b_d)^2 / l_d^2)
double se_kernel(const Vector& a, const Vector& b, const KernelParams& params);

/// Kernel between every row of `a` and every row of `b`.
Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelParams& params);

/// Symmetric Gram matrix over the rows of `x`. Only the lower triangle is
/// evaluated; the upper triangle is a copy, so the result is exactly symmetric.
Matrix gram_matrix(const Matrix& x, const KernelParams& params);

/// Inner-BO dataset. Inputs live in the unit cube; this is checked on insert.
class ObservationSet {
public:
    explicit ObservationSet(Index dim);

    void add(const Vector& x, double y);

    Index dim() const { return dim_; }
    std::size_t size() const { return outputs_.size(); }
    bool empty() const { return outputs_.empty(); }

    const Vector& input(std::size_t i) const { return inputs_[i]; }
    double output(std::size_t i) const { return outputs_[i]; }

    /// Inputs stacked as rows.
    Matrix input_matrix() const;
    Vector output_vector() const;

    /// Largest observed output; ContractViolation when empty.
    double best_output() const;
    std::size_t best_index() const;

private:
    Index dim_;
    std::vector<Vector> inputs_;
    std::vector<double> outputs_;
};

struct PosteriorPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Cholesky factor obtained after (possibly) adding diagonal jitter.
struct JitteredCholesky {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;
};

/// Factorizes `a`, escalating the added diagonal from `first_jitter` by x10
/// up to `last_jitter` (both absolute) after a plain attempt fails. Throws
/// SingularGramError carrying `last_jitter` when every attempt fails.
JitteredCholesky factorize_with_jitter(const Matrix& a, double first_jitter, double last_jitter);

/// Common read interface of every fitted surrogate used by the acquisitions.
class Surrogate {
public:
    virtual ~Surrogate() = default;

    virtual Index dim() const = 0;
    virtual PosteriorPrediction predict(const Vector& x) const = 0;

    /// Predictions at every row of `xs`. The default loops over predict().
    virtual void predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const;
};

/// Exact GP posterior. Immutable after fit(); concurrent reads are safe.
class FittedGP : public Surrogate {
public:
    /// Factorizes K + sigma_n^2 I with the jitter ladder
    /// 1e-10 sigma_f^2 ... 1e-4 sigma_f^2. With sigma_n^2 == 0, repeated inputs
    /// make the Gram rank-deficient by construction and are rejected up front.
    static FittedGP fit(const ObservationSet& data, const KernelParams& params);

    Index dim() const override { return params_.dim(); }
    PosteriorPrediction predict(const Vector& x) const override;
    void predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const override;

    /// Full posterior covariance over the rows of `xs` (not clamped).
    Matrix posterior_covariance(const Matrix& xs) const;

    const KernelParams& params() const { return params_; }
    const Matrix& inputs() const { return inputs_; }
    const Matrix& gram() const { return gram_; }
    /// (K + sigma_n^2 I)^{-1} y
    const Vector& weights() const { return weights_; }
    double jitter() const { return jitter_; }

    /// Solves (K + sigma_n^2 I + jitter I) z = rhs with the cached factor.
    Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }
    /// L^{-1} rhs for the cached lower factor.
    Matrix half_solve(const Matrix& rhs) const;

private:
    FittedGP() = default;

    KernelParams params_;
    Matrix inputs_;
    Matrix gram_;
    Eigen::LLT<Matrix> llt_;
    Vector weights_;
    double jitter_ = 0.0;
};

/// Affine map to zero mean / unit variance. A constant series keeps scale 1.
struct OutputStandardizer {
    double mean = 0.0;
    double scale = 1.0;

    static OutputStandardizer from(const Vector& y);

    double to_standard(double y) const { return (y - mean) / scale; }
    double from_standard(double z) const { return z * scale + mean; }
    Vector to_standard(const Vector& y) const { return (y.array() - mean) / scale; }
};

/// Exposes a surrogate fitted on standardized outputs in original units.
class DestandardizedSurrogate : public Surrogate {
public:
    DestandardizedSurrogate(std::unique_ptr<Surrogate> inner, OutputStandardizer standardizer);

    Index dim() const override { return inner_->dim(); }
    PosteriorPrediction predict(const Vector& x) const override;
    void predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const override;

    const Surrogate& inner() const { return *inner_; }
    const OutputStandardizer& standardizer() const { return standardizer_; }

private:
    std::unique_ptr<Surrogate> inner_;
    OutputStandardizer standardizer_;
};

}  // namespace hyperbo
