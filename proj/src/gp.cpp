#include "hyperbo/gp.hpp"

#include "hyperbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyperbo {

void KernelParams::validate() const {
    if (!(signal_variance > 0.0)) {
        throw ContractViolation("KernelParams: signal_variance must be positive");
    }
    if (!(noise_variance >= 0.0)) {
        throw ContractViolation("KernelParams: noise_variance must be non-negative");
    }
    if (length_scales.size() == 0) {
        throw ContractViolation("KernelParams: at least one length scale is required");
    }
    for (Index d = 0; d < length_scales.size(); ++d) {
        if (!(length_scales[d] > 0.0)) {
            throw ContractViolation("KernelParams: length scales must be positive");
        }
    }
}

KernelParams KernelParams::isotropic(Index dim, double length_scale, double signal_variance,
                                     double noise_variance) {
    KernelParams p;
    p.signal_variance = signal_variance;
    p.length_scales = Vector::Constant(dim, length_scale);
    p.noise_variance = noise_variance;
    return p;
}

namespace {

void check_dim(Index got, Index want, const char* where) {
    if (got != want) {
        std::ostringstream os;
        os << where << ": dimension mismatch (" << got << " vs " << want << ")";
        throw ContractViolation(os.str());
    }
}

}  // namespace

double se_kernel(const Vector& a, const Vector& b, const KernelParams& params) {
    check_dim(a.size(), params.dim(), "se_kernel");
    check_dim(b.size(), params.dim(), "se_kernel");
    const double r2 = ((a - b).array() / params.length_scales.array()).square().sum();
    return params.signal_variance * std::exp(-0.5 * r2);
}

Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelParams& params) {
    check_dim(a.cols(), params.dim(), "cross_kernel");
    check_dim(b.cols(), params.dim(), "cross_kernel");
    const Eigen::RowVectorXd inv_l = params.length_scales.cwiseInverse().transpose();
    const Matrix as = a.array().rowwise() * inv_l.array();
    const Matrix bs = b.array().rowwise() * inv_l.array();
    Matrix k(a.rows(), b.rows());
    for (Index j = 0; j < b.rows(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            k(i, j) = (as.row(i) - bs.row(j)).squaredNorm();
        }
    }
    return (params.signal_variance * (-0.5 * k.array()).exp()).matrix();
}

Matrix gram_matrix(const Matrix& x, const KernelParams& params) {
    check_dim(x.cols(), params.dim(), "gram_matrix");
    const Eigen::RowVectorXd inv_l = params.length_scales.cwiseInverse().transpose();
    const Matrix xs = x.array().rowwise() * inv_l.array();
    const Index n = x.rows();
    Matrix k(n, n);
    for (Index j = 0; j < n; ++j) {
        k(j, j) = params.signal_variance;
        for (Index i = j + 1; i < n; ++i) {
            const double v = params.signal_variance * std::exp(-0.5 * (xs.row(i) - xs.row(j)).squaredNorm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

ObservationSet::ObservationSet(Index dim) : dim_(dim) {
    if (dim < 1) throw ContractViolation("ObservationSet: dimension must be >= 1");
}

void ObservationSet::add(const Vector& x, double y) {
    check_dim(x.size(), dim_, "ObservationSet::add");
    for (Index d = 0; d < x.size(); ++d) {
        if (!(x[d] >= 0.0 && x[d] <= 1.0)) {
            throw ContractViolation("ObservationSet::add: input coordinate outside [0,1]");
        }
    }
    if (!std::isfinite(y)) throw ContractViolation("ObservationSet::add: non-finite output");
    inputs_.push_back(x);
    outputs_.push_back(y);
}

Matrix ObservationSet::input_matrix() const {
    Matrix m(static_cast<Index>(inputs_.size()), dim_);
    for (std::size_t i = 0; i < inputs_.size(); ++i) m.row(static_cast<Index>(i)) = inputs_[i].transpose();
    return m;
}

Vector ObservationSet::output_vector() const {
    return Eigen::Map<const Vector>(outputs_.data(), static_cast<Index>(outputs_.size()));
}

std::size_t ObservationSet::best_index() const {
    if (outputs_.empty()) throw ContractViolation("ObservationSet: no observations");
    return static_cast<std::size_t>(std::max_element(outputs_.begin(), outputs_.end()) - outputs_.begin());
}

double ObservationSet::best_output() const { return outputs_[best_index()]; }

JitteredCholesky factorize_with_jitter(const Matrix& a, double first_jitter, double last_jitter) {
    JitteredCholesky out;
    out.llt.compute(a);
    if (out.llt.info() == Eigen::Success) return out;
    for (double jitter = first_jitter; jitter <= last_jitter * (1.0 + 1e-9); jitter *= 10.0) {
        Matrix aj = a;
        aj.diagonal().array() += jitter;
        out.llt.compute(aj);
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jitter;
            return out;
        }
    }
    std::ostringstream os;
    os << "Cholesky factorization failed after jitter " << last_jitter;
    throw SingularGramError(os.str(), last_jitter);
}

void Surrogate::predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const {
    mean.resize(xs.rows());
    variance.resize(xs.rows());
    for (Index i = 0; i < xs.rows(); ++i) {
        const PosteriorPrediction p = predict(xs.row(i).transpose());
        mean[i] = p.mean;
        variance[i] = p.variance;
    }
}

FittedGP FittedGP::fit(const ObservationSet& data, const KernelParams& params) {
    params.validate();
    if (data.empty()) throw ContractViolation("gp_fit: at least one observation is required");
    check_dim(data.dim(), params.dim(), "gp_fit");

    FittedGP gp;
    gp.params_ = params;
    gp.inputs_ = data.input_matrix();
    gp.gram_ = gram_matrix(gp.inputs_, params);

    const double sf2 = params.signal_variance;
    if (params.noise_variance == 0.0) {
        const Index n = gp.inputs_.rows();
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (gp.inputs_.row(i) == gp.inputs_.row(j)) {
                    throw SingularGramError("gp_fit: repeated input with zero noise variance", 0.0);
                }
            }
        }
    }

    Matrix a = gp.gram_;
    a.diagonal().array() += params.noise_variance;
    JitteredCholesky chol = factorize_with_jitter(a, 1e-10 * sf2, 1e-4 * sf2);
    gp.llt_ = std::move(chol.llt);
    gp.jitter_ = chol.jitter;
    gp.weights_ = gp.llt_.solve(data.output_vector());
    return gp;
}

Matrix FittedGP::half_solve(const Matrix& rhs) const { return llt_.matrixL().solve(rhs); }

PosteriorPrediction FittedGP::predict(const Vector& x) const {
    check_dim(x.size(), dim(), "gp_predict");
    Vector mean, variance;
    predict_batch(x.transpose(), mean, variance);
    return {mean[0], variance[0]};
}

void FittedGP::predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const {
    const Matrix ks = cross_kernel(inputs_, xs, params_);  // n x m
    mean = ks.transpose() * weights_;
    const Matrix v = half_solve(ks);
    const double sf2 = params_.signal_variance;
    variance = (sf2 - v.colwise().squaredNorm().array()).matrix().transpose();
    variance = variance.cwiseMax(0.0).cwiseMin(sf2);
}

Matrix FittedGP::posterior_covariance(const Matrix& xs) const {
    const Matrix ks = cross_kernel(inputs_, xs, params_);
    const Matrix v = half_solve(ks);
    Matrix cov = gram_matrix(xs, params_) - v.transpose() * v;
    // symmetrize round-off
    return 0.5 * (cov + cov.transpose());
}

OutputStandardizer OutputStandardizer::from(const Vector& y) {
    OutputStandardizer s;
    if (y.size() == 0) return s;
    s.mean = y.mean();
    const double var = (y.array() - s.mean).square().mean();
    const double sd = std::sqrt(var);
    s.scale = sd > 1e-12 * std::max(1.0, std::abs(s.mean)) ? sd : 1.0;
    return s;
}

DestandardizedSurrogate::DestandardizedSurrogate(std::unique_ptr<Surrogate> inner,
                                                 OutputStandardizer standardizer)
    : inner_(std::move(inner)), standardizer_(standardizer) {}

PosteriorPrediction DestandardizedSurrogate::predict(const Vector& x) const {
    PosteriorPrediction p = inner_->predict(x);
    p.mean = standardizer_.from_standard(p.mean);
    p.variance *= standardizer_.scale * standardizer_.scale;
    return p;
}

void DestandardizedSurrogate::predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const {
    inner_->predict_batch(xs, mean, variance);
    mean = (mean.array() * standardizer_.scale + standardizer_.mean).matrix();
    variance *= standardizer_.scale * standardizer_.scale;
}

}  // namespace hyperbo
