#include "hyperbo/gp_mono.hpp"

#include "hyperbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hyperbo {

StrictnessVector::StrictnessVector(std::vector<double> theta) : theta_(std::move(theta)) {
    if (theta_.empty() || theta_.size() % 2 != 0) {
        throw ContractViolation("StrictnessVector: expected two components per dimension");
    }
    for (double t : theta_) {
        if (!(t >= kStrictest && t <= kWeakest)) {
            throw ContractViolation("StrictnessVector: components must lie in [-6, 0]");
        }
    }
    for (std::size_t d = 0; d < theta_.size(); d += 2) {
        if (theta_[d] == kStrictest && theta_[d + 1] == kStrictest) {
            std::ostringstream os;
            os << "StrictnessVector: dimension " << d / 2 << " is strictest in both directions";
            throw ContractViolation(os.str());
        }
    }
}

StrictnessVector StrictnessVector::uniform(Index dim, double value) {
    return StrictnessVector(std::vector<double>(static_cast<std::size_t>(2 * dim), value));
}

double StrictnessVector::nu_decreasing(Index d) const { return std::pow(10.0, decreasing(d)); }
double StrictnessVector::nu_increasing(Index d) const { return std::pow(10.0, increasing(d)); }

DerivativeCovariance derivative_kernels(const Vector& x, const Vector& x_prime, Index g, Index h,
                                        const KernelParams& params) {
    const Index dim = params.dim();
    if (g < 0 || g >= dim || h < 0 || h >= dim) {
        throw ContractViolation("derivative_kernels: dimension index out of range");
    }
    const double k = se_kernel(x, x_prime, params);
    const double lg2 = params.length_scales[g] * params.length_scales[g];
    const double lh2 = params.length_scales[h] * params.length_scales[h];
    const double dg = x[g] - x_prime[g];
    const double dh = x[h] - x_prime[h];
    DerivativeCovariance out;
    out.cov_f_df = k * dg / lg2;
    out.cov_df_df = k * ((g == h ? 1.0 / lg2 : 0.0) - dg * dh / (lg2 * lh2));
    return out;
}

VirtualDerivativeSet::VirtualDerivativeSet(Matrix locations) : locations_(std::move(locations)) {
    if (locations_.cols() < 1) throw ContractViolation("VirtualDerivativeSet: dimension must be >= 1");
    if ((locations_.array() < 0.0).any() || (locations_.array() > 1.0).any()) {
        throw ContractViolation("VirtualDerivativeSet: locations must lie in the unit cube");
    }
}

VirtualDerivativeSet VirtualDerivativeSet::random(Index dim, Rng& rng, int points_per_dimension) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix loc(points_per_dimension * dim, dim);
    for (Index i = 0; i < loc.rows(); ++i) {
        for (Index d = 0; d < dim; ++d) loc(i, d) = unit(rng);
    }
    return VirtualDerivativeSet(std::move(loc));
}

namespace {

Matrix cross_fd(const Matrix& x, const Matrix& locs, const KernelParams& params) {
    const Index dim = params.dim();
    const Matrix k = cross_kernel(x, locs, params);
    Matrix out(x.rows(), locs.rows() * dim);
    for (Index a = 0; a < locs.rows(); ++a) {
        for (Index g = 0; g < dim; ++g) {
            const double lg2 = params.length_scales[g] * params.length_scales[g];
            for (Index i = 0; i < x.rows(); ++i) {
                out(i, a * dim + g) = k(i, a) * (x(i, g) - locs(a, g)) / lg2;
            }
        }
    }
    return out;
}

Matrix gram_dd(const Matrix& locs, const KernelParams& params) {
    const Index dim = params.dim();
    const Index n = locs.rows() * dim;
    const Matrix k = gram_matrix(locs, params);
    const Vector inv_l2 = params.length_scales.array().square().inverse();
    Matrix out(n, n);
    for (Index a = 0; a < locs.rows(); ++a) {
        for (Index b = 0; b <= a; ++b) {
            const Vector diff = (locs.row(a) - locs.row(b)).transpose();
            for (Index g = 0; g < dim; ++g) {
                for (Index h = 0; h < dim; ++h) {
                    const double v = k(a, b) * ((g == h ? inv_l2[g] : 0.0) - diff[g] * diff[h] * inv_l2[g] * inv_l2[h]);
                    out(a * dim + g, b * dim + h) = v;
                    out(b * dim + h, a * dim + g) = v;
                }
            }
        }
    }
    return out;
}

}  // namespace

Matrix function_derivative_covariance(const Matrix& x, const VirtualDerivativeSet& virt, const KernelParams& params) {
    return cross_fd(x, virt.locations(), params);
}

Matrix derivative_gram(const VirtualDerivativeSet& virt, const KernelParams& params) {
    return gram_dd(virt.locations(), params);
}

Matrix joint_prior_covariance(const Matrix& x, const VirtualDerivativeSet& virt, const KernelParams& params) {
    const Index n = x.rows();
    const Index m = virt.latent_count();
    Matrix joint(n + m, n + m);
    joint.topLeftCorner(n, n) = gram_matrix(x, params);
    const Matrix fd = cross_fd(x, virt.locations(), params);
    joint.topRightCorner(n, m) = fd;
    joint.bottomLeftCorner(m, n) = fd.transpose();
    joint.bottomRightCorner(m, m) = gram_dd(virt.locations(), params);
    return joint;
}

double inverse_mills_ratio(double z) {
    if (z > -25.0) {
        const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        return pdf / cdf;
    }
    // Asymptotic Mills-ratio series in the far lower tail.
    const double t = -z;
    const double t2 = t * t;
    const double mills = (1.0 / t) * (1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2));
    return 1.0 / mills;
}

FittedMonotonicGP FittedMonotonicGP::fit(const ObservationSet& data, const KernelParams& params,
                                         const StrictnessVector& strictness, const VirtualDerivativeSet& virt,
                                         const EpOptions& options) {
    if (strictness.dim() != params.dim() || virt.dim() != params.dim()) {
        throw ContractViolation("fit_monotonic_gp: strictness / virtual set dimension mismatch");
    }
    FittedMonotonicGP gp(FittedGP::fit(data, params));
    gp.params_ = params;
    gp.locations_ = virt.locations();

    const Index dim = params.dim();
    const Index m = virt.latent_count();

    const Matrix k_xd = cross_fd(gp.data_gp_.inputs(), gp.locations_, params);
    gp.solved_cross_ = gp.data_gp_.solve(k_xd);
    gp.prior_mean_ = gp.solved_cross_.transpose() * data.output_vector();
    gp.prior_cov_ = gram_dd(gp.locations_, params) - k_xd.transpose() * gp.solved_cross_;
    gp.prior_cov_ = 0.5 * (gp.prior_cov_ + gp.prior_cov_.transpose());

    gp.site_tau_ = Vector::Zero(2 * m);
    gp.site_nu_ = Vector::Zero(2 * m);

    // Probit scale and sign of each site.
    Vector scale(2 * m), sign(2 * m);
    for (Index j = 0; j < m; ++j) {
        const Index g = j % dim;
        scale[2 * j] = strictness.nu_increasing(g);
        sign[2 * j] = 1.0;
        scale[2 * j + 1] = strictness.nu_decreasing(g);
        sign[2 * j + 1] = -1.0;
    }

    gp.refresh_posterior();
    const double step = options.damping;
    for (gp.sweeps_ = 1; gp.sweeps_ <= options.max_sweeps; ++gp.sweeps_) {
        double max_change = 0.0;
        Vector new_tau = gp.site_tau_;
        Vector new_nu = gp.site_nu_;
        for (Index k = 0; k < 2 * m; ++k) {
            const Index j = k / 2;
            const double post_prec = 1.0 / gp.post_var_[j];
            const double cav_tau = post_prec - gp.site_tau_[k];
            if (!(cav_tau > 0.0)) continue;
            const double cav_nu = gp.post_mean_[j] * post_prec - gp.site_nu_[k];
            const double cav_var = 1.0 / cav_tau;
            const double cav_mean = cav_nu * cav_var;

            const double denom2 = scale[k] * scale[k] + cav_var;
            const double denom = std::sqrt(denom2);
            const double z = sign[k] * cav_mean / denom;
            const double r = inverse_mills_ratio(z);
            const double hat_mean = cav_mean + sign[k] * cav_var * r / denom;
            double hat_var = cav_var - cav_var * cav_var * r * (z + r) / denom2;
            hat_var = std::max(hat_var, 1e-14 * cav_var);

            double tau = 1.0 / hat_var - cav_tau;
            double nu = hat_mean / hat_var - cav_nu;
            if (tau < 0.0) {
                tau = 0.0;
                nu = 0.0;
            }
            tau = (1.0 - step) * gp.site_tau_[k] + step * tau;
            nu = (1.0 - step) * gp.site_nu_[k] + step * nu;
            max_change = std::max({max_change, std::abs(tau - gp.site_tau_[k]), std::abs(nu - gp.site_nu_[k])});
            new_tau[k] = tau;
            new_nu[k] = nu;
        }
        gp.site_tau_ = std::move(new_tau);
        gp.site_nu_ = std::move(new_nu);
        gp.refresh_posterior();
        if (max_change < options.tolerance) {
            gp.converged_ = true;
            break;
        }
    }
    if (!gp.converged_) gp.sweeps_ = options.max_sweeps;
    return gp;
}

void FittedMonotonicGP::refresh_posterior() {
    const Index m = prior_cov_.rows();
    Vector tau(m), nu(m);
    for (Index j = 0; j < m; ++j) {
        tau[j] = site_tau_[2 * j] + site_tau_[2 * j + 1];
        nu[j] = site_nu_[2 * j] + site_nu_[2 * j + 1];
    }
    sqrt_tau_ = tau.cwiseSqrt();

    const Matrix sc = sqrt_tau_.asDiagonal() * prior_cov_;  // S^{1/2} C
    Matrix b = sc * sqrt_tau_.asDiagonal();
    b.diagonal().array() += 1.0;
    b_llt_ = factorize_with_jitter(b, 1e-10, 1e-4).llt;

    const Vector w = nu - tau.cwiseProduct(prior_mean_);
    const Vector cw = prior_cov_ * w;
    correction_ = w - sqrt_tau_.cwiseProduct(b_llt_.solve(sqrt_tau_.cwiseProduct(cw)));
    post_mean_ = prior_mean_ + prior_cov_ * correction_;

    const Matrix v = b_llt_.matrixL().solve(sc);
    post_var_ = prior_cov_.diagonal() - v.colwise().squaredNorm().transpose();
    post_var_ = post_var_.cwiseMax(1e-12);
}

PosteriorPrediction FittedMonotonicGP::predict(const Vector& x) const {
    if (x.size() != dim()) throw ContractViolation("monotonic gp predict: dimension mismatch");
    Vector mean, variance;
    predict_batch(x.transpose(), mean, variance);
    return {mean[0], variance[0]};
}

void FittedMonotonicGP::predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const {
    const Matrix k_xs = cross_kernel(data_gp_.inputs(), xs, params_);  // n x q
    const Matrix k_ds = cross_fd(xs, locations_, params_).transpose();  // m x q
    const Matrix c_ds = k_ds - solved_cross_.transpose() * k_xs;       // Cov[df, f* | y]

    mean = k_xs.transpose() * data_gp_.weights() + c_ds.transpose() * correction_;

    const Matrix v_x = data_gp_.half_solve(k_xs);
    const Matrix v_d = b_llt_.matrixL().solve(sqrt_tau_.asDiagonal() * c_ds);
    const double sf2 = params_.signal_variance;
    variance = (sf2 - v_x.colwise().squaredNorm().array() - v_d.colwise().squaredNorm().array()).matrix().transpose();
    variance = variance.cwiseMax(0.0).cwiseMin(sf2);
}

}  // namespace hyperbo
