#pragma once

#include "hyperbo/gp.hpp"
#include "hyperbo/rng.hpp"

#include <vector>

namespace hyperbo {

/// Per-dimension, per-direction monotonicity strictness in log10 space.
/// Layout is [theta_1^-, theta_1^+, theta_2^-, theta_2^+, ...]; the probit
/// scale for each direction is nu = 10^theta. A dimension may not carry the
/// strictest value (-6) in both directions at once.
class StrictnessVector {
public:
    static constexpr double kStrictest = -6.0;
    static constexpr double kWeakest = 0.0;

    explicit StrictnessVector(std::vector<double> theta);

    /// Same value for every component.
    static StrictnessVector uniform(Index dim, double value);

    Index dim() const { return static_cast<Index>(theta_.size() / 2); }
    const std::vector<double>& values() const { return theta_; }

    double decreasing(Index d) const { return theta_[static_cast<std::size_t>(2 * d)]; }
    double increasing(Index d) const { return theta_[static_cast<std::size_t>(2 * d + 1)]; }
    double nu_decreasing(Index d) const;
    double nu_increasing(Index d) const;

private:
    std::vector<double> theta_;
};

struct DerivativeCovariance {
    double cov_f_df = 0.0;   // cov(f(x), df(x')/dx'_g)
    double cov_df_df = 0.0;  // cov(df(x)/dx_g, df(x')/dx'_h)
};

DerivativeCovariance derivative_kernels(const Vector& x, const Vector& x_prime, Index g, Index h,
                                        const KernelParams& params);

/// Locations where derivative sign information is injected. Each location
/// carries one latent partial derivative per input dimension; latent index
/// is `location * dim + dimension`.
class VirtualDerivativeSet {
public:
    static constexpr int kPointsPerDimension = 5;

    explicit VirtualDerivativeSet(Matrix locations);

    /// kPointsPerDimension * dim locations drawn uniformly in the unit cube.
    static VirtualDerivativeSet random(Index dim, Rng& rng, int points_per_dimension = kPointsPerDimension);

    Index dim() const { return locations_.cols(); }
    Index location_count() const { return locations_.rows(); }
    Index latent_count() const { return locations_.rows() * locations_.cols(); }
    const Matrix& locations() const { return locations_; }

private:
    Matrix locations_;
};

/// cov(f(x_i), df(z_a)/dz_g) for every input row and every derivative latent.
Matrix function_derivative_covariance(const Matrix& x, const VirtualDerivativeSet& virt, const KernelParams& params);

/// cov(df(z_a)/dz_g, df(z_b)/dz_h) over all derivative latents.
Matrix derivative_gram(const VirtualDerivativeSet& virt, const KernelParams& params);

/// Prior covariance of [f(X); df(Z)] (function block first).
Matrix joint_prior_covariance(const Matrix& x, const VirtualDerivativeSet& virt, const KernelParams& params);

/// Standard normal pdf over cdf, stable far into the lower tail.
double inverse_mills_ratio(double z);

struct EpOptions {
    double damping = 0.8;  // step size toward the freshly matched site
    int max_sweeps = 100;
    double tolerance = 1e-4;
};

/// GP over function values plus virtual derivative latents. Every derivative
/// latent carries two probit factors, Phi(df / nu^+) and Phi(-df / nu^-),
/// approximated by Gaussian sites with damped parallel expectation
/// propagation. Observations enter exactly through Gaussian conditioning.
class FittedMonotonicGP : public Surrogate {
public:
    static FittedMonotonicGP fit(const ObservationSet& data, const KernelParams& params,
                                 const StrictnessVector& strictness, const VirtualDerivativeSet& virt,
                                 const EpOptions& options = {});

    Index dim() const override { return data_gp_.dim(); }
    PosteriorPrediction predict(const Vector& x) const override;
    void predict_batch(const Matrix& xs, Vector& mean, Vector& variance) const override;

    bool converged() const { return converged_; }
    /// Set when EP hit max_sweeps; the last damped iterate is kept.
    bool convergence_warning() const { return !converged_; }
    int sweeps() const { return sweeps_; }

    /// Approximate posterior mean / variance of each derivative latent.
    const Vector& derivative_mean() const { return post_mean_; }
    const Vector& derivative_variance() const { return post_var_; }

    const FittedGP& data_gp() const { return data_gp_; }

private:
    FittedMonotonicGP(FittedGP data_gp) : data_gp_(std::move(data_gp)) {}

    void refresh_posterior();

    FittedGP data_gp_;
    KernelParams params_;
    Matrix locations_;

    Matrix solved_cross_;  // (K_XX + sigma_n^2 I)^{-1} K_XD
    Vector prior_mean_;    // E[df | y]
    Matrix prior_cov_;     // Cov[df | y]

    // Sites: index 2j is the increasing factor of latent j, 2j+1 the decreasing.
    Vector site_tau_;
    Vector site_nu_;

    Vector sqrt_tau_;
    Eigen::LLT<Matrix> b_llt_;
    Vector correction_;  // C^{-1} (mu_post - prior_mean)
    Vector post_mean_;
    Vector post_var_;

    bool converged_ = false;
    int sweeps_ = 0;
};

}  // namespace hyperbo
