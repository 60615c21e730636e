#include "hyperbo/model_space.hpp"

#include "hyperbo/errors.hpp"
#include "hyperbo/gp_mono.hpp"

#include <cmath>
#include <limits>

namespace hyperbo {

std::string to_string(ThetaMode mode) {
    return mode == ThetaMode::LengthScale ? "length_scale" : "monotonicity";
}

ThetaMode parse_theta_mode(const std::string& text) {
    if (text == "length_scale") return ThetaMode::LengthScale;
    if (text == "monotonicity") return ThetaMode::Monotonicity;
    throw ConfigError("unknown mode '" + text + "' (expected length_scale or monotonicity)");
}

double ModelTheta::norm() const { return as_vector().norm(); }

Vector ModelTheta::as_vector() const {
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

namespace {

// Pair index in [0, 48) <-> (theta^-, theta^+), skipping (-6, -6).
void decode_pair(std::uint64_t pair, double& neg, double& pos) {
    const std::uint64_t q = pair + 1;
    neg = static_cast<double>(q / ModelSpace::kStrictnessLevels) - 6.0;
    pos = static_cast<double>(q % ModelSpace::kStrictnessLevels) - 6.0;
}

std::optional<std::uint64_t> encode_pair(double neg, double pos) {
    const double qn = neg + 6.0;
    const double qp = pos + 6.0;
    if (qn != std::floor(qn) || qp != std::floor(qp)) return std::nullopt;
    if (qn < 0 || qn > 6 || qp < 0 || qp > 6) return std::nullopt;
    const auto q = static_cast<std::uint64_t>(qn) * ModelSpace::kStrictnessLevels + static_cast<std::uint64_t>(qp);
    if (q == 0) return std::nullopt;
    return q - 1;
}

std::optional<std::uint64_t> encode_length_scale(double v) {
    const double k = std::round(v * 20.0) - 2.0;
    if (k < 0 || k >= ModelSpace::kLengthScaleSteps) return std::nullopt;
    if (ModelSpace::length_scale_value(static_cast<int>(k)) != v) return std::nullopt;
    return static_cast<std::uint64_t>(k);
}

}  // namespace

void validate_theta(const ModelTheta& theta, Index dim) {
    const ModelSpace space = ModelSpace::build(theta.mode, dim);
    if (static_cast<Index>(theta.values.size()) != space.theta_dim()) {
        throw ContractViolation("theta has the wrong number of components for mode " + to_string(theta.mode));
    }
    if (theta.mode == ThetaMode::Monotonicity) StrictnessVector{theta.values};
    if (!space.contains(theta)) {
        throw ContractViolation("theta is not a point of the " + to_string(theta.mode) + " grid");
    }
}

ModelSpace ModelSpace::build(ThetaMode mode, Index dim) {
    if (dim < 1) throw ContractViolation("build_model_space: dimension must be >= 1");
    const std::uint64_t radix = mode == ThetaMode::LengthScale ? kLengthScaleSteps : kStrictnessPairs;
    std::uint64_t size = 1;
    for (Index d = 0; d < dim; ++d) {
        if (size > std::numeric_limits<std::uint64_t>::max() / radix) {
            throw ContractViolation("build_model_space: grid too large to index");
        }
        size *= radix;
    }
    return ModelSpace(mode, dim, size);
}

ModelTheta ModelSpace::at(std::uint64_t index) const {
    if (index >= size_) throw ContractViolation("ModelSpace::at: index out of range");
    ModelTheta theta;
    theta.mode = mode_;
    if (mode_ == ThetaMode::LengthScale) {
        theta.values.resize(static_cast<std::size_t>(dim_));
        for (Index d = 0; d < dim_; ++d) {
            theta.values[static_cast<std::size_t>(d)] = length_scale_value(static_cast<int>(index % kLengthScaleSteps));
            index /= kLengthScaleSteps;
        }
    } else {
        theta.values.resize(static_cast<std::size_t>(2 * dim_));
        for (Index d = 0; d < dim_; ++d) {
            double neg = 0, pos = 0;
            decode_pair(index % kStrictnessPairs, neg, pos);
            theta.values[static_cast<std::size_t>(2 * d)] = neg;
            theta.values[static_cast<std::size_t>(2 * d + 1)] = pos;
            index /= kStrictnessPairs;
        }
    }
    return theta;
}

std::optional<std::uint64_t> ModelSpace::index_of(const ModelTheta& theta) const {
    if (theta.mode != mode_ || static_cast<Index>(theta.values.size()) != theta_dim()) return std::nullopt;
    std::uint64_t index = 0;
    std::uint64_t weight = 1;
    for (Index d = 0; d < dim_; ++d) {
        std::optional<std::uint64_t> digit;
        std::uint64_t radix = 0;
        if (mode_ == ThetaMode::LengthScale) {
            digit = encode_length_scale(theta.values[static_cast<std::size_t>(d)]);
            radix = kLengthScaleSteps;
        } else {
            digit = encode_pair(theta.values[static_cast<std::size_t>(2 * d)],
                                theta.values[static_cast<std::size_t>(2 * d + 1)]);
            radix = kStrictnessPairs;
        }
        if (!digit) return std::nullopt;
        index += *digit * weight;
        weight *= radix;
    }
    return index;
}

Matrix ModelSpace::materialize(const std::vector<std::uint64_t>& indices) const {
    Matrix rows(static_cast<Index>(indices.size()), theta_dim());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        rows.row(static_cast<Index>(i)) = at(indices[i]).as_vector().transpose();
    }
    return rows;
}

double ModelSpace::coordinate_min() const {
    return mode_ == ThetaMode::LengthScale ? length_scale_value(0) : StrictnessVector::kStrictest;
}

double ModelSpace::coordinate_max() const {
    return mode_ == ThetaMode::LengthScale ? length_scale_value(kLengthScaleSteps - 1) : StrictnessVector::kWeakest;
}

}  // namespace hyperbo
