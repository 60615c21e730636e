#pragma once

#include "hyperbo/gp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyperbo {

enum class ThetaMode { LengthScale, Monotonicity };

std::string to_string(ThetaMode mode);
/// Accepts "length_scale" / "monotonicity"; ConfigError otherwise.
ThetaMode parse_theta_mode(const std::string& text);

/// A point in model space: per-dimension length scales, or a strictness
/// vector laid out [theta_1^-, theta_1^+, ...] in log10 units.
struct ModelTheta {
    ThetaMode mode = ThetaMode::LengthScale;
    std::vector<double> values;

    double norm() const;
    Vector as_vector() const;

    bool operator==(const ModelTheta&) const = default;
};

/// Throws ContractViolation unless `theta` is a valid on-grid point for an
/// input dimension of `dim`.
void validate_theta(const ModelTheta& theta, Index dim);

/// Discretized model space, enumerated lazily by mixed-radix index so that
/// grids far too large to materialize (11^8, 48^10) are still addressable.
class ModelSpace {
public:
    static constexpr int kLengthScaleSteps = 11;  // 0.10, 0.15, ..., 0.60
    static constexpr int kStrictnessLevels = 7;   // -6, ..., 0
    static constexpr int kStrictnessPairs = kStrictnessLevels * kStrictnessLevels - 1;

    static ModelSpace build(ThetaMode mode, Index dim);

    ThetaMode mode() const { return mode_; }
    Index input_dim() const { return dim_; }
    Index theta_dim() const { return mode_ == ThetaMode::LengthScale ? dim_ : 2 * dim_; }

    std::uint64_t size() const { return size_; }
    ModelTheta at(std::uint64_t index) const;
    std::optional<std::uint64_t> index_of(const ModelTheta& theta) const;
    bool contains(const ModelTheta& theta) const { return index_of(theta).has_value(); }

    /// Rows are the theta vectors of the requested indices.
    Matrix materialize(const std::vector<std::uint64_t>& indices) const;

    /// Range of every theta coordinate (identical across coordinates).
    double coordinate_min() const;
    double coordinate_max() const;

    static double length_scale_value(int step) { return (2 + step) / 20.0; }

private:
    ModelSpace(ThetaMode mode, Index dim, std::uint64_t size) : mode_(mode), dim_(dim), size_(size) {}

    ThetaMode mode_;
    Index dim_;
    std::uint64_t size_;
};

}  // namespace hyperbo
