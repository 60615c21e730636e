#pragma once

#include <cstdint>
#include <random>

namespace hyperbo {

using Rng = std::mt19937_64;

/// Independent random streams derived from one trial seed. Each consumer of
/// randomness gets its own stream so that e.g. the initial design does not
/// depend on which strategy is run afterwards.
enum class Stream : std::uint32_t {
    InitialDesign = 1,
    VirtualPoints = 2,
    ModelDraws = 3,
    Thompson = 4,
    Task = 5,
    Noise = 6,
    Subsample = 7,
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

}  // namespace hyperbo
