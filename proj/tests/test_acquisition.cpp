#include "doctest.h"
#include "oracles.hpp"

#include "hyperbo/acquisition.hpp"
#include "hyperbo/errors.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>

using namespace hyperbo;

namespace {

// Surrogate returning tabulated moments keyed by the first input coordinate.
class TableSurrogate : public Surrogate {
public:
    TableSurrogate(Vector mean, Vector var) : mean_(std::move(mean)), var_(std::move(var)) {}
    Index dim() const override { return 1; }
    PosteriorPrediction predict(const Vector& x) const override {
        const auto i = static_cast<Index>(std::lround(x[0]));
        return {mean_[i], var_[i]};
    }

private:
    Vector mean_, var_;
};

Matrix index_points(Index n) {
    Matrix m(n, 1);
    for (Index i = 0; i < n; ++i) m(i, 0) = static_cast<double>(i);
    return m;
}

// Eigendecomposition sampler with its own 32-bit generator and Box-Muller normals.
std::array<double, 3> monte_carlo_frequencies(const Vector& mean, const Matrix& cov, int draws) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::mt19937 gen(424242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<double, 3> freq{0, 0, 0};
    for (int n = 0; n < draws; ++n) {
        Vector z(3);
        for (int i = 0; i < 3; ++i) {
            const double u1 = 1.0 - u(gen), u2 = u(gen);
            z[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
        const Vector s = mean + root * z;
        Index best = 0;
        for (Index i = 1; i < 3; ++i)
            if (s[i] > s[best]) best = i;
        freq[static_cast<std::size_t>(best)] += 1.0 / draws;
    }
    return freq;
}

}  // namespace

TEST_CASE("ucb picks the hand-computed winner") {
    const TableSurrogate model(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.01));
    const Selection s = ucb_select(model, CandidateSet(index_points(2)), 4.0);
    CHECK(s.index == 1);
}

TEST_CASE("ucb ties go to the lowest index") {
    const TableSurrogate model(Vector::Constant(5, 0.3), Vector::Constant(5, 0.2));
    CHECK(ucb_select(model, CandidateSet(index_points(5)), 2.0).index == 0);
    CandidateSet c(index_points(5));
    c.exclude(0);
    c.exclude(1);
    CHECK(ucb_select(model, c, 2.0).index == 2);
}

TEST_CASE("ucb with beta zero is the greedy mean argmax") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector mean = oracle::normal_vector(12, rng);
        const Vector var = oracle::uniform_matrix(12, 1, rng).col(0);
        Index greedy = 0;
        for (Index i = 1; i < 12; ++i)
            if (mean[i] > mean[greedy]) greedy = i;
        CHECK(ucb_select(TableSurrogate(mean, var), CandidateSet(index_points(12)), 0.0).index == greedy);
    }
}

TEST_CASE("ucb is invariant to positive affine rescaling") {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector mean = oracle::normal_vector(9, rng);
        const Vector sd = oracle::uniform_matrix(9, 1, rng).col(0);
        const double a = 0.1 + 10.0 * oracle::uniform_matrix(1, 1, rng)(0, 0);
        const double b = oracle::normal_vector(1, rng)[0] * 100.0;
        const Index base = ucb_argmax(mean, sd.cwiseAbs2(), {}, 3.0);
        const Vector m2 = (a * mean.array() + b).matrix();
        const Vector v2 = (a * sd).cwiseAbs2();
        CHECK(ucb_argmax(m2, v2, {}, 3.0) == base);
    }
}

TEST_CASE("selectors never return excluded candidates") {
    std::mt19937_64 rng(33);
    Rng draw_rng(1);
    for (int rep = 0; rep < 30; ++rep) {
        const Vector mean = oracle::normal_vector(8, rng);
        CandidateSet c(index_points(8));
        for (Index i = 0; i < 8; ++i)
            if (mean[i] > 0.0 && c.available() > 1) c.exclude(i);
        const Selection s = ucb_select(TableSurrogate(mean, Vector::Constant(8, 0.1)), c, 2.0);
        CHECK_FALSE(c.excluded(s.index));

        const Matrix pts = oracle::uniform_matrix(8, 1, rng);
        ObservationSet data(1);
        data.add(pts.row(0).transpose(), 1.0);
        const FittedGP gp = FittedGP::fit(data, KernelParams::isotropic(1, 0.2));
        CandidateSet tc(pts);
        for (Index i = 0; i < 8; i += 2) tc.exclude(i);
        const Selection t = thompson_select(gp, tc, draw_rng);
        CHECK_FALSE(tc.excluded(t.index));
    }
}

TEST_CASE("empty candidate sets are exhausted") {
    CandidateSet c(index_points(2));
    c.exclude(0);
    c.exclude(1);
    CHECK(c.available() == 0);
    CHECK_THROWS_AS(ucb_select(TableSurrogate(Vector::Zero(2), Vector::Zero(2)), c, 1.0), ExhaustedSearchSpace);
    ObservationSet data(1);
    data.add(Vector::Constant(1, 0.5), 1.0);
    Rng rng(1);
    CHECK_THROWS_AS(thompson_select(FittedGP::fit(data, KernelParams::isotropic(1, 0.2)), c, rng), ExhaustedSearchSpace);
}

TEST_CASE("ucb beta schedule") {
    CHECK(ucb_beta(1, 1, std::numbers::pi * std::numbers::pi / 6.0) == doctest::Approx(0.0));
    CHECK(ucb_beta(1, 100, 0.1) == doctest::Approx(2.0 * std::log(100.0 * std::numbers::pi * std::numbers::pi / 0.6)));
    CHECK(ucb_beta(1, 100, 0.1) == doctest::Approx(14.81).epsilon(1e-3));
    for (long t = 1; t < 1000; ++t) CHECK(ucb_beta(t + 1, 50) >= ucb_beta(t, 50));
    CHECK_THROWS_AS(ucb_beta(0, 10), ContractViolation);
}

TEST_CASE("thompson with vanishing variance picks the larger mean") {
    Rng rng(41);
    const Vector mean = Eigen::Vector2d(1.0, 0.0);
    const Matrix cov = Eigen::Vector2d(1e-12, 1e-12).asDiagonal();
    int first = 0;
    for (int n = 0; n < 1000; ++n) first += thompson_argmax(mean, cov, rng) == 0;
    CHECK(first / 1000.0 >= 0.999);
}

TEST_CASE("thompson on a symmetric posterior is balanced") {
    Rng rng(42);
    const Vector mean = Eigen::Vector2d(0.5, 0.5);
    const Matrix cov = Matrix::Identity(2, 2);
    int first = 0;
    for (int n = 0; n < 10000; ++n) first += thompson_argmax(mean, cov, rng) == 0;
    CHECK(first / 10000.0 >= 0.45);
    CHECK(first / 10000.0 <= 0.55);
}

TEST_CASE("thompson frequencies match an independent Monte Carlo sampler") {
    const Vector mean = Eigen::Vector3d(0.0, 0.3, 0.1);
    Matrix cov(3, 3);
    cov << 1.0, 0.3, -0.2,  //
        0.3, 0.5, 0.1,      //
        -0.2, 0.1, 0.8;
    const int draws = 100000;
    const std::array<double, 3> expected = monte_carlo_frequencies(mean, cov, draws);
    Rng rng(43);
    std::array<double, 3> got{0, 0, 0};
    for (int n = 0; n < draws; ++n) got[static_cast<std::size_t>(thompson_argmax(mean, cov, rng))] += 1.0 / draws;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - expected[i]) <= 0.03);
}

TEST_CASE("thompson is bit-reproducible for a fixed seed") {
    std::mt19937_64 gen(44);
    const Vector mean = oracle::normal_vector(30, gen);
    const Matrix a = oracle::uniform_matrix(30, 30, gen);
    const Matrix cov = a * a.transpose() / 30.0;
    Rng r1(7), r2(7);
    for (int n = 0; n < 100; ++n) CHECK(thompson_argmax(mean, cov, r1) == thompson_argmax(mean, cov, r2));
}
