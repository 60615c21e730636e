// Independent reference computations used by the tests. Deliberately naive:
// explicit loops and dense inverses rather than the library's code paths.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline double se(const Vec& a, const Vec& b, double sf2, const Vec& ls) {
    double s = 0.0;
    for (int d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]) / (ls[d] * ls[d]);
    return sf2 * std::exp(-0.5 * s);
}

inline Mat gram(const Mat& x, double sf2, const Vec& ls) {
    Mat k(x.rows(), x.rows());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.rows(); ++j) k(i, j) = se(x.row(i).transpose(), x.row(j).transpose(), sf2, ls);
    return k;
}

struct Posterior {
    double mean;
    double var;
};

// mu = k^T (K + sn2 I)^-1 y, var = k(x,x) - k^T (K + sn2 I)^-1 k via an explicit inverse.
inline Posterior predict(const Mat& x, const Vec& y, const Vec& xs, double sf2, const Vec& ls, double sn2) {
    Mat a = gram(x, sf2, ls);
    for (int i = 0; i < a.rows(); ++i) a(i, i) += sn2;
    const Mat inv = a.fullPivLu().inverse();
    Vec k(x.rows());
    for (int i = 0; i < x.rows(); ++i) k[i] = se(x.row(i).transpose(), xs, sf2, ls);
    return {k.dot(inv * y), se(xs, xs, sf2, ls) - k.dot(inv * k)};
}

inline Mat uniform_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

inline Vec normal_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

}  // namespace oracle
