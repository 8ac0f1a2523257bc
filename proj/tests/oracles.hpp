#pragma once

// Reference computations used only by the tests. Each one takes a route that
// does not go through the library code it is compared against.

#include <qbounds/linalg.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using qbounds::Complex;
using qbounds::ComplexMatrix;

/// Eigenvalues (ascending) from Eigen's self-adjoint solver.
inline std::vector<double> eigenvalues(const ComplexMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.dim());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(out.begin(), out.end());
    return out;
}

/// <psi| A (x) B |psi> for psi = (|01> - |10>)/sqrt 2, summed over state-vector components.
inline double singlet_expectation(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double r = 1.0 / std::sqrt(2.0);
    // psi[i][k]: amplitude of |i k>
    const std::array<std::array<double, 2>, 2> psi{{{0.0, r}, {-r, 0.0}}};
    Complex sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int l = 0; l < 2; ++l) sum += psi[i][k] * a(i, j) * b(k, l) * psi[j][l];
    return sum.real();
}

/// Singlet joint probability for planar projectors: 1/2 sin^2((a - b)/2).
inline double singlet_joint(double a, double b) {
    const double s = std::sin((a - b) / 2.0);
    return 0.5 * s * s;
}

/// Random Hermitian matrix with entries of order one.
inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        e[i * n + i] = nd(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            e[i * n + j] = Complex(nd(rng), nd(rng));
            e[j * n + i] = std::conj(e[i * n + j]);
        }
    }
    return ComplexMatrix(n, std::move(e));
}

inline ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<Complex> e(n * n);
    for (auto& z : e) z = Complex(nd(rng), nd(rng));
    return ComplexMatrix(n, std::move(e));
}

/// Leibniz-formula determinant of a small integer matrix.
inline std::int64_t leibniz_det(const std::vector<std::vector<std::int64_t>>& m) {
    const std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    std::int64_t total = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        std::int64_t term = (inversions % 2) ? -1 : 1;
        for (std::size_t i = 0; i < n; ++i) term *= m[i][perm[i]];
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace oracle
