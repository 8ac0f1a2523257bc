#pragma once

// Dense complex matrices of small dimension (<= 8) and a Hermitian eigensolver.

#include <qbounds/error.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qbounds {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Square complex matrix stored row-major. Entries are validated finite on
/// construction and never change afterwards.
class ComplexMatrix {
public:
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
        if (dim == 0) throw InvalidArgument("ComplexMatrix: dimension must be positive");
    }

    ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
        : dim_(dim), data_(std::move(entries)) {
        if (dim == 0) throw InvalidArgument("ComplexMatrix: dimension must be positive");
        if (data_.size() != dim * dim)
            throw InvalidArgument("ComplexMatrix: expected " + std::to_string(dim * dim) +
                                  " entries, got " + std::to_string(data_.size()));
        for (const auto& z : data_)
            if (!is_finite(z)) throw InvalidArgument("ComplexMatrix: non-finite entry");
    }

    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        const std::size_t n = rows.size();
        std::vector<Complex> entries;
        entries.reserve(n * n);
        for (const auto& row : rows) {
            if (row.size() != n) throw InvalidArgument("ComplexMatrix::from_rows: matrix must be square");
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return ComplexMatrix(n, std::move(entries));
    }

    static ComplexMatrix identity(std::size_t dim) {
        std::vector<Complex> entries(dim * dim);
        for (std::size_t i = 0; i < dim; ++i) entries[i * dim + i] = 1.0;
        return ComplexMatrix(dim, std::move(entries));
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        const std::size_t n = values.size();
        std::vector<Complex> entries(n * n);
        for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = values[i];
        return ComplexMatrix(n, std::move(entries));
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        return diagonal(std::span<const double>(values.begin(), values.size()));
    }

    std::size_t dim() const noexcept { return dim_; }
    const Complex& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * dim_ + col];
    }
    std::span<const Complex> entries() const noexcept { return data_; }

    friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
        return combine(a, b, 1.0);
    }
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
        return combine(a, b, -1.0);
    }
    friend ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
        std::vector<Complex> out(a.data_);
        for (auto& z : out) z *= s;
        return ComplexMatrix(a.dim_, std::move(out));
    }
    friend ComplexMatrix operator-(const ComplexMatrix& a) { return Complex(-1.0) * a; }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    static ComplexMatrix combine(const ComplexMatrix& a, const ComplexMatrix& b, double sign) {
        if (a.dim_ != b.dim_) throw InvalidArgument("ComplexMatrix: dimension mismatch in addition");
        std::vector<Complex> out(a.data_);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += sign * b.data_[k];
        return ComplexMatrix(a.dim_, std::move(out));
    }

    std::size_t dim_;
    std::vector<Complex> data_;
};

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim())
        throw InvalidArgument("matmul: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()) + ")");
    const std::size_t n = a.dim();
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b(k, j);
        }
    return ComplexMatrix(n, std::move(out));
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * n + i] = std::conj(a(i, j));
    return ComplexMatrix(n, std::move(out));
}

inline Complex trace(const ComplexMatrix& a) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) sum += a(i, i);
    return sum;
}

/// tr(a·b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("trace_of_product: dimension mismatch");
    Complex sum = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum += a(i, j) * b(j, i);
    return sum;
}

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim(), n = na * nb;
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out[(i * nb + k) * n + (j * nb + l)] = aij * b(k, l);
        }
    return ComplexMatrix(n, std::move(out));
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k)
        worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
    return worst;
}

/// Entrywise max |a - a^dagger|.
inline double hermiticity_defect(const ComplexMatrix& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst;
}

inline constexpr double kHermitianTolerance = 1e-12;

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTolerance) {
    return hermiticity_defect(a) <= tol;
}

struct EigenResult {
    std::vector<double> eigenvalues;                // ascending
    std::vector<std::vector<Complex>> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]
    double residual = 0.0;                           // max_k ||A v_k - lambda_k v_k||_inf
    int sweeps = 0;

    double min() const { return eigenvalues.front(); }
    double max() const { return eigenvalues.back(); }
};

inline constexpr int kMaxJacobiSweeps = 200;
inline constexpr double kEigenResidualTolerance = 1e-10;

namespace detail {

// Cyclic complex Jacobi. Each (p, q) rotation first removes the phase of a_pq
// with diag(1, e^{-i phi}), then applies the classical real Jacobi rotation.
inline EigenResult jacobi_hermitian(const ComplexMatrix& input) {
    const std::size_t n = input.dim();
    std::vector<Complex> a(input.entries().begin(), input.entries().end());
    // symmetrize to absorb round-off in analytically Hermitian inputs
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] = a[i * n + i].real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (a[i * n + j] + std::conj(a[j * n + i]));
            a[i * n + j] = avg;
            a[j * n + i] = std::conj(avg);
        }
    }
    const std::vector<Complex> sym(a);

    std::vector<Complex> v(n * n);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_norm2 = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += std::norm(a[i * n + j]);
        return s;
    };
    double frob2 = 0.0;
    for (const auto& z : a) frob2 += std::norm(z);
    const double target = frob2 * 1e-32;

    EigenResult result;
    int sweep = 0;
    for (; sweep < kMaxJacobiSweeps; ++sweep) {
        const double off = off_norm2();
        if (off <= target || off == 0.0) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex g = a[p * n + q];
                const double abs_g = std::abs(g);
                if (abs_g == 0.0) continue;
                const Complex phase = g / abs_g;
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                const double tau = (aqq - app) / (2.0 * abs_g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex u_qp = -s * std::conj(phase);  // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                const Complex u_qq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // A <- A U
                    const Complex akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * u_qp;
                    a[k * n + q] = akp * s + akq * u_qq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- U^H A
                    const Complex apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk + std::conj(u_qp) * aqk;
                    a[q * n + k] = s * apk + std::conj(u_qq) * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {  // V <- V U
                    const Complex vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * u_qp;
                    v[k * n + q] = vkp * s + vkq * u_qq;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                a[p * n + p] = a[p * n + p].real();
                a[q * n + q] = a[q * n + q].real();
            }
        }
    }
    result.sweeps = sweep;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * n + x].real() < a[y * n + y].real(); });

    double scale = 1.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(a[k * n + k].real()));

    double residual = 0.0;
    for (std::size_t idx : order) {
        const double lambda = a[idx * n + idx].real();
        std::vector<Complex> vec(n);
        for (std::size_t k = 0; k < n; ++k) vec[k] = v[k * n + idx];
        for (std::size_t i = 0; i < n; ++i) {
            Complex av = 0.0;
            for (std::size_t j = 0; j < n; ++j) av += sym[i * n + j] * vec[j];
            residual = std::max(residual, std::abs(av - lambda * vec[i]));
        }
        result.eigenvalues.push_back(lambda);
        result.eigenvectors.push_back(std::move(vec));
    }
    result.residual = residual;

    if (sweep == kMaxJacobiSweeps && off_norm2() > target)
        throw NumericError("eig_hermitian: no convergence after " + std::to_string(kMaxJacobiSweeps) + " sweeps",
                           residual);
    if (residual > kEigenResidualTolerance * scale)
        throw NumericError("eig_hermitian: residual " + std::to_string(residual) + " exceeds tolerance", residual);
    return result;
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order together with unit eigenvectors.
///
/// Throws InvalidArgument if max |a - a^dagger| exceeds kHermitianTolerance, and
/// NumericError if the Jacobi iteration does not reach the residual bound.
inline EigenResult eig_hermitian(const ComplexMatrix& a) {
    const double defect = hermiticity_defect(a);
    if (defect > kHermitianTolerance)
        throw InvalidArgument("eig_hermitian: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    return detail::jacobi_hermitian(a);
}

inline bool is_psd(const ComplexMatrix& a, double tol) { return eig_hermitian(a).min() >= -tol; }

/// Operator norm of a Hermitian matrix: max |eigenvalue|.
inline double spectral_norm(const ComplexMatrix& a) {
    const auto eig = eig_hermitian(a);
    return std::max(std::abs(eig.min()), std::abs(eig.max()));
}

/// Rank-one projector |v><v| / <v|v>.
inline ComplexMatrix outer_projector(std::span<const Complex> vec) {
    const std::size_t n = vec.size();
    double norm2 = 0.0;
    for (const auto& z : vec) norm2 += std::norm(z);
    if (!(norm2 > 0.0)) throw InvalidArgument("outer_projector: zero vector");
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = vec[i] * std::conj(vec[j]) / norm2;
    return ComplexMatrix(n, std::move(out));
}

}  // namespace qbounds
