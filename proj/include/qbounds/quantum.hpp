#pragma once

// Spin projectors, two-qubit density matrices, and the probabilities and
// correlations they induce.
//
// Conventions:
//   - planar directions n(theta) = (sin theta, 0, cos theta); theta = 0 is +z
//   - two-qubit basis ordering |00>, |01>, |10>, |11>, left particle first

#include <qbounds/error.hpp>
#include <qbounds/linalg.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace qbounds {

enum class PauliAxis { x, y, z };

inline ComplexMatrix pauli(PauliAxis axis) {
    using namespace std::complex_literals;
    switch (axis) {
        case PauliAxis::x: return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
        case PauliAxis::y: return ComplexMatrix::from_rows({{0.0, -1i}, {1i, 0.0}});
        case PauliAxis::z: break;
    }
    return ComplexMatrix::diagonal({1.0, -1.0});
}

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kProjectorTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kProbabilityBand = 1e-10;

/// Unit measurement direction on the Bloch sphere.
class BlochVector {
public:
    BlochVector(double x, double y, double z) : x_(x), y_(y), z_(z) {
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitNormTolerance)
            throw InvalidArgument("BlochVector: direction must have unit norm (got " + std::to_string(norm) + ")");
    }

    /// Scales (x, y, z) to unit length; throws on the zero vector.
    static BlochVector normalized(double x, double y, double z) {
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("BlochVector: cannot normalize zero vector");
        return {x / norm, y / norm, z / norm};
    }

    static BlochVector planar(double theta) { return {std::sin(theta), 0.0, std::cos(theta)}; }

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double z() const noexcept { return z_; }

private:
    double x_, y_, z_;
};

/// Rank-one projector on a single spin-1/2 (idempotent, Hermitian, trace one).
class Projector {
public:
    static Projector from_matrix(ComplexMatrix m) {
        if (m.dim() != 2) throw InvalidArgument("Projector: expected a 2x2 matrix");
        if (!is_hermitian(m)) throw InvalidArgument("Projector: matrix is not Hermitian");
        if (max_abs_diff(matmul(m, m), m) > kProjectorTolerance)
            throw InvalidArgument("Projector: matrix is not idempotent");
        if (std::abs(trace(m) - 1.0) > kProjectorTolerance) throw InvalidArgument("Projector: trace must be one");
        return Projector(std::move(m));
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }

    /// I - E, the projector on the opposite direction.
    Projector complement() const { return Projector(ComplexMatrix::identity(2) - m_); }

private:
    explicit Projector(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// E(theta) = 1/2 [[1 + cos theta, sin theta], [sin theta, 1 - cos theta]].
inline Projector projector_planar(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return Projector::from_matrix(ComplexMatrix::from_rows({{0.5 * (1.0 + c), 0.5 * s}, {0.5 * s, 0.5 * (1.0 - c)}}));
}

/// 1/2 (I + n . sigma).
inline Projector projector_bloch(const BlochVector& n) {
    const Complex off_upper(0.5 * n.x(), -0.5 * n.y());
    return Projector::from_matrix(ComplexMatrix::from_rows(
        {{0.5 * (1.0 + n.z()), off_upper}, {std::conj(off_upper), 0.5 * (1.0 - n.z())}}));
}

/// sigma_theta = cos theta sigma_z + sin theta sigma_x = 2 E(theta) - I.
inline ComplexMatrix spin_observable(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return ComplexMatrix::from_rows({{c, s}, {s, -c}});
}

/// The 16 real parameters b_1..b_16 of a two-qubit state (index 0 holds b_1).
class StateParams {
public:
    explicit StateParams(const std::array<double, 16>& b) : b_(b) {
        bool any_nonzero = false;
        for (double x : b_) {
            if (!std::isfinite(x)) throw InvalidArgument("StateParams: non-finite parameter");
            any_nonzero = any_nonzero || x != 0.0;
        }
        if (!any_nonzero) throw InvalidArgument("StateParams: all parameters are zero");
    }

    const std::array<double, 16>& values() const noexcept { return b_; }
    double operator[](std::size_t i) const noexcept { return b_[i]; }

    /// sum_{1..4} b_i^2 + 2 sum_{5..16} b_j^2, which equals tr(B^2).
    double normalization() const noexcept {
        double diag = 0.0, off = 0.0;
        for (std::size_t i = 0; i < 4; ++i) diag += b_[i] * b_[i];
        for (std::size_t j = 4; j < 16; ++j) off += b_[j] * b_[j];
        return diag + 2.0 * off;
    }

private:
    std::array<double, 16> b_;
};

/// Quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
    static DensityMatrix from_matrix(ComplexMatrix m) {
        if (!is_hermitian(m)) throw InvalidArgument("DensityMatrix: matrix is not Hermitian");
        if (std::abs(trace(m) - 1.0) > kTraceTolerance)
            throw InvalidArgument("DensityMatrix: trace deviates from one by " +
                                  std::to_string(std::abs(trace(m) - 1.0)));
        if (!is_psd(m, kPsdTolerance)) throw InvalidArgument("DensityMatrix: matrix is not positive semidefinite");
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return DensityMatrix(Complex(1.0 / static_cast<double>(dim)) * ComplexMatrix::identity(dim));
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return m_.dim(); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// The Hermitian matrix B whose normalized square is the state.
inline ComplexMatrix state_root(const StateParams& p) {
    auto b = [&](int one_based) { return p[static_cast<std::size_t>(one_based - 1)]; };
    auto z = [&](int re, int im) { return Complex(b(re), b(im)); };
    auto zc = [&](int re, int im) { return Complex(b(re), -b(im)); };
    return ComplexMatrix::from_rows({
        {b(1), z(5, 6), z(11, 12), z(15, 16)},
        {zc(5, 6), b(2), z(7, 8), z(13, 14)},
        {zc(11, 12), zc(7, 8), b(3), z(9, 10)},
        {zc(15, 16), zc(13, 14), zc(9, 10), b(4)},
    });
}

/// W = B^2 / tr(B^2); positive by construction.
inline DensityMatrix density_from_params(const StateParams& p) {
    const ComplexMatrix root = state_root(p);
    return DensityMatrix::from_matrix(Complex(1.0 / p.normalization()) * matmul(root, root));
}

/// Parameters whose B is the singlet projector itself, so W = B.
inline StateParams singlet_params() {
    std::array<double, 16> b{};
    b[1] = 0.5;   // b_2
    b[2] = 0.5;   // b_3
    b[6] = -0.5;  // b_7
    return StateParams(b);
}

/// Projector on (|01> - |10>) / sqrt 2.
inline DensityMatrix singlet() {
    const auto id = ComplexMatrix::identity(2);
    const auto sx = pauli(PauliAxis::x), sy = pauli(PauliAxis::y), sz = pauli(PauliAxis::z);
    const auto m = kron(id, id) - kron(sx, sx) - kron(sy, sy) - kron(sz, sz);
    return DensityMatrix::from_matrix(Complex(0.25) * m);
}

inline double expectation_value(const DensityMatrix& w, const ComplexMatrix& op) {
    if (w.dim() != op.dim())
        throw InvalidArgument("expectation_value: state has dim " + std::to_string(w.dim()) + ", operator has dim " +
                              std::to_string(op.dim()));
    return trace_of_product(w.matrix(), op).real();
}

namespace detail {

inline double clamp_to_band(double value, double lo, double hi, const char* what) {
    if (value < lo - kProbabilityBand || value > hi + kProbabilityBand)
        throw NumericError(std::string(what) + " out of range: " + std::to_string(value));
    return std::clamp(value, lo, hi);
}

inline void require_two_qubits(const DensityMatrix& w, const char* what) {
    if (w.dim() != 4) throw InvalidArgument(std::string(what) + ": expected a two-qubit (4x4) state");
}

}  // namespace detail

/// tr[W (E x I)].
inline double prob_single_left(const DensityMatrix& w, const Projector& e) {
    detail::require_two_qubits(w, "prob_single_left");
    const double q = expectation_value(w, kron(e.matrix(), ComplexMatrix::identity(2)));
    return detail::clamp_to_band(q, 0.0, 1.0, "prob_single_left");
}

/// tr[W (I x F)].
inline double prob_single_right(const DensityMatrix& w, const Projector& f) {
    detail::require_two_qubits(w, "prob_single_right");
    const double q = expectation_value(w, kron(ComplexMatrix::identity(2), f.matrix()));
    return detail::clamp_to_band(q, 0.0, 1.0, "prob_single_right");
}

/// tr[W (E x F)].
inline double prob_joint(const DensityMatrix& w, const Projector& e, const Projector& f) {
    detail::require_two_qubits(w, "prob_joint");
    const double q = expectation_value(w, kron(e.matrix(), f.matrix()));
    return detail::clamp_to_band(q, 0.0, 1.0, "prob_joint");
}

/// E(alpha, beta) = tr[W (sigma_alpha x sigma_beta)].
inline double expectation(const DensityMatrix& w, double alpha, double beta) {
    detail::require_two_qubits(w, "expectation");
    const double e = expectation_value(w, kron(spin_observable(alpha), spin_observable(beta)));
    return detail::clamp_to_band(e, -1.0, 1.0, "expectation");
}

/// tr(W^2); equals one exactly for pure states.
inline double purity(const DensityMatrix& w) { return trace_of_product(w.matrix(), w.matrix()).real(); }

/// Seedable pseudorandom source (64-bit Mersenne Twister). Output is
/// deterministic per seed within one build; standard-library distributions
/// are not bit-identical across toolchains.
class SeededGenerator {
public:
    explicit SeededGenerator(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from a master seed: seed = master + stream.
    static SeededGenerator for_stream(std::uint64_t master_seed, std::uint64_t stream) {
        return SeededGenerator(master_seed + stream);
    }

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// b_1..b_16 drawn i.i.d. standard normal.
inline DensityMatrix random_state(SeededGenerator& rng) {
    for (;;) {
        std::array<double, 16> b{};
        bool any_nonzero = false;
        for (auto& x : b) {
            x = rng.normal();
            any_nonzero = any_nonzero || x != 0.0;
        }
        if (any_nonzero) return density_from_params(StateParams(b));
    }
}

/// Direction uniform on the sphere (normalized Gaussian 3-vector).
inline Projector random_projector(SeededGenerator& rng) {
    for (;;) {
        const double x = rng.normal(), y = rng.normal(), z = rng.normal();
        if (x == 0.0 && y == 0.0 && z == 0.0) continue;
        return projector_bloch(BlochVector::normalized(x, y, z));
    }
}

/// Direction uniform on the x-z great circle.
inline Projector random_planar_projector(SeededGenerator& rng) {
    return projector_planar(rng.uniform(0.0, 2.0 * std::numbers::pi));
}

}  // namespace qbounds
