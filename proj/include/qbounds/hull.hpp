#pragma once

// Quantum hulls of one-parameter Bell operator families. By the minmax
// principle, the extreme values of tr(W O) over all states W are the extreme
// eigenvalues of O, so each grid point costs one Hermitian diagonalization.

#include <qbounds/bell.hpp>
#include <qbounds/error.hpp>
#include <qbounds/linalg.hpp>
#include <qbounds/quantum.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qbounds {

struct HullBounds {
    double upper = 0.0;
    double lower = 0.0;
};

/// theta -> Hermitian 4x4 operator, optionally with a closed-form hull.
struct OperatorFamily {
    std::string name;
    std::function<ComplexMatrix(double)> builder;
    std::function<HullBounds(double)> analytic;  // empty for families without a closed form
};

/// +-sqrt(2 (3 - cos 4 theta)).
inline HullBounds hull_chsh_analytic(double theta) {
    const double r = std::sqrt(2.0 * (3.0 - std::cos(4.0 * theta)));
    return {r, -r};
}

/// 1/2 [+-sqrt((3 - cos 2 theta) / 2) - 1].
inline HullBounds hull_ch_analytic(double theta) {
    const double r = std::sqrt((3.0 - std::cos(2.0 * theta)) / 2.0);
    return {0.5 * (r - 1.0), 0.5 * (-r - 1.0)};
}

/// CHSH with alpha = 0, beta = 2 theta, gamma = theta, delta = 3 theta.
inline OperatorFamily family_chsh() {
    return {"chsh", [](double t) { return chsh_operator({0.0, 2.0 * t, t, 3.0 * t}); }, hull_chsh_analytic};
}

/// CH with E1 = E(0), E2 = F1 = E(theta), F2 = E(2 theta).
inline OperatorFamily family_ch() {
    return {"ch",
            [](double t) {
                const auto e_t = projector_planar(t);
                return ch_operator(projector_planar(0.0), e_t, e_t, projector_planar(2.0 * t));
            },
            hull_ch_analytic};
}

/// Three settings per side, E_k = F_k = E(0), E(theta), E(2 theta).
inline OperatorFamily family_p684() {
    return {"p684",
            [](double t) {
                const std::array<Projector, 3> settings{projector_planar(0.0), projector_planar(t),
                                                        projector_planar(2.0 * t)};
                return op684(settings, settings);
            },
            {}};
}

inline std::optional<OperatorFamily> family_by_name(std::string_view name) {
    if (name == "chsh") return family_chsh();
    if (name == "ch") return family_ch();
    if (name == "p684") return family_p684();
    return std::nullopt;
}

struct HullCurve {
    std::string family;
    std::vector<double> thetas;
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> analytic_upper;  // empty without a closed form
    std::vector<double> analytic_lower;
    std::vector<double> singlet;  // empty unless requested

    std::size_t size() const noexcept { return thetas.size(); }
};

/// Uniform grid with both endpoints included.
inline std::vector<double> theta_grid(double theta_min, double theta_max, std::size_t steps) {
    if (steps < 2) throw InvalidArgument("theta grid needs at least 2 steps");
    if (!(theta_max > theta_min)) throw InvalidArgument("theta grid must be strictly ascending");
    std::vector<double> grid(steps);
    const double h = (theta_max - theta_min) / static_cast<double>(steps - 1);
    for (std::size_t k = 0; k < steps; ++k) grid[k] = theta_min + h * static_cast<double>(k);
    grid.back() = theta_max;
    return grid;
}

/// Error carrying the grid point where diagonalization failed.
class HullError : public NumericError {
public:
    HullError(const std::string& what, double theta, double residual)
        : NumericError(what, residual), theta_(theta) {}
    double theta() const noexcept { return theta_; }

private:
    double theta_;
};

inline HullBounds hull_at(const OperatorFamily& fam, double theta) {
    try {
        const auto eig = eig_hermitian(fam.builder(theta));
        return {eig.max(), eig.min()};
    } catch (const NumericError& e) {
        throw HullError(std::string(e.what()) + " at theta=" + std::to_string(theta), theta, e.residual());
    } catch (const InvalidArgument& e) {  // e.g. a builder producing a non-Hermitian or non-finite operator
        throw HullError(std::string(e.what()) + " at theta=" + std::to_string(theta), theta, 0.0);
    }
}

/// tr(singlet . O(theta)) along the grid.
inline std::vector<double> singlet_curve(const OperatorFamily& fam, std::span<const double> grid) {
    const auto w = singlet();
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(expectation_value(w, fam.builder(t)));
    return out;
}

/// Extreme eigenvalues of the family along a uniform grid (plus analytic and
/// singlet columns where available).
inline HullCurve hull_minmax(const OperatorFamily& fam, double theta_min, double theta_max, std::size_t steps,
                             bool with_singlet = true) {
    HullCurve curve;
    curve.family = fam.name;
    curve.thetas = theta_grid(theta_min, theta_max, steps);
    curve.upper.reserve(steps);
    curve.lower.reserve(steps);
    for (double t : curve.thetas) {
        const auto b = hull_at(fam, t);
        curve.upper.push_back(b.upper);
        curve.lower.push_back(b.lower);
        if (fam.analytic) {
            const auto a = fam.analytic(t);
            curve.analytic_upper.push_back(a.upper);
            curve.analytic_lower.push_back(a.lower);
        }
    }
    if (with_singlet) curve.singlet = singlet_curve(fam, curve.thetas);
    return curve;
}

struct HullPeak {
    double theta = 0.0;
    double value = 0.0;
};

/// Maximum of the upper branch on [lo, hi] by golden-section search; assumes
/// a single peak inside the bracket.
inline HullPeak refine_upper_peak(const OperatorFamily& fam, double lo, double hi, double tol = 1e-10) {
    if (!(hi > lo)) throw InvalidArgument("refine_upper_peak: empty bracket");
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = hull_at(fam, x1).upper, f2 = hull_at(fam, x2).upper;
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = hull_at(fam, x2).upper;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = hull_at(fam, x1).upper;
        }
    }
    HullPeak best{x1, f1};
    if (f2 > best.value) best = {x2, f2};
    for (double end : {lo, hi}) {
        const double v = hull_at(fam, end).upper;
        if (v > best.value) best = {end, v};
    }
    return best;
}

/// Grid argmax of the upper branch, refined between its grid neighbours.
inline HullPeak curve_peak(const OperatorFamily& fam, const HullCurve& curve) {
    if (curve.size() < 2) throw InvalidArgument("curve_peak: curve needs at least 2 points");
    const auto k = static_cast<std::size_t>(std::max_element(curve.upper.begin(), curve.upper.end()) -
                                            curve.upper.begin());
    const std::size_t left = k == 0 ? 0 : k - 1, right = std::min(k + 1, curve.size() - 1);
    return refine_upper_peak(fam, curve.thetas[left], curve.thetas[right]);
}

/// Largest tr(W O(theta)) over `samples` random states plus any injected states.
inline double montecarlo_max(const OperatorFamily& fam, double theta, SeededGenerator& rng, std::size_t samples,
                             std::span<const DensityMatrix> injected = {}) {
    if (samples < 1) throw InvalidArgument("montecarlo_max: samples must be positive");
    const auto op = fam.builder(theta);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) best = std::max(best, expectation_value(random_state(rng), op));
    for (const auto& w : injected) best = std::max(best, expectation_value(w, op));
    return best;
}

}  // namespace qbounds
