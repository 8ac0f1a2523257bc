#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace qbounds {

/// Point (q1, q2, q3, q4, q13, q23, q14, q24) of the two-party, two-setting
/// probability space. Observables 1, 2 are on the left, 3, 4 on the right.
struct ProbabilityVector8 {
    double q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0;
    double q13 = 0.0, q23 = 0.0, q14 = 0.0, q24 = 0.0;

    std::array<double, 8> as_array() const { return {q1, q2, q3, q4, q13, q23, q14, q24}; }

    static ProbabilityVector8 from_array(const std::array<double, 8>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    }

    /// Components finite and in [0, 1]; each joint at most the smaller of its marginals.
    bool is_consistent(double tol = 1e-9) const {
        for (double x : as_array())
            if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;
        auto ok = [tol](double joint, double a, double b) { return joint <= std::min(a, b) + tol; };
        return ok(q13, q1, q3) && ok(q23, q2, q3) && ok(q14, q1, q4) && ok(q24, q2, q4);
    }

    friend bool operator==(const ProbabilityVector8&, const ProbabilityVector8&) = default;
};

}  // namespace qbounds
