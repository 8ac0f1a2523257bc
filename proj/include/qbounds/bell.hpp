#pragma once

// Bell functionals and operators: CHSH, CH, and a two-particle three-setting
// inequality, together with their classical bounds over two-valued measures.
//
// Observables are numbered left first, then right: for a (2,2) setup the left
// settings are 1, 2 and the right settings 3, 4; for (3,3) they are 1..3 and 4..6.

#include <qbounds/error.hpp>
#include <qbounds/linalg.hpp>
#include <qbounds/probability.hpp>
#include <qbounds/quantum.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qbounds {

/// Component of a probability vector: a single observable "i" or a joint "ij".
struct ComponentLabel {
    int first = 0;
    int second = 0;  // 0 for single-observable components

    bool is_joint() const noexcept { return second != 0; }

    std::string str() const {
        return is_joint() ? std::to_string(first) + std::to_string(second) : std::to_string(first);
    }

    /// Labels are one or two digits 1-9 with no separator.
    static ComponentLabel parse(std::string_view text) {
        auto digit = [&](char c) {
            if (c < '1' || c > '9') throw InvalidArgument("invalid component label '" + std::string(text) + "'");
            return c - '0';
        };
        if (text.size() == 1) return {digit(text[0]), 0};
        if (text.size() == 2) return {digit(text[0]), digit(text[1])};
        throw InvalidArgument("invalid component label '" + std::string(text) + "'");
    }

    friend auto operator<=>(const ComponentLabel&, const ComponentLabel&) = default;
};

/// Which observables and joint events span the probability space.
class Configuration {
public:
    static constexpr int kMaxObservables = 24;

    Configuration(int n_left, int n_right, std::vector<std::pair<int, int>> joints)
        : n_left_(n_left), n_right_(n_right), joints_(std::move(joints)) {
        if (n_left < 1 || n_right < 1) throw InvalidArgument("Configuration: each side needs an observable");
        for (const auto& [i, j] : joints_) {
            if (i < 1 || i > n_left || j <= n_left || j > n_left + n_right)
                throw InvalidArgument("Configuration: joint (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") must pair a left with a right observable");
        }
        for (std::size_t a = 0; a < joints_.size(); ++a)
            for (std::size_t b = a + 1; b < joints_.size(); ++b)
                if (joints_[a] == joints_[b]) throw InvalidArgument("Configuration: duplicate joint");
    }

    /// All left-right joints, ordered right-major: for (2,2) that is 13, 23, 14, 24.
    static Configuration full(int n_left, int n_right) {
        std::vector<std::pair<int, int>> joints;
        for (int j = n_left + 1; j <= n_left + n_right; ++j)
            for (int i = 1; i <= n_left; ++i) joints.emplace_back(i, j);
        return {n_left, n_right, std::move(joints)};
    }

    /// "<n_left>x<n_right>" with all joints.
    static Configuration parse(std::string_view text) {
        const auto x = text.find('x');
        if (x == std::string_view::npos || x == 0 || x + 1 == text.size())
            throw InvalidArgument("configuration must look like <n_left>x<n_right>, got '" + std::string(text) + "'");
        auto number = [&](std::string_view part) {
            int value = 0;
            for (char c : part) {
                if (c < '0' || c > '9' || value > 1000)
                    throw InvalidArgument("invalid configuration '" + std::string(text) + "'");
                value = value * 10 + (c - '0');
            }
            return value;
        };
        return full(number(text.substr(0, x)), number(text.substr(x + 1)));
    }

    int n_left() const noexcept { return n_left_; }
    int n_right() const noexcept { return n_right_; }
    int observables() const noexcept { return n_left_ + n_right_; }
    const std::vector<std::pair<int, int>>& joints() const noexcept { return joints_; }

    /// Ambient dimension: singles followed by joints.
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(observables()) + joints_.size(); }

    std::optional<std::size_t> index_of(const ComponentLabel& label) const {
        if (!label.is_joint()) {
            if (label.first >= 1 && label.first <= observables()) return static_cast<std::size_t>(label.first - 1);
            return std::nullopt;
        }
        for (std::size_t k = 0; k < joints_.size(); ++k)
            if (joints_[k] == std::pair{label.first, label.second}) return static_cast<std::size_t>(observables()) + k;
        return std::nullopt;
    }

    ComponentLabel label_at(std::size_t index) const {
        const auto n = static_cast<std::size_t>(observables());
        if (index < n) return {static_cast<int>(index) + 1, 0};
        const auto& [i, j] = joints_.at(index - n);
        return {i, j};
    }

    std::string str() const { return std::to_string(n_left_) + "x" + std::to_string(n_right_); }

private:
    int n_left_;
    int n_right_;
    std::vector<std::pair<int, int>> joints_;
};

enum class Relation { less_equal, greater_equal };

/// sum_k c_k x_k (<= or >=) bound.
struct Inequality {
    std::map<ComponentLabel, double> coefficients;
    double bound = 0.0;
    Relation relation = Relation::less_equal;

    bool has_nonzero_coefficient() const {
        return std::any_of(coefficients.begin(), coefficients.end(), [](const auto& kv) { return kv.second != 0.0; });
    }

    /// Throws unless every label names a coordinate of the configuration.
    void check_against(const Configuration& config) const {
        if (!has_nonzero_coefficient()) throw InvalidArgument("inequality has no nonzero coefficient");
        for (const auto& [label, c] : coefficients)
            if (!config.index_of(label))
                throw InvalidArgument("label '" + label.str() + "' is not part of configuration " + config.str());
    }

    /// Dense coefficient vector in the configuration's coordinate order.
    std::vector<double> dense(const Configuration& config) const {
        check_against(config);
        std::vector<double> c(config.dimension(), 0.0);
        for (const auto& [label, value] : coefficients) c[*config.index_of(label)] += value;
        return c;
    }

    /// Left-hand side sum_k c_k x_k at a point given in configuration order.
    double lhs(std::span<const double> point, const Configuration& config) const {
        const auto c = dense(config);
        if (point.size() != c.size()) throw InvalidArgument("inequality: point has wrong dimension");
        double sum = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] * point[k];
        return sum;
    }

    bool holds(double lhs_value, double tol = 0.0) const {
        return relation == Relation::less_equal ? lhs_value <= bound + tol : lhs_value >= bound - tol;
    }
};

inline const char* to_string(Relation r) { return r == Relation::less_equal ? "<=" : ">="; }

inline Relation parse_relation(std::string_view text) {
    if (text == "<=") return Relation::less_equal;
    if (text == ">=") return Relation::greater_equal;
    throw InvalidArgument("relation must be \"<=\" or \">=\", got \"" + std::string(text) + "\"");
}

// JSON form: {"coeffs": {"1": -1.0, "13": 1.0, ...}, "bound": 0.0, "relation": "<="}
inline void to_json(nlohmann::json& j, const Inequality& ineq) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [label, c] : ineq.coefficients) coeffs[label.str()] = c;
    j = nlohmann::json{{"coeffs", coeffs}, {"bound", ineq.bound}, {"relation", to_string(ineq.relation)}};
}

inline void from_json(const nlohmann::json& j, Inequality& ineq) {
    if (!j.is_object() || !j.contains("coeffs") || !j.at("coeffs").is_object())
        throw InvalidArgument("inequality JSON needs an object member \"coeffs\"");
    Inequality out;
    for (const auto& [key, value] : j.at("coeffs").items()) {
        if (!value.is_number()) throw InvalidArgument("coefficient for '" + key + "' is not a number");
        out.coefficients[ComponentLabel::parse(key)] = value.get<double>();
    }
    if (!out.has_nonzero_coefficient()) throw InvalidArgument("inequality has no nonzero coefficient");
    if (j.contains("bound")) {
        if (!j.at("bound").is_number()) throw InvalidArgument("\"bound\" is not a number");
        out.bound = j.at("bound").get<double>();
    }
    if (j.contains("relation")) {
        if (!j.at("relation").is_string()) throw InvalidArgument("\"relation\" is not a string");
        out.relation = parse_relation(j.at("relation").get<std::string>());
    }
    ineq = std::move(out);
}

// ---------------------------------------------------------------------------
// CHSH

struct ChshAngles {
    double alpha = 0.0, beta = 0.0;   // left
    double gamma = 0.0, delta = 0.0;  // right
};

/// sigma_a sigma_g + sigma_b sigma_g + sigma_b sigma_d - sigma_a sigma_d.
inline ComplexMatrix chsh_operator(const ChshAngles& a) {
    const auto sa = spin_observable(a.alpha), sb = spin_observable(a.beta);
    const auto sg = spin_observable(a.gamma), sd = spin_observable(a.delta);
    return kron(sa, sg) + kron(sb, sg) + kron(sb, sd) - kron(sa, sd);
}

/// tr[W O_CHSH] = E(a,g) + E(b,g) + E(b,d) - E(a,d).
inline double chsh_value(const DensityMatrix& w, const ChshAngles& a) {
    if (w.dim() != 4) throw InvalidArgument("chsh_value: expected a two-qubit state");
    return expectation_value(w, chsh_operator(a));
}

/// Min/max of the CHSH sum over deterministic +-1 outcome assignments.
inline std::pair<int, int> chsh_classical_bound() {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (int mask = 0; mask < 16; ++mask) {
        auto pm = [mask](int bit) { return (mask >> bit) & 1 ? 1 : -1; };
        const int a = pm(0), b = pm(1), g = pm(2), d = pm(3);
        const int value = a * g + b * g + b * d - a * d;
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// CH

/// P_CH = q13 + q14 + q24 - q23 - q1 - q4.
inline double ch_functional(const ProbabilityVector8& q) { return q.q13 + q.q14 + q.q24 - q.q23 - q.q1 - q.q4; }

/// Operator whose expectation is P_CH for left settings e1, e2 and right settings f1 (=3), f2 (=4).
inline ComplexMatrix ch_operator(const Projector& e1, const Projector& e2, const Projector& f1, const Projector& f2) {
    const auto id = ComplexMatrix::identity(2);
    const auto& E1 = e1.matrix();
    const auto& E2 = e2.matrix();
    const auto& F1 = f1.matrix();
    const auto& F2 = f2.matrix();
    return kron(E1, F1) + kron(E1, F2) + kron(E2, F2) - kron(E2, F1) - kron(E1, id) - kron(id, F2);
}

/// P_CH <= 0.
inline Inequality ch_inequality() {
    Inequality ineq;
    ineq.coefficients = {{{1, 3}, 1.0}, {{1, 4}, 1.0}, {{2, 4}, 1.0}, {{2, 3}, -1.0}, {{1, 0}, -1.0}, {{4, 0}, -1.0}};
    ineq.bound = 0.0;
    ineq.relation = Relation::less_equal;
    return ineq;
}

/// P_CH >= -1.
inline Inequality ch_lower_inequality() {
    Inequality ineq = ch_inequality();
    ineq.bound = -1.0;
    ineq.relation = Relation::greater_equal;
    return ineq;
}

// ---------------------------------------------------------------------------
// Two particles, three settings per side

/// -E1 - E2 - F1 - F2 - E1F1 + E1F2 + E1F3 + E2F1 + E2F3 + E3F1 + E3F2 - E3F3
/// (single terms tensored with the identity on the other side).
inline ComplexMatrix op684(const std::array<Projector, 3>& e, const std::array<Projector, 3>& f) {
    const auto id = ComplexMatrix::identity(2);
    auto L = [&](int i) { return kron(e[static_cast<std::size_t>(i - 1)].matrix(), id); };
    auto R = [&](int j) { return kron(id, f[static_cast<std::size_t>(j - 1)].matrix()); };
    auto J = [&](int i, int j) {
        return kron(e[static_cast<std::size_t>(i - 1)].matrix(), f[static_cast<std::size_t>(j - 1)].matrix());
    };
    return -L(1) - L(2) - R(1) - R(2) - J(1, 1) + J(1, 2) + J(1, 3) + J(2, 1) + J(2, 3) + J(3, 1) + J(3, 2) - J(3, 3);
}

/// -q14 + q15 + q16 + q24 + q26 + q34 + q35 - q36 - q1 - q2 - q4 - q5 <= 0 on the (3,3) setup.
inline Inequality p684_inequality() {
    Inequality ineq;
    ineq.coefficients = {
        {{1, 0}, -1.0}, {{2, 0}, -1.0}, {{4, 0}, -1.0}, {{5, 0}, -1.0},                 //
        {{1, 4}, -1.0}, {{1, 5}, 1.0},  {{1, 6}, 1.0},  {{2, 4}, 1.0},  {{2, 6}, 1.0},  //
        {{3, 4}, 1.0},  {{3, 5}, 1.0},  {{3, 6}, -1.0},
    };
    ineq.bound = 0.0;
    ineq.relation = Relation::less_equal;
    return ineq;
}

// ---------------------------------------------------------------------------
// Classical bounds

struct Range {
    double min = 0.0;
    double max = 0.0;
};

/// Exact extremes of the inequality's left-hand side over all two-valued
/// measures t in {0,1}^n (joint coordinates are products).
inline Range classical_bound(const Inequality& ineq, const Configuration& config) {
    if (config.observables() > Configuration::kMaxObservables)
        throw InvalidArgument("classical_bound: configuration " + config.str() + " exceeds " +
                              std::to_string(Configuration::kMaxObservables) + " observables");
    ineq.check_against(config);

    struct Term {
        int i, j;  // 0-based observables; j < 0 for singles
        double c;
    };
    std::vector<Term> terms;
    for (const auto& [label, c] : ineq.coefficients)
        terms.push_back({label.first - 1, label.is_joint() ? label.second - 1 : -1, c});

    const int n = config.observables();
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        auto t = [&](int obs) { return static_cast<int>((mask >> (n - 1 - obs)) & 1U); };
        double value = 0.0;
        for (const auto& term : terms) value += term.c * (term.j < 0 ? t(term.i) : t(term.i) * t(term.j));
        r.min = std::min(r.min, value);
        r.max = std::max(r.max, value);
    }
    return r;
}

}  // namespace qbounds
