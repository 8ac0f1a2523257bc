#pragma once

// Classical correlation polytopes: vertices from two-valued measures, vertex
// validation of inequalities, exhaustive facet enumeration for the (2,2)
// setup, and epsilon-relaxed membership.

#include <qbounds/bell.hpp>
#include <qbounds/error.hpp>
#include <qbounds/probability.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace qbounds {

/// 0/1 point (t_1, ..., t_n, t_i t_j, ...) in configuration order.
struct Vertex {
    std::vector<int> coords;

    std::vector<double> as_doubles() const { return {coords.begin(), coords.end()}; }
    friend bool operator==(const Vertex&, const Vertex&) = default;
};

inline constexpr int kMaxVertexObservables = 20;

/// All 2^n vertices, t_1 most significant (first all-zeros, last all-ones).
inline std::vector<Vertex> vertices(const Configuration& config) {
    const int n = config.observables();
    if (n > kMaxVertexObservables)
        throw InvalidArgument("vertices: configuration " + config.str() + " has more than " +
                              std::to_string(kMaxVertexObservables) + " observables");
    std::vector<Vertex> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        Vertex v;
        v.coords.reserve(config.dimension());
        for (int i = 0; i < n; ++i) v.coords.push_back(static_cast<int>((mask >> (n - 1 - i)) & 1U));
        for (const auto& [i, j] : config.joints())
            v.coords.push_back(v.coords[static_cast<std::size_t>(i - 1)] * v.coords[static_cast<std::size_t>(j - 1)]);
        out.push_back(std::move(v));
    }
    return out;
}

/// True iff the inequality holds at every vertex of the configuration's polytope.
inline bool validate_inequality(const Inequality& ineq, const Configuration& config) {
    const auto c = ineq.dense(config);
    for (const auto& v : vertices(config)) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) lhs += c[k] * v.coords[k];
        if (!ineq.holds(lhs)) return false;
    }
    return true;
}

/// Facet c . x <= d with coprime integer (c, d).
struct Facet {
    Inequality inequality;
    std::vector<std::int64_t> coeffs;
    std::int64_t bound = 0;
    int support_count = 0;

    /// Nontrivial facets involve all four joint probabilities (the CH family).
    bool is_ch_class() const {
        int joints = 0;
        for (std::size_t k = 4; k < coeffs.size(); ++k) joints += coeffs[k] != 0;
        return joints == 4;
    }
};

enum class FacetTraversal {
    lexicographic,  // index combinations in lexicographic order, base point = smallest index
    bitmask,        // 16-bit masks in descending order, base point = largest index
};

namespace detail {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

// Fraction-free (Bareiss) determinant; exact for the small 0/+-1 matrices used here.
inline std::int64_t bareiss_det(IntMatrix m) {
    const std::size_t n = m.size();
    std::int64_t sign = 1, prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

// Exact rank of an integer matrix; rows are reduced by their gcd after each
// elimination step so entries stay small.
inline int integer_rank(IntMatrix m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && m[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            const std::int64_t factor = m[i][col], p = m[rank][col];
            if (factor == 0) continue;
            std::int64_t g = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                m[i][j] = m[i][j] * p - factor * m[rank][j];
                g = std::gcd(g, std::abs(m[i][j]));
            }
            if (g > 1)
                for (auto& x : m[i]) x /= g;
        }
        ++rank;
    }
    return static_cast<int>(rank);
}

// Normal of the hyperplane through `points` via signed maximal minors of the
// difference matrix; all zeros when the points are affinely dependent.
inline std::vector<std::int64_t> hyperplane_normal(const std::vector<const Vertex*>& points, std::size_t base) {
    const std::size_t dim = points[0]->coords.size();
    IntMatrix diffs;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (k == base) continue;
        std::vector<std::int64_t> row(dim);
        for (std::size_t c = 0; c < dim; ++c) row[c] = points[k]->coords[c] - points[base]->coords[c];
        diffs.push_back(std::move(row));
    }
    std::vector<std::int64_t> normal(dim);
    for (std::size_t drop = 0; drop < dim; ++drop) {
        IntMatrix minor(diffs.size(), std::vector<std::int64_t>(dim - 1));
        for (std::size_t r = 0; r < diffs.size(); ++r)
            for (std::size_t c = 0, out = 0; c < dim; ++c)
                if (c != drop) minor[r][out++] = diffs[r][c];
        const std::int64_t det = bareiss_det(std::move(minor));
        normal[drop] = (drop % 2 == 0) ? det : -det;
    }
    return normal;
}

inline std::int64_t dot(std::span<const std::int64_t> c, const Vertex& v) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * v.coords[k];
    return s;
}

using CanonicalFacet = std::pair<std::vector<std::int64_t>, std::int64_t>;

// Orients and reduces the candidate hyperplane; nullopt unless it supports the polytope.
inline std::optional<CanonicalFacet> canonical_facet(std::vector<std::int64_t> normal, std::int64_t rhs,
                                                     const std::vector<Vertex>& verts) {
    bool any_below = false, any_above = false;
    for (const auto& v : verts) {
        const auto s = dot(normal, v);
        any_below = any_below || s < rhs;
        any_above = any_above || s > rhs;
    }
    if (any_below && any_above) return std::nullopt;
    if (any_above) {
        for (auto& c : normal) c = -c;
        rhs = -rhs;
    }
    std::int64_t g = std::abs(rhs);
    for (auto c : normal) g = std::gcd(g, std::abs(c));
    for (auto& c : normal) c /= g;
    rhs /= g;
    return CanonicalFacet{std::move(normal), rhs};
}

}  // namespace detail

inline bool is_two_by_two(const Configuration& config) {
    return config.n_left() == 2 && config.n_right() == 2 && config.joints() == Configuration::full(2, 2).joints();
}

/// Complete facet list of the (2,2) correlation polytope, obtained by testing
/// every 8-subset of the 16 vertices that spans a hyperplane. Sorted by
/// (coefficients, bound).
inline std::vector<Facet> enumerate_facets(const Configuration& config,
                                           FacetTraversal order = FacetTraversal::lexicographic) {
    if (!is_two_by_two(config))
        throw InvalidArgument("enumerate_facets: only the 2x2 configuration is supported (got " + config.str() + ")");

    const auto verts = vertices(config);
    const std::size_t dim = config.dimension();
    const std::size_t n = verts.size();
    std::set<detail::CanonicalFacet> found;

    auto consider = [&](const std::vector<std::size_t>& subset, std::size_t base) {
        std::vector<const Vertex*> points;
        for (auto idx : subset) points.push_back(&verts[idx]);
        auto normal = detail::hyperplane_normal(points, base);
        if (std::all_of(normal.begin(), normal.end(), [](auto c) { return c == 0; })) return;
        const auto rhs = detail::dot(normal, *points[base]);
        if (auto f = detail::canonical_facet(std::move(normal), rhs, verts)) found.insert(std::move(*f));
    };

    if (order == FacetTraversal::lexicographic) {
        std::vector<std::size_t> idx(dim);
        std::iota(idx.begin(), idx.end(), 0);
        for (;;) {
            consider(idx, 0);
            std::size_t k = dim;
            while (k > 0 && idx[k - 1] == n - dim + (k - 1)) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < dim; ++j) idx[j] = idx[j - 1] + 1;
        }
    } else {
        for (std::uint32_t mask = (1U << n) - 1;; --mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) == dim) {
                std::vector<std::size_t> subset;
                for (std::size_t b = 0; b < n; ++b)
                    if (mask & (1U << b)) subset.push_back(b);
                consider(subset, subset.size() - 1);
            }
            if (mask == 0) break;
        }
    }

    std::vector<Facet> facets;
    for (const auto& [coeffs, rhs] : found) {
        Facet f;
        f.coeffs = coeffs;
        f.bound = rhs;
        for (const auto& v : verts) f.support_count += detail::dot(coeffs, v) == rhs;
        for (std::size_t k = 0; k < dim; ++k)
            if (coeffs[k] != 0) f.inequality.coefficients[config.label_at(k)] = static_cast<double>(coeffs[k]);
        f.inequality.bound = static_cast<double>(rhs);
        f.inequality.relation = Relation::less_equal;
        facets.push_back(std::move(f));
    }
    return facets;
}

/// Affine dimension of the facet's supporting vertex set.
inline int support_affine_dimension(const Facet& f, const Configuration& config) {
    const auto verts = vertices(config);
    std::vector<const Vertex*> support;
    for (const auto& v : verts)
        if (detail::dot(f.coeffs, v) == f.bound) support.push_back(&v);
    if (support.empty()) return -1;
    detail::IntMatrix diffs;
    for (std::size_t k = 1; k < support.size(); ++k) {
        std::vector<std::int64_t> row;
        for (std::size_t c = 0; c < support[k]->coords.size(); ++c)
            row.push_back(support[k]->coords[c] - support[0]->coords[c]);
        diffs.push_back(std::move(row));
    }
    return detail::integer_rank(std::move(diffs));
}

/// Absolute slack on top of the epsilon relaxation, absorbing round-off.
inline constexpr double kMembershipSlack = 1e-12;

/// True iff c . q <= d + epsilon * ||c||_1 for every facet.
inline bool membership(std::span<const double> point, std::span<const Facet> facets, double epsilon) {
    if (epsilon < 0.0) throw InvalidArgument("membership: epsilon must be non-negative");
    for (const auto& f : facets) {
        if (f.coeffs.size() != point.size()) throw InvalidArgument("membership: point has wrong dimension");
        double lhs = 0.0, l1 = 0.0;
        for (std::size_t k = 0; k < point.size(); ++k) {
            lhs += static_cast<double>(f.coeffs[k]) * point[k];
            l1 += std::abs(static_cast<double>(f.coeffs[k]));
        }
        if (lhs > static_cast<double>(f.bound) + epsilon * l1 + kMembershipSlack) return false;
    }
    return true;
}

inline bool membership(const ProbabilityVector8& q, std::span<const Facet> facets, double epsilon) {
    const auto arr = q.as_array();
    return membership(std::span<const double>(arr), facets, epsilon);
}

}  // namespace qbounds
