#pragma once

// CSV / JSON encodings of hull curves, cut samples, and facet lists.

#include <qbounds/bell.hpp>
#include <qbounds/hull.hpp>
#include <qbounds/polytope.hpp>
#include <qbounds/qbody.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qbounds::io {

/// 12 significant digits.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline constexpr const char* kHullCsvHeader = "theta,upper,lower,analytic_upper,analytic_lower,singlet";
inline constexpr const char* kCutCsvHeader = "q4,q23,inside_c2,q1,q2,q3,q13,q14,q24,stream,draw";

inline void write_hull_csv(std::ostream& os, const HullCurve& c) {
    os << kHullCsvHeader << '\n';
    const bool analytic = !c.analytic_upper.empty();
    const bool singlet = !c.singlet.empty();
    for (std::size_t k = 0; k < c.size(); ++k) {
        os << format_number(c.thetas[k]) << ',' << format_number(c.upper[k]) << ',' << format_number(c.lower[k]) << ',';
        if (analytic) os << format_number(c.analytic_upper[k]) << ',' << format_number(c.analytic_lower[k]);
        else os << ',';
        os << ',';
        if (singlet) os << format_number(c.singlet[k]);
        os << '\n';
    }
}

inline nlohmann::json hull_json(const HullCurve& c) {
    auto optional_column = [](const std::vector<double>& v) {
        return v.empty() ? nlohmann::json(nullptr) : nlohmann::json(v);
    };
    return {{"family", c.family},
            {"theta", c.thetas},
            {"upper", c.upper},
            {"lower", c.lower},
            {"analytic_upper", optional_column(c.analytic_upper)},
            {"analytic_lower", optional_column(c.analytic_lower)},
            {"singlet", optional_column(c.singlet)}};
}

inline void write_cut_csv(std::ostream& os, std::span<const CutSample> samples) {
    os << kCutCsvHeader << '\n';
    for (const auto& s : samples) {
        const auto& q = s.vector;
        os << format_number(q.q4) << ',' << format_number(q.q23) << ',' << (s.inside_c2 ? 1 : 0) << ','
           << format_number(q.q1) << ',' << format_number(q.q2) << ',' << format_number(q.q3) << ','
           << format_number(q.q13) << ',' << format_number(q.q14) << ',' << format_number(q.q24) << ','
           << s.seed.stream << ',' << s.seed.draw << '\n';
    }
}

inline nlohmann::json cut_json(std::span<const CutSample> samples, const CutParams& params, std::uint64_t seed,
                               const CutSummary& summary) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples) {
        const auto& q = s.vector;
        rows.push_back({{"q4", q.q4},
                        {"q23", q.q23},
                        {"inside_c2", s.inside_c2},
                        {"inside_ch", s.inside_ch},
                        {"q1", q.q1},
                        {"q2", q.q2},
                        {"q3", q.q3},
                        {"q13", q.q13},
                        {"q14", q.q14},
                        {"q24", q.q24},
                        {"stream", s.seed.stream},
                        {"draw", s.seed.draw}});
    }
    return {{"params",
             {{"a", params.a},
              {"b", params.b},
              {"epsilon", params.epsilon},
              {"samples", params.samples},
              {"mode", params.mode == CutMode::guided ? "guided" : "rejection"},
              {"perturbation", params.perturbation},
              {"planar", params.planar},
              {"streams", params.streams},
              {"seed", seed}}},
            {"summary",
             {{"accepted", summary.total},
              {"inside_c2", summary.inside},
              {"outside_c2", summary.outside},
              {"outside_ch", summary.outside_ch}}},
            {"samples", rows}};
}

inline nlohmann::json facets_json(std::span<const Facet> facets) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : facets) out.push_back(f.inequality);
    return out;
}

/// Human-readable form, e.g. "q13 + q14 + q24 - q23 - q1 - q4 <= 0".
inline std::string describe(const Inequality& ineq) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [label, c] : ineq.coefficients) {
        if (c == 0.0) continue;
        const double mag = std::abs(c);
        if (first) os << (c < 0 ? "-" : "");
        else os << (c < 0 ? " - " : " + ");
        if (mag != 1.0) os << format_number(mag) << "*";
        os << 'q' << label.str();
        first = false;
    }
    os << ' ' << to_string(ineq.relation) << ' ' << format_number(ineq.bound);
    return os.str();
}

/// Minimal CSV reader: header row plus rows of raw string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw InvalidArgument("CSV has no column '" + name + "'");
    }
};

inline CsvTable read_csv(std::istream& is) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("CSV is empty");
    t.header = split(line);
    while (std::getline(is, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

}  // namespace qbounds::io
