#pragma once

// Command-line front end: hull | facets | cut | check.
//
// Exit codes: 0 success, 1 numeric failure, 2 usage or validation error.

#include <qbounds/bell.hpp>
#include <qbounds/error.hpp>
#include <qbounds/hull.hpp>
#include <qbounds/io.hpp>
#include <qbounds/polytope.hpp>
#include <qbounds/qbody.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qbounds::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Radians, or a multiple of pi written with a "pi" suffix ("1.0pi", "-0.25pi", "pi").
inline double parse_angle(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("invalid angle '" + text + "'");
        }
        if (used != s.size() || !std::isfinite(value)) throw InvalidArgument("invalid angle '" + text + "'");
        return value;
    };
    if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
        const std::string factor = text.substr(0, text.size() - 2);
        if (factor.empty() || factor == "+") return std::numbers::pi;
        if (factor == "-") return -std::numbers::pi;
        return number(factor) * std::numbers::pi;
    }
    return number(text);
}

struct GlobalOptions {
    std::string out = "-";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

namespace detail {

// Writes to the --out file, or to `out` when the path is "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : to_stdout_(path == "-"), path_(path) {
        if (!to_stdout_) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw InvalidArgument("cannot open output file '" + path + "'");
        }
        stream_ = to_stdout_ ? &fallback : &file_;
    }
    std::ostream& stream() { return *stream_; }
    bool to_stdout() const noexcept { return to_stdout_; }

private:
    bool to_stdout_;
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_;
};

}  // namespace detail

/// Maps an exception escaping a subcommand to its exit code and reports it.
inline int exit_code_for(const std::exception& e, std::ostream& err) {
    if (const auto* h = dynamic_cast<const HullError*>(&e)) {
        err << "numeric failure at theta=" << io::format_number(h->theta()) << ": " << e.what() << '\n';
        return kExitNumeric;
    }
    if (dynamic_cast<const NumericError*>(&e)) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "failure: " << e.what() << '\n';
    return kExitNumeric;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum and classical bounds for Bell-type setups", "qbounds"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out", g.out, "Output path ('-' for stdout)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    // hull
    auto* hull = app.add_subcommand("hull", "Quantum hull of a one-parameter Bell operator family");
    std::string family = "chsh";
    std::size_t steps = 1000;
    std::string theta_min_text = "0", theta_max_text = "1.0pi";
    hull->add_option("--family", family, "Operator family")->check(CLI::IsMember({"chsh", "ch", "p684"}));
    hull->add_option("--steps", steps, "Grid points (>= 2)")->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
    hull->add_option("--theta-min", theta_min_text, "Grid start (radians or '<k>pi')");
    hull->add_option("--theta-max", theta_max_text, "Grid end (radians or '<k>pi')");

    // facets
    auto* facets_cmd = app.add_subcommand("facets", "Facets of the classical correlation polytope");
    std::string facet_config = "2x2";
    facets_cmd->add_option("--config", facet_config, "Configuration <n_left>x<n_right>");

    // cut
    auto* cut = app.add_subcommand("cut", "Postselected cut through the quantum body Q(2)");
    CutParams cut_params;
    std::string mode = "guided";
    cut->add_option("--a", cut_params.a, "Target for q1, q2, q3");
    cut->add_option("--b", cut_params.b, "Target for q13, q14, q24");
    cut->add_option("--eps", cut_params.epsilon, "Window half-width");
    cut->add_option("--samples", cut_params.samples, "Number of proposals");
    cut->add_option("--mode", mode, "Proposal mode")->check(CLI::IsMember({"rejection", "guided"}));
    cut->add_option("--perturbation", cut_params.perturbation, "Guided-mode noise half-width");
    cut->add_flag("--planar", cut_params.planar, "Restrict settings to the x-z plane");
    cut->add_option("--streams", cut_params.streams, "Independent generator streams");

    // check
    auto* check = app.add_subcommand("check", "Classical range of an inequality over two-valued measures");
    std::string ineq_path, check_config;
    check->add_option("--inequality", ineq_path, "Inequality JSON file")->required();
    check->add_option("--config", check_config, "Configuration <n_left>x<n_right>")->required();

    std::vector<std::string> argv_storage{"qbounds"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (*hull) {
            const auto fam = *family_by_name(family);
            const auto curve = hull_minmax(fam, parse_angle(theta_min_text), parse_angle(theta_max_text), steps);
            detail::Sink sink(g.out, out);
            if (g.format == "json") sink.stream() << io::hull_json(curve).dump(2) << '\n';
            else io::write_hull_csv(sink.stream(), curve);
            const auto peak = curve_peak(fam, curve);
            auto& log = sink.to_stdout() ? err : out;
            log << "family " << fam.name << ": " << curve.size() << " points, max upper "
                << io::format_number(*std::max_element(curve.upper.begin(), curve.upper.end())) << ", min lower "
                << io::format_number(*std::min_element(curve.lower.begin(), curve.lower.end())) << '\n'
                << "refined peak: " << io::format_number(peak.value) << " at theta "
                << io::format_number(peak.theta) << '\n';
            return kExitOk;
        }

        if (*facets_cmd) {
            const auto config = Configuration::parse(facet_config);
            if (!is_two_by_two(config))
                throw InvalidArgument("facet enumeration is restricted to the 2x2 configuration (got " + config.str() +
                                      ")");
            const auto facets = enumerate_facets(config);
            detail::Sink sink(g.out, out);
            sink.stream() << io::facets_json(facets).dump(2) << '\n';
            auto& log = sink.to_stdout() ? err : out;
            std::size_t ch_count = 0;
            for (const auto& f : facets) ch_count += f.is_ch_class();
            log << "facets: " << facets.size() << " (CH-class: " << ch_count << ")\n";
            for (const auto& f : facets)
                if (f.is_ch_class()) log << "  [CH] " << io::describe(f.inequality) << '\n';
            return kExitOk;
        }

        if (*cut) {
            cut_params.mode = mode == "guided" ? CutMode::guided : CutMode::rejection;
            cut_params.validate();
            const auto facets = enumerate_facets(Configuration::full(2, 2));
            auto samples = run_cut(cut_params, g.seed, facets, g.threads);
            const auto summary = classify_region(samples, facets, cut_params.epsilon);
            detail::Sink sink(g.out, out);
            if (g.format == "json") sink.stream() << io::cut_json(samples, cut_params, g.seed, summary).dump(2) << '\n';
            else io::write_cut_csv(sink.stream(), samples);
            auto& log = sink.to_stdout() ? err : out;
            log << "accepted " << summary.total << " of " << cut_params.samples << " proposals; inside C(2): "
                << summary.inside << ", outside C(2): " << summary.outside
                << " (outside CH-class facets: " << summary.outside_ch << ")\n";
            return kExitOk;
        }

        if (*check) {
            const auto config = Configuration::parse(check_config);
            std::ifstream in(ineq_path);
            if (!in) throw InvalidArgument("cannot read inequality file '" + ineq_path + "'");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw InvalidArgument(std::string("malformed inequality JSON: ") + e.what());
            }
            const auto ineq = j.get<Inequality>();
            const auto range = classical_bound(ineq, config);
            const bool valid = ineq.relation == Relation::less_equal ? range.max <= ineq.bound : range.min >= ineq.bound;
            detail::Sink sink(g.out, out);
            if (g.format == "json") {
                sink.stream() << nlohmann::json{{"config", config.str()},
                                                {"min", range.min},
                                                {"max", range.max},
                                                {"valid", valid}}
                                     .dump(2)
                              << '\n';
            } else {
                sink.stream() << "inequality: " << io::describe(ineq) << '\n'
                              << "config: " << config.str() << '\n'
                              << "classical min: " << io::format_number(range.min) << '\n'
                              << "classical max: " << io::format_number(range.max) << '\n'
                              << "valid: " << (valid ? "yes" : "no") << '\n';
            }
            return kExitOk;
        }
    } catch (const std::exception& e) {
        return exit_code_for(e, err);
    }
    return kExitUsage;
}

}  // namespace qbounds::cli
