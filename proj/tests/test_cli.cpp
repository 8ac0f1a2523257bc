#include <qbounds/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace qbounds;
using std::numbers::pi;
using std::numbers::sqrt2;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(QBOUNDS_DATA_DIR) + "/inequalities/" + name; }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("qbounds_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string write_file(const TempDir& dir, const std::string& name, const std::string& content) {
    const auto path = dir.file(name);
    std::ofstream(path) << content;
    return path;
}

double column_max(const io::CsvTable& t, const std::string& name) {
    const auto c = t.column(name);
    double best = -INFINITY;
    for (const auto& row : t.rows) best = std::max(best, std::stod(row[c]));
    return best;
}

}  // namespace

TEST(ParseAngle, Forms) {
    EXPECT_EQ(cli::parse_angle("0"), 0.0);
    EXPECT_EQ(cli::parse_angle("1.5"), 1.5);
    EXPECT_EQ(cli::parse_angle("pi"), pi);
    EXPECT_EQ(cli::parse_angle("-pi"), -pi);
    EXPECT_EQ(cli::parse_angle("1.0pi"), pi);
    EXPECT_EQ(cli::parse_angle("0.25pi"), 0.25 * pi);
    EXPECT_EQ(cli::parse_angle("-0.5pi"), -0.5 * pi);
    for (const char* bad : {"", "x", "1.0p", "pi1", "1.0xpi", "nan", "inf", "1e999"})
        EXPECT_THROW(cli::parse_angle(bad), InvalidArgument) << bad;
}

TEST(Hull, ChshFileHasTsirelsonMaximum) {
    TempDir dir;
    const auto path = dir.file("chsh.csv");
    const auto r = run({"hull", "--family", "chsh", "--steps", "1000", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    const auto t = io::read_csv(in);
    EXPECT_EQ(t.rows.size(), 1000u);
    // pi/4 falls between grid points; the refined peak recovers it
    EXPECT_NEAR(column_max(t, "upper"), 2 * sqrt2, 1e-5);
    EXPECT_NE(r.out.find("1000 points"), std::string::npos);
    EXPECT_NE(r.out.find("refined peak: 2.82842712475"), std::string::npos) << r.out;
}

TEST(Hull, ChToStdoutHasQuantumMaximum) {
    const auto r = run({"hull", "--family", "ch", "--steps", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    const auto t = io::read_csv(in);
    EXPECT_NEAR(column_max(t, "upper"), (sqrt2 - 1) / 2, 1e-5);
    EXPECT_NE(r.err.find("refined peak: 0.207106781187 at theta 1.570796"), std::string::npos) << r.err;
    // summary goes to stderr when data goes to stdout
    EXPECT_NE(r.err.find("family ch"), std::string::npos);
}

TEST(Hull, HeaderAndEmptyAnalyticColumnsForP684) {
    const auto r = run({"hull", "--family", "p684", "--steps", "5"});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    const auto t = io::read_csv(in);
    EXPECT_EQ(t.header, (std::vector<std::string>{"theta", "upper", "lower", "analytic_upper", "analytic_lower", "singlet"}));
    for (const auto& row : t.rows) {
        ASSERT_EQ(row.size(), 6u);
        EXPECT_TRUE(row[3].empty());
        EXPECT_TRUE(row[4].empty());
        EXPECT_FALSE(row[5].empty());
    }
}

TEST(Hull, GridContainingPeakHitsTsirelsonExactly) {
    const auto r = run({"hull", "--family", "chsh", "--steps", "1001"});
    std::istringstream in(r.out);
    EXPECT_NEAR(column_max(io::read_csv(in), "upper"), 2 * sqrt2, 1e-9);
}

TEST(Hull, JsonFormat) {
    const auto r = run({"--format", "json", "hull", "--family", "chsh", "--steps", "11", "--theta-max", "0.5pi"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["family"], "chsh");
    ASSERT_EQ(j["theta"].size(), 11u);
    EXPECT_NEAR(j["theta"].back().get<double>(), pi / 2, 1e-15);
    EXPECT_NEAR(j["upper"][5].get<double>(), 2 * sqrt2, 1e-9);
}

TEST(Hull, UsageErrors) {
    EXPECT_EQ(run({"hull", "--family", "chsh", "--steps", "1"}).code, 2);
    EXPECT_EQ(run({"hull", "--family", "bogus"}).code, 2);
    EXPECT_EQ(run({"hull", "--theta-max", "abc"}).code, 2);
    EXPECT_EQ(run({"hull", "--theta-min", "1", "--theta-max", "0.5"}).code, 2);
    EXPECT_EQ(run({"hull", "--out", "/nonexistent-dir/x.csv", "--steps", "3"}).code, 2);
    EXPECT_EQ(run({"--format", "xml", "hull"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(Hull, CsvRoundTripRecomputesDerivedColumns) {
    const auto r = run({"hull", "--family", "chsh", "--steps", "200"});
    std::istringstream in(r.out);
    const auto t = io::read_csv(in);
    const auto ct = t.column("theta"), cu = t.column("analytic_upper"), cl = t.column("analytic_lower"),
               cs = t.column("singlet");
    for (const auto& row : t.rows) {
        const double theta = std::stod(row[ct]);
        const auto a = hull_chsh_analytic(theta);
        EXPECT_NEAR(std::stod(row[cu]), a.upper, 1e-10);
        EXPECT_NEAR(std::stod(row[cl]), a.lower, 1e-10);
        EXPECT_NEAR(std::stod(row[cs]), -3 * std::cos(theta) + std::cos(3 * theta), 1e-10);
    }
}

TEST(Hull, Deterministic) {
    EXPECT_EQ(run({"hull", "--family", "p684", "--steps", "50"}).out,
              run({"hull", "--family", "p684", "--steps", "50"}).out);
}

TEST(Facets, ContainsChAndIsDeterministic) {
    TempDir dir;
    const auto a = dir.file("a.json"), b = dir.file("b.json");
    const auto r1 = run({"facets", "--config", "2x2", "--out", a});
    const auto r2 = run({"facets", "--config", "2x2", "--out", b});
    ASSERT_EQ(r1.code, 0) << r1.err;
    ASSERT_EQ(r2.code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto j = nlohmann::json::parse(slurp(a));
    ASSERT_EQ(j.size(), 24u);
    const auto ch = ch_inequality();
    bool found = false;
    for (const auto& f : j) {
        const auto ineq = f.get<Inequality>();
        found = found || (ineq.coefficients == ch.coefficients && ineq.bound == 0.0);
    }
    EXPECT_TRUE(found);
    EXPECT_NE(r1.out.find("facets: 24 (CH-class: 8)"), std::string::npos);
    EXPECT_NE(r1.out.find("[CH]"), std::string::npos);
}

TEST(Facets, UnsupportedConfig) {
    const auto r = run({"facets", "--config", "3x3"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("2x2"), std::string::npos);
    EXPECT_EQ(run({"facets", "--config", "two"}).code, 2);
}

TEST(Cut, GuidedFindsOutsidePointsAndIsDeterministic) {
    TempDir dir;
    const auto a = dir.file("a.csv"), b = dir.file("b.csv");
    const std::vector<std::string> flags{"cut", "--a", "0.5", "--b", "0.375", "--eps", "0.015",
                                         "--samples", "20000", "--mode", "guided", "--seed", "0"};
    auto with_out = [&](const std::string& path) {
        auto f = flags;
        f.insert(f.end(), {"--out", path});
        return f;
    };
    const auto r1 = run(with_out(a));
    ASSERT_EQ(r1.code, 0) << r1.err;
    auto threaded = with_out(b);
    threaded.insert(threaded.end(), {"--threads", "4"});
    ASSERT_EQ(run(threaded).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));

    std::ifstream in(a);
    const auto t = io::read_csv(in);
    EXPECT_EQ(t.header.size(), 11u);
    EXPECT_EQ(t.header[0], "q4");
    ASSERT_FALSE(t.rows.empty());
    const auto inside = t.column("inside_c2");
    EXPECT_TRUE(std::any_of(t.rows.begin(), t.rows.end(), [&](const auto& row) { return row[inside] == "0"; }));
    EXPECT_NE(r1.out.find("accepted"), std::string::npos);
}

TEST(Cut, CsvRoundTripReplaysSamples) {
    const auto r = run({"cut", "--samples", "10000", "--seed", "3", "--streams", "2"});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    const auto t = io::read_csv(in);
    const auto facets = enumerate_facets(Configuration::full(2, 2));
    CutParams p;
    p.samples = 10000;
    p.streams = 2;
    for (const auto& row : t.rows) {
        const SeedInfo info{3, std::stoull(row[t.column("stream")]), std::stoull(row[t.column("draw")])};
        const auto q = replay_proposal(p, info);
        EXPECT_NEAR(std::stod(row[t.column("q4")]), q.q4, 1e-11);
        EXPECT_NEAR(std::stod(row[t.column("q23")]), q.q23, 1e-11);
        EXPECT_NEAR(std::stod(row[t.column("q13")]), q.q13, 1e-11);
        EXPECT_EQ(row[t.column("inside_c2")], membership(q, facets, p.epsilon) ? "1" : "0");
    }
}

TEST(Cut, JsonHasSummary) {
    const auto r = run({"--format", "json", "cut", "--samples", "2000"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["params"]["samples"], 2000);
    EXPECT_EQ(j["summary"]["accepted"].get<std::size_t>(), j["samples"].size());
}

TEST(Cut, InvalidRanges) {
    EXPECT_EQ(run({"cut", "--eps", "-0.1"}).code, 2);
    EXPECT_EQ(run({"cut", "--a", "1.5"}).code, 2);
    EXPECT_EQ(run({"cut", "--samples", "0"}).code, 2);
    EXPECT_EQ(run({"cut", "--mode", "exhaustive"}).code, 2);
    EXPECT_EQ(run({"--threads", "0", "cut"}).code, 2);
    EXPECT_EQ(run({"cut", "--samples", "abc"}).code, 2);
}

TEST(Check, ChAndP684) {
    auto r = run({"check", "--inequality", data("ch.json"), "--config", "2x2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("classical min: -1\nclassical max: 0\nvalid: yes"), std::string::npos);
    r = run({"check", "--inequality", data("ch_lower.json"), "--config", "2x2"});
    EXPECT_NE(r.out.find("valid: yes"), std::string::npos);
    r = run({"check", "--inequality", data("p684.json"), "--config", "3x3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("classical max: 0\n"), std::string::npos);
    EXPECT_NE(r.out.find("valid: yes"), std::string::npos);
}

TEST(Check, ReportsInvalidInequality) {
    TempDir dir;
    const auto path = write_file(dir, "tight.json", R"({"coeffs": {"13": 1, "14": 1, "24": 1, "23": -1, "1": -1, "4": -1}, "bound": -0.5})");
    const auto r = run({"--format", "json", "check", "--inequality", path, "--config", "2x2"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["valid"], false);
    EXPECT_EQ(j["max"], 0.0);
}

TEST(Check, ValidationErrors) {
    TempDir dir;
    const auto empty = write_file(dir, "empty.json", R"({"coeffs": {}, "bound": 0})");
    const auto broken = write_file(dir, "broken.json", "{\"coeffs\": ");
    const auto wrong_label = write_file(dir, "label.json", R"({"coeffs": {"16": 1}})");
    EXPECT_EQ(run({"check", "--inequality", empty, "--config", "2x2"}).code, 2);
    EXPECT_EQ(run({"check", "--inequality", broken, "--config", "2x2"}).code, 2);
    EXPECT_EQ(run({"check", "--inequality", wrong_label, "--config", "2x2"}).code, 2);
    EXPECT_EQ(run({"check", "--inequality", dir.file("missing.json"), "--config", "2x2"}).code, 2);
    EXPECT_EQ(run({"check", "--inequality", data("ch.json")}).code, 2);
    EXPECT_EQ(run({"check", "--inequality", data("ch.json"), "--config", "13x12"}).code, 2);
}

TEST(ExitCodes, Mapping) {
    std::ostringstream err;
    EXPECT_EQ(cli::exit_code_for(HullError("eig failed", 0.75, 1e-3), err), cli::kExitNumeric);
    EXPECT_NE(err.str().find("theta=0.75"), std::string::npos);
    EXPECT_EQ(cli::exit_code_for(NumericError("no convergence", 1.0), err), cli::kExitNumeric);
    EXPECT_EQ(cli::exit_code_for(InvalidArgument("bad"), err), cli::kExitUsage);
    try {
        const auto j = nlohmann::json::parse("{");
        FAIL() << j.dump();
    } catch (const nlohmann::json::exception& e) {
        EXPECT_EQ(cli::exit_code_for(e, err), cli::kExitUsage);
    }
    EXPECT_EQ(cli::exit_code_for(std::runtime_error("other"), err), cli::kExitNumeric);
}

TEST(ExitCodes, HelpIsSuccess) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("hull"), std::string::npos);
}
