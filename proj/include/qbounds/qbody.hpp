#pragma once

// Monte-Carlo exploration of the quantum body Q(2): sample probability
// vectors from random states and projectors, postselect the two-dimensional
// cut q1 = q2 = q3 = a, q13 = q14 = q24 = b (each within +-epsilon), and
// classify the survivors against the classical polytope C(2).

#include <qbounds/bell.hpp>
#include <qbounds/error.hpp>
#include <qbounds/polytope.hpp>
#include <qbounds/probability.hpp>
#include <qbounds/quantum.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace qbounds {

/// Left settings E1 (=1), E2 (=2); right settings F1 (=3), F2 (=4).
using SettingQuadruple = std::array<Projector, 4>;

inline ProbabilityVector8 probability_vector(const DensityMatrix& w, const SettingQuadruple& s) {
    const auto& [e1, e2, f1, f2] = s;
    ProbabilityVector8 q;
    q.q1 = prob_single_left(w, e1);
    q.q2 = prob_single_left(w, e2);
    q.q3 = prob_single_right(w, f1);
    q.q4 = prob_single_right(w, f2);
    q.q13 = prob_joint(w, e1, f1);
    q.q23 = prob_joint(w, e2, f1);
    q.q14 = prob_joint(w, e1, f2);
    q.q24 = prob_joint(w, e2, f2);
    return q;
}

/// One random state and four random settings (Bloch directions unless planar).
inline ProbabilityVector8 sample_qvector(SeededGenerator& rng, bool planar = false) {
    const auto w = random_state(rng);
    auto draw = [&] { return planar ? random_planar_projector(rng) : random_projector(rng); };
    const SettingQuadruple s{draw(), draw(), draw(), draw()};
    return probability_vector(w, s);
}

/// Planar angles of the extremal witness: 0, 2pi/3 on the left, 2pi/3, -2pi/3 on the right.
inline constexpr std::array<double, 4> kWitnessAngles{0.0, 2.0 * std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0,
                                                      -2.0 * std::numbers::pi / 3.0};

struct Witness {
    DensityMatrix state;
    SettingQuadruple settings;
    ProbabilityVector8 vector;
};

/// Singlet with the witness angles: q1..q4 = 1/2, q13 = q14 = q24 = 3/8, q23 = 0,
/// so P_CH = 1/8 and the point lies outside C(2).
inline Witness witness_extremal() {
    auto state = singlet();
    SettingQuadruple settings{projector_planar(kWitnessAngles[0]), projector_planar(kWitnessAngles[1]),
                              projector_planar(kWitnessAngles[2]), projector_planar(kWitnessAngles[3])};
    const auto vector = probability_vector(state, settings);
    return {std::move(state), std::move(settings), vector};
}

enum class CutMode { rejection, guided };

struct CutParams {
    double a = 0.5;
    double b = 0.375;
    double epsilon = 0.015;
    std::size_t samples = 100000;  // proposals, not acceptances
    CutMode mode = CutMode::guided;
    double perturbation = 0.1;  // half-width of the uniform noise in guided mode
    bool planar = false;
    std::size_t streams = 1;

    void validate() const {
        auto unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
        if (!unit(a) || !unit(b)) throw InvalidArgument("cut: a and b must lie in [0, 1]");
        if (!std::isfinite(epsilon) || epsilon < 0.0) throw InvalidArgument("cut: epsilon must be >= 0");
        if (samples < 1) throw InvalidArgument("cut: samples must be positive");
        if (!std::isfinite(perturbation) || perturbation < 0.0)
            throw InvalidArgument("cut: perturbation must be >= 0");
        if (streams < 1) throw InvalidArgument("cut: streams must be positive");
    }

    bool in_window(const ProbabilityVector8& q) const {
        auto near = [this](double x, double target) { return std::abs(x - target) <= epsilon; };
        return near(q.q1, a) && near(q.q2, a) && near(q.q3, a) && near(q.q13, b) && near(q.q14, b) && near(q.q24, b);
    }
};

struct SeedInfo {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
    std::uint64_t draw = 0;
};

struct CutSample {
    ProbabilityVector8 vector;
    bool inside_c2 = true;  // full facet list, epsilon-relaxed
    bool inside_ch = true;  // CH-class facets only
    SeedInfo seed;

    double q4() const noexcept { return vector.q4; }
    double q23() const noexcept { return vector.q23; }
};

/// Generator for one proposal. The stream seed is master + stream; the draw
/// index is mixed in through a seed sequence so any proposal can be replayed
/// without regenerating its predecessors.
inline SeededGenerator proposal_generator(const SeedInfo& info) {
    const std::uint64_t stream_seed = info.master + info.stream;
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffU); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(stream_seed), hi(stream_seed), lo(info.draw), hi(info.draw)};
    std::mt19937_64 engine(seq);
    return SeededGenerator(engine());
}

namespace detail {

inline double symmetric_noise(SeededGenerator& rng, double half_width) {
    return half_width == 0.0 ? 0.0 : rng.uniform(-half_width, half_width);
}

// Witness family with uniform noise on the 16 state parameters, the polar
// angles, and (unless planar) the azimuths of the four settings.
inline ProbabilityVector8 guided_proposal(SeededGenerator& rng, double noise, bool planar) {
    auto b = singlet_params().values();
    for (auto& x : b) x += symmetric_noise(rng, noise);
    const auto w = density_from_params(StateParams(b));

    auto setting = [&](double theta) {
        const double polar = theta + symmetric_noise(rng, noise);
        if (planar) return projector_planar(polar);
        const double azimuth = symmetric_noise(rng, noise);
        return projector_bloch(BlochVector(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                                           std::cos(polar)));
    };
    SettingQuadruple s{setting(kWitnessAngles[0]), setting(kWitnessAngles[1]), setting(kWitnessAngles[2]),
                       setting(kWitnessAngles[3])};
    return probability_vector(w, s);
}

}  // namespace detail

/// Recomputes the proposal identified by `info` under `params`.
inline ProbabilityVector8 replay_proposal(const CutParams& params, const SeedInfo& info) {
    auto rng = proposal_generator(info);
    return params.mode == CutMode::guided ? detail::guided_proposal(rng, params.perturbation, params.planar)
                                          : sample_qvector(rng, params.planar);
}

inline std::vector<Facet> ch_class_facets(std::span<const Facet> facets) {
    std::vector<Facet> out;
    std::copy_if(facets.begin(), facets.end(), std::back_inserter(out), [](const Facet& f) { return f.is_ch_class(); });
    return out;
}

/// Draws params.samples proposals split over params.streams streams, keeps
/// those inside the six windows, and classifies them against `facets`.
/// Output order is (stream, draw) regardless of the thread count.
inline std::vector<CutSample> run_cut(const CutParams& params, std::uint64_t master_seed,
                                      std::span<const Facet> facets, std::size_t threads = 1) {
    params.validate();
    if (threads < 1) throw InvalidArgument("cut: threads must be positive");
    const auto ch_facets = ch_class_facets(facets);

    std::vector<SeedInfo> plan;
    plan.reserve(params.samples);
    for (std::uint64_t s = 0; s < params.streams; ++s) {
        const std::uint64_t count = params.samples / params.streams + (s < params.samples % params.streams ? 1 : 0);
        for (std::uint64_t d = 0; d < count; ++d) plan.push_back({master_seed, s, d});
    }

    auto work = [&](std::size_t begin, std::size_t end, std::vector<CutSample>& out) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto q = replay_proposal(params, plan[k]);
            if (!params.in_window(q)) continue;
            out.push_back({q, membership(q, facets, params.epsilon), membership(q, ch_facets, params.epsilon),
                           plan[k]});
        }
    };

    threads = std::min(threads, plan.size());
    std::vector<std::vector<CutSample>> parts(threads);
    if (threads == 1) {
        work(0, plan.size(), parts[0]);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (plan.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(plan.size(), t * chunk), end = std::min(plan.size(), begin + chunk);
            pool.emplace_back(work, begin, end, std::ref(parts[t]));
        }
        for (auto& th : pool) th.join();
    }

    std::vector<CutSample> accepted;
    for (auto& part : parts) accepted.insert(accepted.end(), part.begin(), part.end());
    return accepted;
}

struct CutSummary {
    std::size_t total = 0;
    std::size_t inside = 0;
    std::size_t outside = 0;
    std::size_t outside_ch = 0;  // rejected by a CH-class facet
    double q4_min = std::numeric_limits<double>::quiet_NaN();
    double q4_max = std::numeric_limits<double>::quiet_NaN();
    double q23_min = std::numeric_limits<double>::quiet_NaN();
    double q23_max = std::numeric_limits<double>::quiet_NaN();
};

/// Re-derives inside_c2 / inside_ch for every sample and tallies the cut.
inline CutSummary classify_region(std::span<CutSample> samples, std::span<const Facet> facets, double epsilon) {
    const auto ch_facets = ch_class_facets(facets);
    CutSummary s;
    for (auto& sample : samples) {
        sample.inside_c2 = membership(sample.vector, facets, epsilon);
        sample.inside_ch = membership(sample.vector, ch_facets, epsilon);
        ++s.total;
        sample.inside_c2 ? ++s.inside : ++s.outside;
        if (!sample.inside_ch) ++s.outside_ch;
        if (s.total == 1) {
            s.q4_min = s.q4_max = sample.q4();
            s.q23_min = s.q23_max = sample.q23();
        } else {
            s.q4_min = std::min(s.q4_min, sample.q4());
            s.q4_max = std::max(s.q4_max, sample.q4());
            s.q23_min = std::min(s.q23_min, sample.q23());
            s.q23_max = std::max(s.q23_max, sample.q23());
        }
    }
    return s;
}

}  // namespace qbounds
