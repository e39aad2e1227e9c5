#include "support.hpp"

#include "railq/errors.hpp"
#include "railq/solvers.hpp"
#include "railq/validate.hpp"

#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <tuple>
#include <sstream>

using namespace railq;
using namespace railq::testing;

namespace {

/// Plain 2^n scan, the oracle for both exact methods.
std::map<Rational, std::vector<Bits>> scan(const QuboMatrix& Q) {
    std::map<Rational, std::vector<Bits>> levels;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << Q.size()); ++m) {
        const auto x = bits_of(m, Q.size());
        levels[Q.energy(x)].push_back(x);
    }
    for (auto& [e, states] : levels) std::sort(states.begin(), states.end());
    return levels;
}

QuboMatrix random_qubo(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    QuboMatrix Q(n);
    for (std::size_t i = 0; i < n; ++i) {
        Q.add_diagonal(i, Rational(static_cast<std::int64_t>(rng() % 9) - 4, 2));
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng() % 3 == 0) Q.add_symmetric(i, j, Rational(static_cast<std::int64_t>(rng() % 7) - 3, 4));
        }
    }
    return Q;
}

} // namespace

TEST(Solvers, SimpleExampleSpectrum) {
    const auto p = build_qubo(load("simple_2train.json"));
    SpectrumOptions o;
    o.k_levels = 3;
    const auto spectrum = brute_force_spectrum(p, o);
    ASSERT_EQ(spectrum.size(), 3U);
    EXPECT_EQ(spectrum[0].energy, R(-3));
    EXPECT_EQ(spectrum[0].states, (std::vector<Bits>{{0, 1, 1, 0}}));
    EXPECT_EQ(spectrum[1].energy, R(-5, 2));
    EXPECT_EQ(spectrum[1].states, (std::vector<Bits>{{1, 0, 0, 1}}));
}

TEST(Solvers, ExactMethodsMatchScan) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto n = 3 + seed % 12;
        const auto Q = random_qubo(seed, n);
        const auto oracle = scan(Q);
        for (auto method : {SpectrumMethod::gray_code, SpectrumMethod::branch_and_bound}) {
            SpectrumOptions o;
            o.k_levels = 4;
            o.method = method;
            o.threads = 1 + seed % 3;
            const auto got = brute_force_spectrum(Q, o);
            auto it = oracle.begin();
            ASSERT_EQ(got.size(), std::min<std::size_t>(4, oracle.size()));
            for (const auto& level : got) {
                EXPECT_EQ(level.energy, it->first) << "seed " << seed;
                EXPECT_EQ(level.states, it->second) << "seed " << seed;
                ++it;
            }
        }
    }
}

TEST(Solvers, GroupAwareSearchMatchesScanOnReducedInstance) {
    const RailwayInstance inst(reduced_data());
    const auto p = build_qubo(inst);
    const auto oracle = scan(p.Q);
    for (auto method : {SpectrumMethod::gray_code, SpectrumMethod::branch_and_bound}) {
        SpectrumOptions o;
        o.k_levels = 5;
        o.method = method;
        const auto got = brute_force_spectrum(p, o);
        auto it = oracle.begin();
        for (const auto& level : got) {
            EXPECT_EQ(level.energy, it->first);
            EXPECT_EQ(level.states, it->second);
            ++it;
        }
    }
}

TEST(Solvers, EnumerateBelow) {
    const RailwayInstance inst(reduced_data());
    const auto p = build_qubo(inst);
    const auto oracle = scan(p.Q);
    const auto threshold = std::next(oracle.begin(), 3)->first;
    const auto got = enumerate_below(p, threshold);
    ASSERT_EQ(got.size(), 3U);
    auto it = oracle.begin();
    for (const auto& level : got) {
        EXPECT_LT(level.energy, threshold);
        EXPECT_EQ(level.states, it->second);
        ++it;
    }
}

TEST(Solvers, Line216GroundState) {
    const auto inst = load("line216.json");
    const auto p = build_qubo(inst);
    const auto spectrum = brute_force_spectrum(p);
    ASSERT_EQ(spectrum.size(), 1U);
    EXPECT_EQ(spectrum[0].energy, R(-21, 2) + R(17, 14));
    EXPECT_EQ(spectrum[0].degeneracy(), 4U);
}

TEST(Solvers, CapacityLimit) {
    const auto p = build_qubo(load("line191_case1.json"));
    EXPECT_THROW(brute_force_spectrum(p), CapacityError);
    SpectrumOptions o;
    o.max_vars = 10;
    EXPECT_THROW(brute_force_spectrum(build_qubo(load("line216.json")), o), CapacityError);
    o.k_levels = 0;
    EXPECT_THROW(brute_force_spectrum(build_qubo(load("simple_2train.json")), o), ParameterError);
}

TEST(Solvers, AnnealingFindsSimpleGround) {
    const auto p = build_qubo(load("simple_2train.json"));
    const auto samples = simulated_annealing(p.Q);
    EXPECT_EQ(samples.total(), 1000U);
    EXPECT_EQ(samples.reads.front().energy, R(-3));
    EXPECT_EQ(samples.reads.front().state, (Bits{0, 1, 1, 0}));
    for (std::size_t i = 1; i < samples.reads.size(); ++i) {
        EXPECT_LE(samples.reads[i - 1].energy, samples.reads[i].energy);
    }
}

TEST(Solvers, AnnealingWithLargePenaltiesStaysOneHot) {
    const auto inst = load("simple_2train.json");
    const auto p = build_qubo(inst, R(40), R(40));
    AnnealParams params;
    params.num_reads = 100;
    params.seed = 11;
    const auto samples = simulated_annealing(p.Q, params);
    for (const auto& r : samples.reads) EXPECT_TRUE(decode(p, r.state).ok()) << bit_string(r.state);
}

TEST(Solvers, AnnealingIsDeterministicPerSeed) {
    const auto p = build_qubo(load("line216.json"));
    AnnealParams params;
    params.num_reads = 20;
    params.sweeps = 200;
    params.seed = 5;
    params.threads = 1;
    const auto a = simulated_annealing(p.Q, params);
    params.threads = 3;
    const auto b = simulated_annealing(p.Q, params);
    ASSERT_EQ(a.reads.size(), b.reads.size());
    for (std::size_t i = 0; i < a.reads.size(); ++i) {
        EXPECT_EQ(a.reads[i].state, b.reads[i].state);
        EXPECT_EQ(a.reads[i].multiplicity, b.reads[i].multiplicity);
    }
}

TEST(Solvers, AnnealingParameterChecks) {
    const auto p = build_qubo(load("simple_2train.json"));
    AnnealParams params;
    params.num_reads = 0;
    EXPECT_THROW(simulated_annealing(p.Q, params), ParameterError);
    params = {};
    params.sweeps = 0;
    EXPECT_THROW(simulated_annealing(p.Q, params), ParameterError);
    params = {};
    params.beta_min = 5;
    params.beta_max = 1;
    EXPECT_THROW(simulated_annealing(p.Q, params), ParameterError);
}

TEST(Solvers, BestFeasible) {
    const auto inst = load("simple_2train.json");
    const auto p = build_qubo(inst);
    SampleSet broken;
    broken.reads = {{{1, 1, 0, 0}, p.energy({1, 1, 0, 0}), 3}, {{0, 0, 0, 0}, R(0), 1}};
    EXPECT_FALSE(best_feasible(broken, p, inst).has_value());

    SampleSet mixed;
    mixed.reads = {{{1, 0, 1, 0}, R(0), 1}, {{0, 1, 1, 0}, R(-3), 2}};
    const auto best = best_feasible(mixed, p, inst);
    ASSERT_TRUE(best.has_value());
    EXPECT_EQ(best->state, (Bits{0, 1, 1, 0}));
    EXPECT_EQ(best->schedule, (Schedule{{{2}, {1}}}));
}

TEST(Solvers, CsvOutput) {
    const auto inst = load("simple_2train.json");
    const auto p = build_qubo(inst);
    SpectrumOptions o;
    o.k_levels = 2;
    std::stringstream ss;
    write_spectrum_csv(ss, brute_force_spectrum(p, o), p, inst);
    EXPECT_EQ(ss.str(), "energy,degeneracy,state,feasible\n-3,1,0110,1\n-2.5,1,1001,1\n");
}

TEST(Solvers, ThreadCountFromEnvironment) {
    ::setenv("RAILQ_THREADS", "3", 1);
    EXPECT_EQ(default_thread_count(), 3U);
    ::unsetenv("RAILQ_THREADS");
    EXPECT_GE(default_thread_count(), 1U);
}

TEST(Solvers, Line216FeasibleBandBelowFirstBrokenGroup) {
    // an emptied one-hot group costs only p_sum and sheds its pair terms, so the all-feasible
    // band above the ground state is narrower than p_pair
    const auto inst = load("line216.json");
    for (const auto& [p_sum, p_pair, gap] : {std::tuple{R(7, 4), R(7, 4), R(27, 28)},
                                             std::tuple{R(11, 5), R(27, 10), R(99, 70)}}) {
        const auto p = build_qubo(inst, p_sum, p_pair);
        const auto ground = brute_force_spectrum(p).front().energy;
        std::optional<Rational> first_infeasible;
        for (const auto& level : enumerate_below(p, ground + p_pair)) {
            for (const auto& x : level.states) {
                const bool feasible = check_state(inst, p, x).feasible();
                EXPECT_EQ(feasible, hard_penalty(p, x) == R(0)) << bit_string(x);
                if (!feasible && !first_infeasible) first_infeasible = level.energy;
            }
        }
        ASSERT_TRUE(first_infeasible.has_value());
        EXPECT_EQ(*first_infeasible - ground, gap);
        EXPECT_LT(gap, p_pair);
    }
}
