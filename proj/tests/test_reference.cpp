#include "support.hpp"

#include "railq/reference.hpp"
#include "railq/solvers.hpp"
#include "railq/validate.hpp"

#include <gtest/gtest.h>

using namespace railq;
using namespace railq::testing;

TEST(Reference, DisjunctionsOfLine216) {
    const auto inst = load("line216.json");
    const auto list = disjunctions(inst);
    std::size_t stations = 0;
    std::size_t segments = 0;
    for (const auto& d : list) (d.kind == ResourceKind::station ? stations : segments)++;
    // IC5320 / R90602 share stations 5 and 3; IC3521 meets each of them on two segments
    EXPECT_EQ(stations, 2U);
    EXPECT_EQ(segments, 4U);
}

TEST(Reference, KnownOrderGivesExpectedDelays) {
    const auto inst = load("line216.json");
    const auto ic3521 = inst.train_index("IC3521");
    const auto ic5320 = inst.train_index("IC5320");
    const auto r = inst.train_index("R90602");
    const auto b1 = inst.block_index("2");   // segment 1-3
    const auto b4 = inst.block_index("4");   // segment 3-5
    const auto list = disjunctions(inst);
    auto order = open_assignment(list);
    ASSERT_TRUE(set_precedence(list, order, ic5320, ic3521, b4));
    ASSERT_TRUE(set_precedence(list, order, ic3521, r, b4));
    ASSERT_TRUE(set_precedence(list, order, ic3521, ic5320, b1));
    ASSERT_TRUE(set_precedence(list, order, ic3521, r, b1));
    ASSERT_TRUE(set_precedence(list, order, ic5320, r, inst.block_index("5")));
    ASSERT_TRUE(set_precedence(list, order, ic5320, r, inst.block_index("3")));
    EXPECT_FALSE(set_precedence(list, order, ic5320, r, inst.block_index("1")));

    const auto result = earliest_schedule(inst, list, order);
    ASSERT_TRUE(result.feasible()) << result.reason;
    const auto& s = *result.schedule;
    EXPECT_EQ(secondary_delay(inst, s, ic3521, 1), 3);
    EXPECT_EQ(secondary_delay(inst, s, r, 1), 4);
    const auto summary = summarize(inst, s);
    EXPECT_EQ(summary.max_secondary, 4);
    EXPECT_EQ(summary.sum_secondary_final, 7);
    EXPECT_TRUE(check_feasibility(inst, s).feasible());
}

TEST(Reference, CyclicOrderIsReported) {
    const auto inst = load("simple_2train.json");
    const auto list = disjunctions(inst);
    ASSERT_EQ(list.size(), 1U);
    // both trains first is impossible; emulate by two contradictory disjunction copies
    std::vector<Disjunction> twice{list[0], list[0]};
    PrecedenceAssignment order{{1, -1}};
    const auto result = earliest_schedule(inst, twice, order, false);
    EXPECT_FALSE(result.feasible());
    EXPECT_FALSE(result.cycle.empty());
}

TEST(Reference, BoundsMakeOrdersInfeasible) {
    const auto inst = load("line216.json");
    const auto list = disjunctions(inst);
    auto order = open_assignment(list);
    // R90602 ahead of IC5320 at block 5 would need IC5320 far beyond d_max
    set_precedence(list, order, inst.train_index("R90602"), inst.train_index("IC5320"), inst.block_index("5"));
    EXPECT_FALSE(earliest_schedule(inst, list, order, true).feasible());
    EXPECT_TRUE(earliest_schedule(inst, list, order, false).feasible());
}

TEST(Reference, SimpleExample) {
    const auto inst = load("simple_2train.json");
    const auto exact = exact_precedence_solve(inst);
    ASSERT_TRUE(exact.feasible);
    EXPECT_EQ(exact.schedule, (Schedule{{{2}, {1}}}));
    EXPECT_EQ(exact.objective, R(1, 2));
    for (const auto& r : {fcfs(inst), flfs(inst)}) {
        ASSERT_TRUE(r.feasible);
        // ties go to the lower train index
        EXPECT_EQ(r.schedule, (Schedule{{{1}, {2}}}));
        EXPECT_EQ(r.summary.max_secondary, 1);
    }
}

TEST(Reference, HeuristicsAgreeOnLine216) {
    const auto inst = load("line216.json");
    const auto exact = exact_precedence_solve(inst);
    ASSERT_TRUE(exact.feasible);
    EXPECT_EQ(exact.objective, R(17, 14));
    for (const auto& r : {fcfs(inst), flfs(inst), amcc(inst)}) {
        ASSERT_TRUE(r.feasible) << r.method << ": " << r.message;
        EXPECT_TRUE(r.within_bounds);
        EXPECT_TRUE(r.report.feasible()) << format_report(inst, r.report);
        EXPECT_EQ(r.summary.max_secondary, 4) << r.method;
        EXPECT_EQ(r.summary.sum_secondary_final, 7) << r.method;
        EXPECT_EQ(r.objective, R(17, 14)) << r.method;
        EXPECT_TRUE(dispatching_equivalent(inst, r.schedule, exact.schedule)) << r.method;
    }
}

TEST(Reference, HeuristicsDoNotAddIdleDelay) {
    // every heuristic schedule is the earliest one for its own order
    const auto inst = load("line191_case2.json");
    const auto list = disjunctions(inst);
    for (const auto& r : {fcfs(inst), flfs(inst), amcc(inst), exact_precedence_solve(inst)}) {
        ASSERT_TRUE(r.feasible) << r.method;
        const auto again = earliest_schedule(inst, list, r.assignment, false);
        ASSERT_TRUE(again.feasible());
        EXPECT_EQ(*again.schedule, r.schedule) << r.method;
    }
}

TEST(Reference, Line191Properties) {
    for (int c = 1; c <= 4; ++c) {
        const auto inst = load("line191_case" + std::to_string(c) + ".json");
        const auto exact = exact_precedence_solve(inst);
        ASSERT_TRUE(exact.feasible) << "case " << c;
        const auto h = std::vector<ReferenceResult>{fcfs(inst), flfs(inst), amcc(inst)};
        for (const auto& r : h) {
            ASSERT_TRUE(r.feasible) << r.method;
            if (r.within_bounds) EXPECT_LE(exact.objective, r.objective) << "case " << c << " " << r.method;
        }
        EXPECT_LE(h[2].summary.max_secondary, h[0].summary.max_secondary);
        EXPECT_LE(h[2].summary.max_secondary, h[1].summary.max_secondary);
    }
}

TEST(Reference, ExactMatchesQuboOnRandomInstances) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const RailwayInstance inst(random_instance(seed, 2 + seed % 3));
        const auto p = build_qubo(inst);
        const auto exact = exact_precedence_solve(inst);
        // feasible states sit at objective - L, and the objective never exceeds the weight sum
        Rational ceiling = -p.offset_L + 1;
        for (const auto& w : inst.scenario().weights) ceiling += w;
        const auto spectrum = enumerate_below(p, ceiling);
        std::optional<Rational> best;
        for (const auto& level : spectrum) {
            for (const auto& x : level.states) {
                if (hard_penalty(p, x) == Rational(0)) {
                    const auto f = objective_value(inst, *decode(p, x).schedule);
                    if (!best || f < *best) best = f;
                }
            }
        }
        EXPECT_EQ(exact.feasible, best.has_value()) << "seed " << seed;
        if (best && exact.feasible) EXPECT_EQ(exact.objective, *best) << "seed " << seed;
    }
}
