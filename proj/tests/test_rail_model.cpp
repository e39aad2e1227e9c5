#include "support.hpp"

#include "railq/errors.hpp"
#include "railq/rail_model.hpp"

#include <gtest/gtest.h>

using namespace railq;
using namespace railq::testing;

namespace {

TrainIndex train(const RailwayInstance& inst, const char* id) {
    return inst.train_index(id);
}

} // namespace

TEST(RailModel, Line216Structure) {
    const auto inst = load("line216.json");
    EXPECT_EQ(inst.train_count(), 3U);
    EXPECT_EQ(inst.block_count(), 5U);
    for (TrainIndex j = 0; j < 3; ++j) {
        EXPECT_EQ(inst.route(j).stations.size(), 3U);
        EXPECT_EQ(inst.decision_count(j), 2U);
    }
    const auto ic = train(inst, "IC5320");
    EXPECT_EQ(inst.route(ic).direction, Direction::dir1);
    EXPECT_EQ(inst.block(inst.route(ic).stations.front()).id, "5");
}

TEST(RailModel, Line216UnavoidableDelays) {
    const auto inst = load("line216.json");
    // entry delay minus the dwell reserve at block 3
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "IC5320")], (std::vector<Minutes>{15, 8, 8}));
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "IC3521")], (std::vector<Minutes>{5, 4, 4}));
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "R90602")], (std::vector<Minutes>{0, 0, 0}));
}

TEST(RailModel, ZeroReserveKeepsEntryDelay) {
    auto data = load_instance_data(data_path("line216.json"));
    for (auto& e : data.timetable) e.p_min = e.p_timetable;
    const RailwayInstance inst(data);
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "IC5320")], (std::vector<Minutes>{15, 15, 15}));
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "IC3521")], (std::vector<Minutes>{5, 5, 5}));
    EXPECT_EQ(inst.unavoidable_delays()[train(inst, "R90602")], (std::vector<Minutes>{0, 0, 0}));
    for (TrainIndex j = 0; j < inst.train_count(); ++j) EXPECT_EQ(alpha(inst, j, 0), 0);
}

TEST(RailModel, HeadwaysOnLine216) {
    const auto inst = load("line216.json");
    // block 5 -> 3: leaves 13:54, enters block 3 at 14:02
    EXPECT_EQ(tau1(inst, train(inst, "IC5320"), 0), 8);
    // block 1 -> 3: leaves 13:53, enters block 3 at 14:08
    EXPECT_EQ(tau2(inst, train(inst, "IC3521"), 0), 15);
    EXPECT_EQ(tau2(inst, train(inst, "IC3521"), 1), 8);
    EXPECT_EQ(alpha(inst, train(inst, "IC5320"), 0), 7);
    EXPECT_EQ(alpha(inst, train(inst, "IC3521"), 0), 1);
    EXPECT_THROW(tau1(inst, 0, 2), DomainError);
    EXPECT_THROW(tau2(inst, 0, 2), DomainError);
}

TEST(RailModel, Tau1TakesLongestLineBlock) {
    auto data = reduced_data();
    // split L1 into two line blocks of 2 and 3 minutes for A
    data.blocks.insert(data.blocks.begin() + 2, {"L1b", BlockKind::line, 1});
    for (auto& t : data.trains) {
        auto& r = t.route;
        auto it = std::find(r.begin(), r.end(), "L1");
        r.insert(t.direction == Direction::dir0 ? it + 1 : it, "L1b");
    }
    std::vector<TimetableEntry> tt;
    for (const auto& e : data.timetable) {
        if (e.block == "L1" && e.train == "C") {
            tt.push_back(row("C", "L1b", e.t_out - 3, 2, 2));
            tt.push_back(row("C", "L1", e.t_out, 3, 3));
        } else if (e.block == "L1") {
            tt.push_back(row(e.train, "L1", e.t_out - 2, 3, 3));
            tt.push_back(row(e.train, "L1b", e.t_out, 2, 2));
        } else {
            tt.push_back(e);
        }
    }
    data.timetable = tt;
    const RailwayInstance inst(data);
    EXPECT_EQ(tau1(inst, 0, 0), 3);
    EXPECT_EQ(tau2(inst, 0, 0), 5);
}

TEST(RailModel, CommonPath) {
    const auto inst = load("line216.json");
    const auto path = common_path(inst, train(inst, "IC5320"), train(inst, "IC3521"));
    std::vector<std::string> ids;
    for (auto b : path.stations) ids.push_back(inst.block(b).id);
    EXPECT_EQ(ids, (std::vector<std::string>{"5", "3", "1"}));
    ASSERT_EQ(path.truncated.size(), 2U);
    EXPECT_EQ(inst.block(path.truncated[1]).id, "3");
}

TEST(RailModel, LeaveOffsetAndScheduledTimes) {
    const auto inst = load("line216.json");
    const auto ic = train(inst, "IC5320");
    const auto r = train(inst, "R90602");
    EXPECT_EQ(inst.scheduled_leave(ic, 1), 14 * 60 + 10);
    EXPECT_EQ(inst.scheduled_entry(ic, 1), 14 * 60 + 2);
    EXPECT_EQ(leave_offset(inst, ic, 0, r, 0), -27);
}

TEST(RailModel, TurnoverPropagatesDelay) {
    const RailwayInstance inst(reduced_data());
    // A arrives with d = 0 at its last decision; reserve 1 keeps C on time
    EXPECT_EQ(inst.unavoidable_delay(2, 0), 0);
    EXPECT_EQ(turnover_reserve(inst, inst.scenario().turnovers[0]), 1);

    auto data = reduced_data();
    data.scenario.entry_delays["A"] = 4;   // d_U(A, S2) = 3
    const RailwayInstance late(data);
    EXPECT_EQ(late.unavoidable_delay(0, 1), 3);
    // d(C, S3) > 3 - 1
    EXPECT_EQ(late.unavoidable_delay(2, 0), 3);
    EXPECT_EQ(late.unavoidable_delay(2, 1), 2);
}

TEST(RailModel, CyclicTurnoversRejected) {
    auto data = reduced_data();
    data.trains[1].direction = Direction::dir1;
    data.trains[1].route = data.trains[2].route;
    std::vector<TimetableEntry> tt;
    for (const auto& e : data.timetable) {
        if (e.train == "B") continue;
        tt.push_back(e);
        if (e.train == "C") tt.push_back(row("B", e.block, e.t_out + 30, e.p_timetable, e.p_min));
    }
    data.timetable = tt;
    data.scenario.turnover_pairs = {{"A", "C", 0}, {"C", "A", 0}};
    EXPECT_THROW(RailwayInstance{data}, ModelError);
}

TEST(RailModel, ValidationNamesTheField) {
    auto data = reduced_data();
    data.trains[1].d_max = 0;
    try {
        RailwayInstance inst(data);
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("trains[1].d_max"), std::string::npos) << e.what();
    }

    data = reduced_data();
    data.trains[0].route = {"S1", "L9", "S3"};
    EXPECT_THROW(RailwayInstance{data}, ModelError);

    data = reduced_data();
    data.timetable.pop_back();
    EXPECT_THROW(RailwayInstance{data}, ModelError);

    data = reduced_data();
    data.timetable[1].p_min = 6;   // p_min > p_timetable
    EXPECT_THROW(RailwayInstance{data}, ModelError);

    data = reduced_data();
    data.scenario.entry_delays["Z"] = 1;
    EXPECT_THROW(RailwayInstance{data}, ModelError);
}

TEST(RailModel, DerivedTables) {
    const auto inst = load("line216.json");
    const auto derived = derive(inst);
    ASSERT_EQ(derived.tau2.size(), 3U);
    EXPECT_EQ(derived.tau2[train(inst, "IC3521")], (std::vector<Minutes>{15, 8}));
    EXPECT_EQ(derived.alpha[train(inst, "IC5320")], (std::vector<Minutes>{7, 0}));
    EXPECT_TRUE(derived.turnover_reserve.empty());
}
