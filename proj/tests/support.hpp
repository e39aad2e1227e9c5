#pragma once

#include "railq/instance_io.hpp"
#include "railq/qubo.hpp"
#include "railq/rail_model.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

namespace railq::testing {

inline std::string data_path(const std::string& name) {
    return std::string(RAILQ_DATA_DIR) + "/" + name;
}

inline RailwayInstance load(const std::string& name) {
    return load_instance(data_path(name));
}

inline Rational R(std::int64_t num, std::int64_t den = 1) {
    return {num, den};
}

inline Bits bits_of(std::uint64_t mask, std::size_t n) {
    Bits x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return x;
}

inline TimetableEntry row(const std::string& train, const std::string& block, Minutes t_out, Minutes p,
                          Minutes p_min) {
    return {train, block, t_out, p, p_min};
}

/// Three stations S1 - L1 - S2 - L2 - S3, trains A and B towards S3, C back, A turns into C.
/// d_max = 1 everywhere, so 3 trains x 2 decisions x 2 delays = 12 variables.
///
/// Hand count of excluded pairs:
///   min_pass      A: alpha = 1, delays {1,2} -> {0,1}, d' < d - 1 only for (2, 0);
///                 B: alpha = 0, delays {0,1} -> {0,1}, d' < d only for (1, 0)             -> 2
///   single_block  B leaves 5 min after A, tau1 = 5: at S1 (1,0),(2,0),(2,1); at S2 (1,0) -> 4
///   deadlock      B leaves S2 at 612, C leaves S3 at 617, tau2 = 5: (dB, dC) = (1, 0)   -> 1
///   rolling_stock R = 617 - 607 - 5 - 4 = 1, d_C <= d_A - 1: (1, 0)                     -> 1
inline InstanceData reduced_data() {
    InstanceData d;
    d.name = "reduced-12";
    d.blocks = {{"S1", BlockKind::station, 2}, {"L1", BlockKind::line, 1}, {"S2", BlockKind::station, 2},
                {"L2", BlockKind::line, 1},    {"S3", BlockKind::station, 2}};
    const std::vector<std::string> up{"S1", "L1", "S2", "L2", "S3"};
    const std::vector<std::string> down{"S3", "L2", "S2", "L1", "S1"};
    d.trains = {{"A", Direction::dir0, up, R(3, 2), 1},
                {"B", Direction::dir0, up, R(1), 1},
                {"C", Direction::dir1, down, R(1, 2), 1}};
    d.timetable = {row("A", "S1", 600, 1, 1), row("A", "L1", 605, 5, 5), row("A", "S2", 607, 2, 1),
                   row("A", "L2", 612, 5, 5), row("A", "S3", 613, 1, 1),
                   row("B", "S1", 605, 1, 1), row("B", "L1", 610, 5, 5), row("B", "S2", 612, 2, 2),
                   row("B", "L2", 617, 5, 5), row("B", "S3", 618, 1, 1),
                   row("C", "S3", 617, 1, 1), row("C", "L2", 622, 5, 5), row("C", "S2", 624, 2, 1),
                   row("C", "L1", 629, 5, 5), row("C", "S1", 630, 1, 1)};
    d.scenario.entry_delays = {{"A", 1}, {"B", 0}, {"C", 0}};
    d.scenario.turnover_pairs = {{"A", "C", 4}};
    d.penalties = {R(7, 4), R(7, 4)};
    return d;
}

/// Random instance on a line of `stations` stations, every train running end to end.
/// Used by property tests; small enough for exhaustive QUBO search.
inline InstanceData random_instance(std::uint64_t seed, std::size_t trains) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](Minutes lo, Minutes hi) { return std::uniform_int_distribution<Minutes>(lo, hi)(rng); };

    InstanceData d;
    d.name = "random-" + std::to_string(seed);
    const auto stations = static_cast<std::size_t>(uniform(2, 3));
    std::vector<std::string> up;
    for (std::size_t s = 0; s < stations; ++s) {
        if (s > 0) {
            d.blocks.push_back({"L" + std::to_string(s), BlockKind::line, 1});
            up.push_back(d.blocks.back().id);
        }
        d.blocks.push_back({"S" + std::to_string(s), BlockKind::station, static_cast<int>(uniform(1, 3))});
        up.push_back(d.blocks.back().id);
    }
    const std::vector<std::string> down(up.rbegin(), up.rend());
    const auto d_max = uniform(1, stations == 2 ? 3 : 2);

    std::vector<std::pair<std::size_t, Minutes>> arrivals;   // dir0 train, arrival at the far end
    for (std::size_t j = 0; j < trains; ++j) {
        const auto id = "T" + std::to_string(j);
        const auto dir = uniform(0, 1) == 0 ? Direction::dir0 : Direction::dir1;
        const auto& route = dir == Direction::dir0 ? up : down;
        d.trains.push_back({id, dir, route, Rational(uniform(1, 4), 2), d_max});
        Minutes t = 600 + uniform(0, 12);
        for (std::size_t p = 0; p < route.size(); ++p) {
            const bool line = route[p][0] == 'L';
            const Minutes pt = line ? uniform(2, 6) : uniform(1, 3);
            const Minutes pmin = uniform(std::max<Minutes>(1, pt - 1), pt);
            if (p > 0) t += pt;
            d.timetable.push_back(row(id, route[p], t, pt, pmin));
        }
        if (dir == Direction::dir0) arrivals.emplace_back(j, t);
        d.scenario.entry_delays[id] = uniform(0, 3);
    }
    // occasionally a turnover from a dir0 train into a later dir1 train
    for (const auto& [from, arrival] : arrivals) {
        for (std::size_t to = 0; to < trains; ++to) {
            if (d.trains[to].direction != Direction::dir1 || uniform(0, 3) != 0) continue;
            const auto depart = std::find_if(d.timetable.begin(), d.timetable.end(),
                                             [&](const auto& e) { return e.train == d.trains[to].id; })->t_out;
            if (depart > arrival) {
                d.scenario.turnover_pairs.push_back({d.trains[from].id, d.trains[to].id, uniform(0, depart - arrival)});
                return d;
            }
        }
    }
    return d;
}

} // namespace railq::testing
