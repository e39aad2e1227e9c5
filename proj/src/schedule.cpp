#include "railq/schedule.hpp"

#include "railq/errors.hpp"

#include <algorithm>

namespace railq {

Schedule unavoidable_schedule(const RailwayInstance& instance) {
    Schedule schedule;
    schedule.delays.resize(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto& du = instance.unavoidable_delays()[j];
        schedule.delays[j].assign(du.begin(), du.begin() + static_cast<std::ptrdiff_t>(instance.decision_count(j)));
    }
    return schedule;
}

void check_shape(const RailwayInstance& instance, const Schedule& schedule) {
    if (schedule.delays.size() != instance.train_count()) {
        throw DomainError("schedule covers " + std::to_string(schedule.delays.size()) + " trains, instance has " +
                          std::to_string(instance.train_count()));
    }
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        if (schedule.delays[j].size() != instance.decision_count(j)) {
            throw DomainError("schedule for train '" + instance.route(j).id + "' has " +
                              std::to_string(schedule.delays[j].size()) + " delays, expected " +
                              std::to_string(instance.decision_count(j)));
        }
    }
}

Minutes leave_time(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank) {
    return instance.scheduled_leave(j, rank) + schedule.at(j, rank);
}

Minutes entry_time(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank) {
    if (rank == 0) return instance.scheduled_entry(j, 0) + instance.unavoidable_delay(j, 0);
    return leave_time(instance, schedule, j, rank - 1) + tau2(instance, j, rank - 1);
}

Minutes secondary_delay(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank) {
    return schedule.at(j, rank) - instance.unavoidable_delay(j, rank);
}

DelaySummary summarize(const RailwayInstance& instance, const Schedule& schedule) {
    DelaySummary summary;
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto decisions = instance.decision_count(j);
        for (std::size_t k = 0; k < decisions; ++k) {
            summary.max_secondary = std::max(summary.max_secondary, secondary_delay(instance, schedule, j, k));
        }
        const auto last = secondary_delay(instance, schedule, j, decisions - 1);
        summary.final_secondary.push_back(last);
        summary.sum_secondary_final += last;
    }
    return summary;
}

std::vector<Minutes> flatten(const Schedule& schedule) {
    std::vector<Minutes> out;
    for (const auto& row : schedule.delays) out.insert(out.end(), row.begin(), row.end());
    return out;
}

namespace {

std::vector<BlockTimes> shifted_times(const RailwayInstance& instance, const std::vector<std::vector<Minutes>>& shift,
                                      const std::vector<Minutes>& entry_shift) {
    std::vector<BlockTimes> rows;
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto& route = instance.route(j);
        const auto& tt = instance.times(j);
        std::size_t rank = 0;
        for (std::size_t p = 0; p < route.blocks.size(); ++p) {
            const Minutes tt_in = p == 0 ? tt.t_out[0] - tt.p_timetable[0] : tt.t_out[p - 1];
            BlockTimes row{j, route.blocks[p], 0, 0};
            if (p == 0) {
                row.t_in = tt_in + entry_shift[j];
                row.t_out = tt.t_out[0] + shift[j][0];
            } else {
                // everything after station `rank` moves with the delay taken there
                const Minutes d = shift[j][rank];
                row.t_in = tt_in + d;
                const bool at_next_station = rank + 1 < route.stations.size() && route.station_positions[rank + 1] == p;
                if (!at_next_station) {
                    row.t_out = tt.t_out[p] + d;
                } else if (rank + 2 < route.stations.size()) {
                    row.t_out = tt.t_out[p] + shift[j][rank + 1];
                } else {
                    row.t_out = row.t_in + tt.p_timetable[p];
                }
                if (at_next_station) ++rank;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace

std::vector<BlockTimes> block_times(const RailwayInstance& instance, const Schedule& schedule) {
    check_shape(instance, schedule);
    std::vector<Minutes> entry(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) entry[j] = instance.unavoidable_delay(j, 0);
    return shifted_times(instance, schedule.delays, entry);
}

std::vector<BlockTimes> timetable_block_times(const RailwayInstance& instance) {
    std::vector<std::vector<Minutes>> zero(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) zero[j].assign(instance.decision_count(j), 0);
    return shifted_times(instance, zero, std::vector<Minutes>(instance.train_count(), 0));
}

} // namespace railq
