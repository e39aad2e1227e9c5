#pragma once

#include "railq/rail_model.hpp"

#include <vector>

namespace railq {

/// Delays d(j, s) at the decision stations S_j^* of every train, indexed [train][rank].
struct Schedule {
    std::vector<std::vector<Minutes>> delays;

    [[nodiscard]] Minutes at(TrainIndex j, std::size_t rank) const { return delays.at(j).at(rank); }
    bool operator==(const Schedule&) const = default;
};

/// d = d_U everywhere: the "no dispatching action" schedule.
Schedule unavoidable_schedule(const RailwayInstance& instance);

/// Throws DomainError unless the schedule has one delay per decision station.
void check_shape(const RailwayInstance& instance, const Schedule& schedule);

/// Actual leave time of station rank k (k may be the last decision station).
Minutes leave_time(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank);

/// Actual entry time of station rank k, including the last station.
Minutes entry_time(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank);

Minutes secondary_delay(const RailwayInstance& instance, const Schedule& schedule, TrainIndex j, std::size_t rank);

struct DelaySummary {
    Minutes max_secondary = 0;           ///< over all decision stations
    Minutes sum_secondary_final = 0;     ///< over penultimate stations
    std::vector<Minutes> final_secondary;   ///< per train, at its penultimate station
};

DelaySummary summarize(const RailwayInstance& instance, const Schedule& schedule);

/// Train-major concatenation; the order used for lexicographic tie-breaks.
std::vector<Minutes> flatten(const Schedule& schedule);

/// Entry and leave time of every block of a train's route.
struct BlockTimes {
    TrainIndex train = 0;
    BlockIndex block = 0;
    Minutes t_in = 0;
    Minutes t_out = 0;
};

/// Block occupation reconstructed from the schedule; all reserves are realized at stations,
/// so line blocks shift by the delay of the station they leave from.
std::vector<BlockTimes> block_times(const RailwayInstance& instance, const Schedule& schedule);

/// Block occupation of the undisturbed timetable.
std::vector<BlockTimes> timetable_block_times(const RailwayInstance& instance);

} // namespace railq
