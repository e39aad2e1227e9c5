#pragma once

#include "railq/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace railq {

/// Integer minutes from the instance epoch (minutes since midnight by default).
using Minutes = std::int64_t;
using TrainIndex = std::size_t;
using BlockIndex = std::size_t;

enum class BlockKind { line, station };
enum class Direction { dir0, dir1 };

std::string_view to_string(BlockKind kind);
std::string_view to_string(Direction direction);

// ---------------------------------------------------------------------------
// Raw instance data, as read from or written to an instance file.
// ---------------------------------------------------------------------------

struct Block {
    std::string id;
    BlockKind kind = BlockKind::line;
    int capacity = 1;

    bool operator==(const Block&) const = default;
};

struct TrainSpec {
    std::string id;
    Direction direction = Direction::dir0;
    std::vector<std::string> route;
    Rational weight{1};
    Minutes d_max = 1;

    bool operator==(const TrainSpec&) const = default;
};

struct TimetableEntry {
    std::string train;
    std::string block;
    Minutes t_out = 0;
    Minutes p_timetable = 0;
    Minutes p_min = 0;

    bool operator==(const TimetableEntry&) const = default;
};

struct TurnoverSpec {
    std::string from;
    std::string to;
    Minutes min_turnover = 0;

    bool operator==(const TurnoverSpec&) const = default;
};

struct ScenarioSpec {
    std::map<std::string, Minutes> entry_delays;
    std::vector<TurnoverSpec> turnover_pairs;

    bool operator==(const ScenarioSpec&) const = default;
};

struct Penalties {
    Rational p_sum{7, 4};
    Rational p_pair{7, 4};

    bool operator==(const Penalties&) const = default;
};

struct InstanceData {
    int schema_version = 1;
    std::string name;
    std::string note;
    std::vector<Block> blocks;
    std::vector<TrainSpec> trains;
    std::vector<TimetableEntry> timetable;
    ScenarioSpec scenario;
    Penalties penalties;

    bool operator==(const InstanceData&) const = default;
};

// ---------------------------------------------------------------------------
// Validated, index-based model.
// ---------------------------------------------------------------------------

struct TrainRoute {
    std::string id;
    Direction direction = Direction::dir0;
    std::vector<BlockIndex> blocks;               ///< every block passed, in order
    std::vector<BlockIndex> stations;             ///< station-kind subsequence of `blocks`
    std::vector<std::size_t> station_positions;   ///< position of each station inside `blocks`
};

/// Scheduled times of one train, aligned with its route blocks.
struct TrainTimes {
    std::vector<Minutes> t_out;
    std::vector<Minutes> p_timetable;
    std::vector<Minutes> p_min;
};

struct Turnover {
    TrainIndex from = 0;
    TrainIndex to = 0;
    Minutes min_turnover = 0;
};

struct DisturbanceScenario {
    std::vector<Minutes> entry_delays;   ///< per train, primary delay at its first station
    std::vector<Minutes> d_max;          ///< per train
    std::vector<Rational> weights;       ///< per train
    std::vector<Turnover> turnovers;
};

/// d_U per train, aligned with the train's station sequence S_j (last station included).
using UnavoidableDelays = std::vector<std::vector<Minutes>>;

/// Immutable single-track line instance: topology, timetable and disturbance.
class RailwayInstance {
public:
    /// Validates the data; throws ModelError with a field path on the first problem found.
    explicit RailwayInstance(InstanceData data);

    [[nodiscard]] const InstanceData& data() const { return data_; }
    [[nodiscard]] const std::string& name() const { return data_.name; }

    [[nodiscard]] std::size_t block_count() const { return blocks_.size(); }
    [[nodiscard]] std::size_t train_count() const { return routes_.size(); }
    [[nodiscard]] const Block& block(BlockIndex b) const { return blocks_.at(b); }
    [[nodiscard]] const TrainRoute& route(TrainIndex j) const { return routes_.at(j); }
    [[nodiscard]] const TrainTimes& times(TrainIndex j) const { return times_.at(j); }
    [[nodiscard]] const DisturbanceScenario& scenario() const { return scenario_; }
    [[nodiscard]] const Penalties& penalties() const { return data_.penalties; }

    [[nodiscard]] BlockIndex block_index(std::string_view id) const;
    [[nodiscard]] TrainIndex train_index(std::string_view id) const;
    [[nodiscard]] std::optional<TrainIndex> find_train(std::string_view id) const;

    /// Rank of `station` in S_j, if the train stops at / passes it.
    [[nodiscard]] std::optional<std::size_t> station_rank(TrainIndex j, BlockIndex station) const;
    /// |S_j^*|: stations where the train's leave time is a decision.
    [[nodiscard]] std::size_t decision_count(TrainIndex j) const {
        return routes_.at(j).stations.size() - 1;
    }
    /// Scheduled leave time of the k-th station of train j.
    [[nodiscard]] Minutes scheduled_leave(TrainIndex j, std::size_t rank) const;
    /// Scheduled entry time of the k-th station of train j.
    [[nodiscard]] Minutes scheduled_entry(TrainIndex j, std::size_t rank) const;

    [[nodiscard]] const UnavoidableDelays& unavoidable_delays() const { return unavoidable_; }
    [[nodiscard]] Minutes unavoidable_delay(TrainIndex j, std::size_t rank) const {
        return unavoidable_.at(j).at(rank);
    }

private:
    InstanceData data_;
    std::vector<Block> blocks_;
    std::vector<TrainRoute> routes_;
    std::vector<TrainTimes> times_;
    DisturbanceScenario scenario_;
    std::unordered_map<std::string, BlockIndex> block_lookup_;
    std::unordered_map<std::string, TrainIndex> train_lookup_;
    UnavoidableDelays unavoidable_;
};

// ---------------------------------------------------------------------------
// Timetable arithmetic.
// ---------------------------------------------------------------------------

/// Propagates entry delays along routes and through turnovers until nothing changes.
/// Throws ModelError on cyclic turnover chains.
UnavoidableDelays propagate_unavoidable_delays(const RailwayInstance& instance);

/// One relaxation pass over routes and turnovers; returns true if any value grew.
bool relax_unavoidable_delays(const RailwayInstance& instance, UnavoidableDelays& delays);

/// Time reserve between station rank k and k+1 of train j: sum of (p_timetable - p_min)
/// over the blocks after the station up to and including the next station.
Minutes alpha(const RailwayInstance& instance, TrainIndex j, std::size_t rank);

/// Same-direction headway: the longest scheduled line-block passage between station
/// rank k and k+1. Throws DomainError on the last station.
Minutes tau1(const RailwayInstance& instance, TrainIndex j, std::size_t rank);

/// Opposite-direction clearance: scheduled time from leaving station rank k to entering
/// the next station. Throws DomainError on the last station.
Minutes tau2(const RailwayInstance& instance, TrainIndex j, std::size_t rank);

/// Delta(j, s, j', s') = t_out^timetable(j, s) - t_out^timetable(j', s').
Minutes leave_offset(const RailwayInstance& instance, TrainIndex j, std::size_t rank,
                     TrainIndex other, std::size_t other_rank);

/// R(j, j') of the rolling-stock condition: d(j', first) > d(j, s_end-1) - R.
Minutes turnover_reserve(const RailwayInstance& instance, const Turnover& turnover);

struct CommonPath {
    std::vector<BlockIndex> stations;    ///< S_{j,j'}, ordered along j
    std::vector<BlockIndex> truncated;   ///< S*_{j,j'}: last element dropped
};

/// Station blocks shared by both routes, in j's order.
CommonPath common_path(const RailwayInstance& instance, TrainIndex j, TrainIndex other);

/// Tabulated derived quantities, indexed [train][station rank] over S_j^*.
struct DerivedQuantities {
    UnavoidableDelays d_unavoidable;
    std::vector<std::vector<Minutes>> alpha;
    std::vector<std::vector<Minutes>> tau1;
    std::vector<std::vector<Minutes>> tau2;
    std::vector<Minutes> turnover_reserve;   ///< aligned with scenario().turnovers
};

DerivedQuantities derive(const RailwayInstance& instance);

} // namespace railq
