#pragma once

#include "railq/rail_model.hpp"
#include "railq/schedule.hpp"
#include "railq/validate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace railq {

enum class ResourceKind { station, segment };

/// A contested resource of trains a < b. Either a goes first (d_b >= d_a + lag_ab) or
/// b goes first (d_a >= d_b + lag_ba); the compared delays are at ranks rank_a / rank_b.
struct Disjunction {
    ResourceKind kind = ResourceKind::station;
    TrainIndex a = 0;
    TrainIndex b = 0;
    std::size_t rank_a = 0;
    std::size_t rank_b = 0;
    /// Station block (same direction) or the first line block of the segment along direction dir0.
    BlockIndex block = 0;
    Minutes lag_ab = 0;
    Minutes lag_ba = 0;
};

/// All disjunctions of the instance, in a fixed deterministic order.
std::vector<Disjunction> disjunctions(const RailwayInstance& instance);

/// Per disjunction: +1 a first, -1 b first, 0 open (not enforced).
struct PrecedenceAssignment {
    std::vector<std::int8_t> order;

    bool operator==(const PrecedenceAssignment&) const = default;
};

PrecedenceAssignment open_assignment(const std::vector<Disjunction>& list);

/// Fixes `first` before `second` on the resource identified by `block`; returns false if no
/// disjunction of that pair uses the block.
bool set_precedence(const std::vector<Disjunction>& list, PrecedenceAssignment& assignment, TrainIndex first,
                    TrainIndex second, BlockIndex block);

/// The order a schedule realizes (ties resolved in favour of a).
PrecedenceAssignment assignment_from_schedule(const RailwayInstance& instance, const std::vector<Disjunction>& list,
                                              const Schedule& schedule);

/// +1 / -1 if the schedule satisfies the a-first / b-first alternative, 0 if neither.
int satisfied_alternative(const RailwayInstance& instance, const Disjunction& d, const Schedule& schedule);

struct EarliestResult {
    std::optional<Schedule> schedule;
    /// Decisions (train, rank) on a positive cycle when the order is cyclic.
    std::vector<std::pair<TrainIndex, std::size_t>> cycle;
    std::string reason;

    [[nodiscard]] bool feasible() const { return schedule.has_value(); }
};

/// Componentwise-minimal delays for the fixed part of the assignment. With `bounded`, any
/// delay above d_U + d_max makes the result infeasible.
EarliestResult earliest_schedule(const RailwayInstance& instance, const std::vector<Disjunction>& list,
                                 const PrecedenceAssignment& assignment, bool bounded = true);
EarliestResult earliest_schedule(const RailwayInstance& instance, const PrecedenceAssignment& assignment,
                                 bool bounded = true);

struct ReferenceResult {
    std::string method;
    bool feasible = false;        ///< a schedule was produced
    bool within_bounds = false;   ///< every delay lies in [d_U, d_U + d_max]
    Schedule schedule;
    PrecedenceAssignment assignment;
    Rational objective;
    DelaySummary summary;
    FeasibilityReport report;     ///< full audit, capacity included
    std::size_t nodes = 0;
    std::string message;
};

/// Global optimum of the weighted secondary delay within the d_max bounds, ties broken by the
/// lexicographically smallest delay vector. Station capacity is audited afterwards.
ReferenceResult exact_precedence_solve(const RailwayInstance& instance);

/// First come first served: the train that reaches the contested section first wins.
ReferenceResult fcfs(const RailwayInstance& instance);
/// First leave first served: the train that would clear the contested section first wins.
ReferenceResult flfs(const RailwayInstance& instance);
/// Minimax secondary delay over all decision stations, then the sum at penultimate stations,
/// then lexicographic order.
ReferenceResult amcc(const RailwayInstance& instance);

} // namespace railq
