#include "railq/rail_model.hpp"

#include "railq/errors.hpp"

#include <algorithm>
#include <set>

namespace railq {

std::string_view to_string(BlockKind kind) {
    return kind == BlockKind::station ? "station" : "line";
}

std::string_view to_string(Direction direction) {
    return direction == Direction::dir0 ? "dir0" : "dir1";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ModelError(where + ": " + what);
}

std::string at(std::string_view array, std::size_t index) {
    return std::string(array) + "[" + std::to_string(index) + "]";
}

} // namespace

RailwayInstance::RailwayInstance(InstanceData data) : data_(std::move(data)) {
    blocks_ = data_.blocks;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& blk = blocks_[b];
        const auto where = at("blocks", b);
        if (blk.id.empty()) fail(where + ".id", "empty block id");
        if (!block_lookup_.emplace(blk.id, b).second) fail(where + ".id", "duplicate block id '" + blk.id + "'");
        if (blk.capacity < 1) fail(where + ".capacity", "capacity must be >= 1");
        if (blk.kind == BlockKind::line && blk.capacity != 1) {
            fail(where + ".capacity", "line block '" + blk.id + "' must have capacity 1");
        }
    }

    const auto trains = data_.trains.size();
    routes_.resize(trains);
    times_.resize(trains);
    scenario_.entry_delays.assign(trains, 0);
    scenario_.d_max.resize(trains);
    scenario_.weights.resize(trains);

    for (TrainIndex j = 0; j < trains; ++j) {
        const auto& spec = data_.trains[j];
        const auto where = at("trains", j);
        if (spec.id.empty()) fail(where + ".id", "empty train id");
        if (!train_lookup_.emplace(spec.id, j).second) fail(where + ".id", "duplicate train id '" + spec.id + "'");
        if (spec.d_max < 1) fail(where + ".d_max", "d_max must be >= 1");
        if (spec.weight <= 0) fail(where + ".weight", "weight must be positive");
        scenario_.d_max[j] = spec.d_max;
        scenario_.weights[j] = spec.weight;

        auto& route = routes_[j];
        route.id = spec.id;
        route.direction = spec.direction;
        std::set<BlockIndex> seen;
        for (std::size_t p = 0; p < spec.route.size(); ++p) {
            auto it = block_lookup_.find(spec.route[p]);
            if (it == block_lookup_.end()) fail(where + ".route[" + std::to_string(p) + "]", "unknown block '" + spec.route[p] + "'");
            if (!seen.insert(it->second).second) fail(where + ".route", "block '" + spec.route[p] + "' visited twice");
            route.blocks.push_back(it->second);
            if (blocks_[it->second].kind == BlockKind::station) {
                route.stations.push_back(it->second);
                route.station_positions.push_back(p);
            }
        }
        if (route.blocks.empty()) fail(where + ".route", "empty route");
        if (blocks_[route.blocks.front()].kind != BlockKind::station ||
            blocks_[route.blocks.back()].kind != BlockKind::station) {
            fail(where + ".route", "route must start and end at station blocks");
        }
        if (route.stations.size() < 2) fail(where + ".route", "route needs at least two stations");

        const auto n = route.blocks.size();
        times_[j].t_out.assign(n, 0);
        times_[j].p_timetable.assign(n, 0);
        times_[j].p_min.assign(n, 0);
    }

    std::vector<std::vector<bool>> filled(trains);
    for (TrainIndex j = 0; j < trains; ++j) filled[j].assign(routes_[j].blocks.size(), false);

    for (std::size_t e = 0; e < data_.timetable.size(); ++e) {
        const auto& entry = data_.timetable[e];
        const auto where = at("timetable", e);
        auto tj = train_lookup_.find(entry.train);
        if (tj == train_lookup_.end()) fail(where + ".train", "unknown train '" + entry.train + "'");
        auto tb = block_lookup_.find(entry.block);
        if (tb == block_lookup_.end()) fail(where + ".block", "unknown block '" + entry.block + "'");
        const auto& blocks = routes_[tj->second].blocks;
        auto pos_it = std::find(blocks.begin(), blocks.end(), tb->second);
        if (pos_it == blocks.end()) fail(where + ".block", "block '" + entry.block + "' is not on the route of '" + entry.train + "'");
        const auto pos = static_cast<std::size_t>(pos_it - blocks.begin());
        if (filled[tj->second][pos]) fail(where, "duplicate entry for (" + entry.train + ", " + entry.block + ")");
        if (entry.p_min < 0 || entry.p_timetable < 0) fail(where, "passing times must be nonnegative");
        if (entry.p_min > entry.p_timetable) fail(where + ".p_min", "p_min exceeds p_timetable");
        filled[tj->second][pos] = true;
        times_[tj->second].t_out[pos] = entry.t_out;
        times_[tj->second].p_timetable[pos] = entry.p_timetable;
        times_[tj->second].p_min[pos] = entry.p_min;
    }

    for (TrainIndex j = 0; j < trains; ++j) {
        const auto& route = routes_[j];
        const auto& tt = times_[j];
        for (std::size_t p = 0; p < route.blocks.size(); ++p) {
            if (!filled[j][p]) {
                fail("timetable", "missing entry for (" + route.id + ", " + blocks_[route.blocks[p]].id + ")");
            }
            if (p > 0 && tt.t_out[p] - tt.t_out[p - 1] < tt.p_timetable[p]) {
                fail("timetable", "(" + route.id + ", " + blocks_[route.blocks[p]].id +
                                      "): t_out advances less than p_timetable");
            }
        }
    }

    for (const auto& [train, delay] : data_.scenario.entry_delays) {
        auto it = train_lookup_.find(train);
        if (it == train_lookup_.end()) fail("scenario.entry_delays", "unknown train '" + train + "'");
        if (delay < 0) fail("scenario.entry_delays." + train, "delay must be nonnegative");
        scenario_.entry_delays[it->second] = delay;
    }

    for (std::size_t t = 0; t < data_.scenario.turnover_pairs.size(); ++t) {
        const auto& pair = data_.scenario.turnover_pairs[t];
        const auto where = at("scenario.turnover_pairs", t);
        auto from = train_lookup_.find(pair.from);
        auto to = train_lookup_.find(pair.to);
        if (from == train_lookup_.end()) fail(where + ".from", "unknown train '" + pair.from + "'");
        if (to == train_lookup_.end()) fail(where + ".to", "unknown train '" + pair.to + "'");
        if (from->second == to->second) fail(where, "turnover onto the same train");
        if (pair.min_turnover < 0) fail(where + ".min_turnover", "must be nonnegative");
        if (routes_[from->second].stations.back() != routes_[to->second].stations.front()) {
            fail(where, "'" + pair.from + "' does not terminate where '" + pair.to + "' starts");
        }
        scenario_.turnovers.push_back({from->second, to->second, pair.min_turnover});
    }

    if (data_.penalties.p_sum <= 0 || data_.penalties.p_pair <= 0) {
        fail("penalties", "p_sum and p_pair must be positive");
    }

    unavoidable_ = propagate_unavoidable_delays(*this);
}

BlockIndex RailwayInstance::block_index(std::string_view id) const {
    auto it = block_lookup_.find(std::string(id));
    if (it == block_lookup_.end()) throw ModelError("unknown block '" + std::string(id) + "'");
    return it->second;
}

TrainIndex RailwayInstance::train_index(std::string_view id) const {
    auto found = find_train(id);
    if (!found) throw ModelError("unknown train '" + std::string(id) + "'");
    return *found;
}

std::optional<TrainIndex> RailwayInstance::find_train(std::string_view id) const {
    auto it = train_lookup_.find(std::string(id));
    if (it == train_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> RailwayInstance::station_rank(TrainIndex j, BlockIndex station) const {
    const auto& stations = routes_.at(j).stations;
    auto it = std::find(stations.begin(), stations.end(), station);
    if (it == stations.end()) return std::nullopt;
    return static_cast<std::size_t>(it - stations.begin());
}

Minutes RailwayInstance::scheduled_leave(TrainIndex j, std::size_t rank) const {
    return times_.at(j).t_out.at(routes_.at(j).station_positions.at(rank));
}

Minutes RailwayInstance::scheduled_entry(TrainIndex j, std::size_t rank) const {
    const auto pos = routes_.at(j).station_positions.at(rank);
    const auto& tt = times_.at(j);
    return pos == 0 ? tt.t_out[0] - tt.p_timetable[0] : tt.t_out[pos - 1];
}

// ---------------------------------------------------------------------------

namespace {

void check_turnover_cycles(const RailwayInstance& instance) {
    const auto trains = instance.train_count();
    std::vector<std::vector<TrainIndex>> next(trains);
    for (const auto& t : instance.scenario().turnovers) next[t.from].push_back(t.to);

    enum class Mark { fresh, active, done };
    std::vector<Mark> mark(trains, Mark::fresh);
    auto visit = [&](auto&& self, TrainIndex j) -> void {
        mark[j] = Mark::active;
        for (auto k : next[j]) {
            if (mark[k] == Mark::active) {
                throw ModelError("cyclic turnover chain through train '" + instance.route(k).id + "'");
            }
            if (mark[k] == Mark::fresh) self(self, k);
        }
        mark[j] = Mark::done;
    };
    for (TrainIndex j = 0; j < trains; ++j) {
        if (mark[j] == Mark::fresh) visit(visit, j);
    }
}

} // namespace

bool relax_unavoidable_delays(const RailwayInstance& instance, UnavoidableDelays& delays) {
    bool changed = false;
    auto raise = [&](Minutes& slot, Minutes value) {
        if (value > slot) {
            slot = value;
            changed = true;
        }
    };
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        auto& d = delays.at(j);
        raise(d[0], instance.scenario().entry_delays[j]);
        for (std::size_t k = 0; k + 1 < d.size(); ++k) {
            raise(d[k + 1], std::max<Minutes>(d[k] - alpha(instance, j, k), 0));
        }
    }
    for (const auto& t : instance.scenario().turnovers) {
        const auto last = instance.decision_count(t.from) - 1;
        // strict inequality of the rolling-stock condition
        raise(delays[t.to][0], delays[t.from][last] - turnover_reserve(instance, t) + 1);
    }
    return changed;
}

UnavoidableDelays propagate_unavoidable_delays(const RailwayInstance& instance) {
    check_turnover_cycles(instance);
    UnavoidableDelays delays(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        delays[j].assign(instance.route(j).stations.size(), 0);
    }
    while (relax_unavoidable_delays(instance, delays)) {
    }
    return delays;
}

namespace {

std::pair<std::size_t, std::size_t> segment(const RailwayInstance& instance, TrainIndex j, std::size_t rank,
                                             const char* op) {
    const auto& route = instance.route(j);
    if (rank + 1 >= route.stations.size()) {
        throw DomainError(std::string(op) + ": station rank " + std::to_string(rank) + " is the last station of '" +
                          route.id + "'");
    }
    return {route.station_positions[rank], route.station_positions[rank + 1]};
}

} // namespace

Minutes alpha(const RailwayInstance& instance, TrainIndex j, std::size_t rank) {
    const auto [from, to] = segment(instance, j, rank, "alpha");
    const auto& tt = instance.times(j);
    Minutes reserve = 0;
    for (auto p = from + 1; p <= to; ++p) reserve += tt.p_timetable[p] - tt.p_min[p];
    return reserve;
}

Minutes tau1(const RailwayInstance& instance, TrainIndex j, std::size_t rank) {
    const auto [from, to] = segment(instance, j, rank, "tau1");
    const auto& t_out = instance.times(j).t_out;
    Minutes headway = 0;
    for (auto p = from + 1; p < to; ++p) headway = std::max(headway, t_out[p] - t_out[p - 1]);
    return headway;
}

Minutes tau2(const RailwayInstance& instance, TrainIndex j, std::size_t rank) {
    const auto [from, to] = segment(instance, j, rank, "tau2");
    const auto& t_out = instance.times(j).t_out;
    return t_out[to - 1] - t_out[from];
}

Minutes leave_offset(const RailwayInstance& instance, TrainIndex j, std::size_t rank, TrainIndex other,
                     std::size_t other_rank) {
    return instance.scheduled_leave(j, rank) - instance.scheduled_leave(other, other_rank);
}

Minutes turnover_reserve(const RailwayInstance& instance, const Turnover& turnover) {
    const auto last = instance.decision_count(turnover.from) - 1;
    return instance.scheduled_leave(turnover.to, 0) - instance.scheduled_leave(turnover.from, last) -
           tau2(instance, turnover.from, last) - turnover.min_turnover;
}

CommonPath common_path(const RailwayInstance& instance, TrainIndex j, TrainIndex other) {
    CommonPath path;
    const auto& theirs = instance.route(other).stations;
    for (auto s : instance.route(j).stations) {
        if (std::find(theirs.begin(), theirs.end(), s) != theirs.end()) path.stations.push_back(s);
    }
    path.truncated = path.stations;
    if (!path.truncated.empty()) path.truncated.pop_back();
    return path;
}

DerivedQuantities derive(const RailwayInstance& instance) {
    DerivedQuantities q;
    q.d_unavoidable = instance.unavoidable_delays();
    const auto trains = instance.train_count();
    q.alpha.resize(trains);
    q.tau1.resize(trains);
    q.tau2.resize(trains);
    for (TrainIndex j = 0; j < trains; ++j) {
        for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
            q.alpha[j].push_back(alpha(instance, j, k));
            q.tau1[j].push_back(tau1(instance, j, k));
            q.tau2[j].push_back(tau2(instance, j, k));
        }
    }
    for (const auto& t : instance.scenario().turnovers) q.turnover_reserve.push_back(turnover_reserve(instance, t));
    return q;
}

} // namespace railq
