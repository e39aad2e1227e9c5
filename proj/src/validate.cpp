#include "railq/validate.hpp"

#include "railq/errors.hpp"

#include <algorithm>
#include <sstream>

namespace railq {

std::string_view to_string(Condition condition) {
    switch (condition) {
    case Condition::delay_bounds: return "delay_bounds";
    case Condition::one_hot: return "one_hot";
    case Condition::min_pass: return "min_pass";
    case Condition::single_block: return "single_block";
    case Condition::deadlock: return "deadlock";
    case Condition::rolling_stock: return "rolling_stock";
    case Condition::capacity: return "capacity";
    }
    return "?";
}

bool FeasibilityReport::feasible_ignoring_capacity() const {
    return std::all_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.condition == Condition::capacity; });
}

std::size_t FeasibilityReport::count(Condition condition) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.condition == condition; }));
}

namespace {

/// Order-dependent headway: whichever of the two leaves first must be followed by at least its
/// own headway. Returns the deficit, or 0 when satisfied.
Minutes headway_deficit(Minutes t, Minutes tau, Minutes t_other, Minutes tau_other) {
    if (t_other >= t && t_other < t + tau) return t + tau - t_other;
    if (t >= t_other && t < t_other + tau_other) return t_other + tau_other - t;
    return 0;
}

void check_bounds(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
            const auto d = schedule.at(j, k);
            const auto lo = instance.unavoidable_delay(j, k);
            const auto hi = lo + instance.scenario().d_max[j];
            const auto station = instance.route(j).stations[k];
            if (d < lo) out.push_back({Condition::delay_bounds, {j}, {station}, lo - d});
            if (d > hi) out.push_back({Condition::delay_bounds, {j}, {station}, d - hi});
        }
    }
}

void check_min_pass(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (std::size_t k = 0; k + 1 < instance.decision_count(j); ++k) {
            const auto need = schedule.at(j, k) - alpha(instance, j, k);
            if (schedule.at(j, k + 1) < need) {
                const auto& stations = instance.route(j).stations;
                out.push_back({Condition::min_pass, {j}, {stations[k], stations[k + 1]}, need - schedule.at(j, k + 1)});
            }
        }
    }
}

void check_single_block(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (TrainIndex jp = j + 1; jp < instance.train_count(); ++jp) {
            if (instance.route(j).direction != instance.route(jp).direction) continue;
            for (auto s : common_path(instance, j, jp).truncated) {
                const auto k = *instance.station_rank(j, s);
                const auto kp = *instance.station_rank(jp, s);
                if (k >= instance.decision_count(j) || kp >= instance.decision_count(jp)) continue;
                const auto deficit = headway_deficit(leave_time(instance, schedule, j, k), tau1(instance, j, k),
                                                     leave_time(instance, schedule, jp, kp), tau1(instance, jp, kp));
                if (deficit > 0) out.push_back({Condition::single_block, {j, jp}, {s}, deficit});
            }
        }
    }
}

void check_deadlock(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        if (instance.route(j).direction != Direction::dir0) continue;
        for (TrainIndex jp = 0; jp < instance.train_count(); ++jp) {
            if (instance.route(jp).direction != Direction::dir1) continue;
            for (auto s : common_path(instance, j, jp).truncated) {
                const auto k = *instance.station_rank(j, s);
                if (k >= instance.decision_count(j)) continue;
                const auto next = instance.route(j).stations[k + 1];
                const auto kp = instance.station_rank(jp, next);
                if (!kp || *kp >= instance.decision_count(jp)) continue;
                const auto deficit = headway_deficit(leave_time(instance, schedule, j, k), tau2(instance, j, k),
                                                     leave_time(instance, schedule, jp, *kp), tau2(instance, jp, *kp));
                if (deficit > 0) {
                    out.push_back({Condition::deadlock, {std::min(j, jp), std::max(j, jp)}, {s, next}, deficit});
                }
            }
        }
    }
}

void check_rolling_stock(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    for (const auto& t : instance.scenario().turnovers) {
        const auto last = instance.decision_count(t.from) - 1;
        // strict: d(j', first) > d(j, end-1) - R
        const auto bound = schedule.at(t.from, last) - turnover_reserve(instance, t);
        if (schedule.at(t.to, 0) <= bound) {
            out.push_back({Condition::rolling_stock,
                           {t.from, t.to},
                           {instance.route(t.to).stations.front()},
                           bound - schedule.at(t.to, 0) + 1});
        }
    }
}

void check_capacity(const RailwayInstance& instance, const Schedule& schedule, std::vector<Violation>& out) {
    struct Stay {
        Minutes t_in;
        Minutes t_out;
        TrainIndex train;
    };
    std::vector<std::vector<Stay>> stays(instance.block_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto& route = instance.route(j);
        for (std::size_t k = 0; k < route.stations.size(); ++k) {
            const auto t_in = entry_time(instance, schedule, j, k);
            const auto t_out = k < instance.decision_count(j)
                                   ? leave_time(instance, schedule, j, k)
                                   : t_in + instance.times(j).p_timetable[route.station_positions[k]];
            stays[route.stations[k]].push_back({t_in, t_out, j});
        }
    }
    for (BlockIndex b = 0; b < instance.block_count(); ++b) {
        const auto capacity = static_cast<std::size_t>(instance.block(b).capacity);
        auto& list = stays[b];
        if (list.size() <= capacity) continue;
        // closed intervals: the maximum overlap is attained at some entry time
        std::vector<std::vector<TrainIndex>> reported;
        for (const auto& probe : list) {
            std::vector<TrainIndex> present;
            for (const auto& other : list) {
                if (other.t_in <= probe.t_in && probe.t_in <= other.t_out) present.push_back(other.train);
            }
            if (present.size() <= capacity) continue;
            std::sort(present.begin(), present.end());
            if (std::find(reported.begin(), reported.end(), present) != reported.end()) continue;
            reported.push_back(present);
            out.push_back({Condition::capacity, present, {b}, static_cast<Minutes>(present.size() - capacity)});
        }
    }
}

void check_pairs(const RailwayInstance& instance, const Schedule& schedule, const CheckOptions& options,
                 std::vector<Violation>& out) {
    check_bounds(instance, schedule, out);
    check_min_pass(instance, schedule, out);
    check_single_block(instance, schedule, out);
    check_deadlock(instance, schedule, out);
    check_rolling_stock(instance, schedule, out);
    if (options.capacity) check_capacity(instance, schedule, out);
}

} // namespace

FeasibilityReport check_feasibility(const RailwayInstance& instance, const Schedule& schedule,
                                    const CheckOptions& options) {
    check_shape(instance, schedule);
    FeasibilityReport report;
    check_pairs(instance, schedule, options, report.violations);
    return report;
}

FeasibilityReport check_state(const RailwayInstance& instance, const QuboProblem& problem, const Bits& x,
                              const CheckOptions& options) {
    const auto decoded = decode(problem, x);
    FeasibilityReport report;
    for (const auto& g : decoded.broken) {
        report.violations.push_back({Condition::one_hot,
                                     {g.train},
                                     {instance.route(g.train).stations[g.rank]},
                                     static_cast<Minutes>(g.bits_set == 0 ? 1 : g.bits_set - 1)});
    }
    if (decoded.ok()) check_pairs(instance, *decoded.schedule, options, report.violations);
    return report;
}

Rational hard_penalty(const QuboProblem& problem, const Bits& x) {
    if (x.size() != problem.size()) throw DomainError("state length mismatch");
    Rational total = 0;
    for (const auto& g : problem.index.groups()) {
        std::int64_t set = 0;
        for (std::size_t a = 0; a < g.size; ++a) set += x[g.first + a];
        // p (k^2 - 2k) from the quadratic form, plus p from the constant L
        total += problem.p_sum * ((set - 1) * (set - 1));
    }
    for (const auto& pair : problem.excluded) {
        if (!x[pair.first] || !x[pair.second]) continue;
        Rational coefficient = 0;
        for (auto f : all_families) {
            if (pair.has(f)) coefficient = std::max(coefficient, problem.pair_coefficient.at(f));
        }
        total += 2 * coefficient;
    }
    return total;
}

namespace {

int sign(Minutes v) {
    return (v > 0) - (v < 0);
}

std::vector<int> order_signature(const RailwayInstance& instance, const Schedule& schedule) {
    std::vector<int> signature;
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (TrainIndex jp = j + 1; jp < instance.train_count(); ++jp) {
            const bool same = instance.route(j).direction == instance.route(jp).direction;
            for (auto s : common_path(instance, j, jp).truncated) {
                const auto k = *instance.station_rank(j, s);
                if (k >= instance.decision_count(j)) continue;
                const auto other_station = same ? s : instance.route(j).stations[k + 1];
                const auto kp = instance.station_rank(jp, other_station);
                if (!kp || *kp >= instance.decision_count(jp)) continue;
                signature.push_back(
                    sign(leave_time(instance, schedule, j, k) - leave_time(instance, schedule, jp, *kp)));
            }
        }
    }
    return signature;
}

} // namespace

bool dispatching_equivalent(const RailwayInstance& instance, const Schedule& a, const Schedule& b) {
    check_shape(instance, a);
    check_shape(instance, b);
    return order_signature(instance, a) == order_signature(instance, b);
}

Rational objective_value(const RailwayInstance& instance, const Schedule& schedule) {
    check_shape(instance, schedule);
    Rational total = 0;
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto last = instance.decision_count(j) - 1;
        total += instance.scenario().weights[j] *
                 Rational(secondary_delay(instance, schedule, j, last), instance.scenario().d_max[j]);
    }
    return total;
}

std::string format_report(const RailwayInstance& instance, const FeasibilityReport& report) {
    std::ostringstream out;
    out << "feasible: " << (report.feasible() ? "true" : "false") << '\n';
    out << "violations: " << report.violations.size() << '\n';
    for (std::size_t i = 0; i < report.violations.size(); ++i) {
        const auto& v = report.violations[i];
        out << "violation[" << i << "]: condition=" << to_string(v.condition) << " trains=";
        for (std::size_t t = 0; t < v.trains.size(); ++t) {
            out << (t ? "," : "") << instance.route(v.trains[t]).id;
        }
        out << " blocks=";
        for (std::size_t b = 0; b < v.blocks.size(); ++b) {
            out << (b ? "," : "") << instance.block(v.blocks[b]).id;
        }
        out << " deficit=" << v.deficit << '\n';
    }
    return out.str();
}

} // namespace railq
