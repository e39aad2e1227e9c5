#include "railq/reference.hpp"

#include "railq/errors.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

namespace railq {

namespace {

/// Identifies a segment by its first line block along dir0, or its dir0 entry station when
/// the two stations are adjacent.
BlockIndex segment_block(const RailwayInstance& instance, TrainIndex j, std::size_t rank) {
    const auto& route = instance.route(j);
    const auto from = route.station_positions[rank];
    const auto to = route.station_positions[rank + 1];
    if (route.direction == Direction::dir0) return to > from + 1 ? route.blocks[from + 1] : route.blocks[from];
    return to > from + 1 ? route.blocks[to - 1] : route.blocks[to];
}

} // namespace

std::vector<Disjunction> disjunctions(const RailwayInstance& instance) {
    std::vector<Disjunction> list;
    for (TrainIndex a = 0; a < instance.train_count(); ++a) {
        for (TrainIndex b = a + 1; b < instance.train_count(); ++b) {
            const bool same = instance.route(a).direction == instance.route(b).direction;
            for (auto s : common_path(instance, a, b).truncated) {
                const auto ka = *instance.station_rank(a, s);
                if (ka >= instance.decision_count(a)) continue;
                const auto other = same ? s : instance.route(a).stations[ka + 1];
                const auto kb = instance.station_rank(b, other);
                if (!kb || *kb >= instance.decision_count(b)) continue;
                Disjunction d;
                d.a = a;
                d.b = b;
                d.rank_a = ka;
                d.rank_b = *kb;
                if (same) {
                    d.kind = ResourceKind::station;
                    d.block = s;
                    const auto ta = tau1(instance, a, ka);
                    const auto tb = tau1(instance, b, *kb);
                    if (ta == 0 && tb == 0) continue;
                    d.lag_ab = leave_offset(instance, a, ka, b, *kb) + ta;
                    d.lag_ba = leave_offset(instance, b, *kb, a, ka) + tb;
                } else {
                    d.kind = ResourceKind::segment;
                    d.block = segment_block(instance, a, ka);
                    const auto ta = tau2(instance, a, ka);
                    const auto tb = tau2(instance, b, *kb);
                    if (ta == 0 && tb == 0) continue;
                    d.lag_ab = leave_offset(instance, a, ka, b, *kb) + ta;
                    d.lag_ba = leave_offset(instance, b, *kb, a, ka) + tb;
                }
                list.push_back(d);
            }
        }
    }
    return list;
}

PrecedenceAssignment open_assignment(const std::vector<Disjunction>& list) {
    return PrecedenceAssignment{std::vector<std::int8_t>(list.size(), 0)};
}

bool set_precedence(const std::vector<Disjunction>& list, PrecedenceAssignment& assignment, TrainIndex first,
                    TrainIndex second, BlockIndex block) {
    bool found = false;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& d = list[i];
        if (d.block != block) continue;
        if (d.a == first && d.b == second) {
            assignment.order[i] = 1;
            found = true;
        } else if (d.a == second && d.b == first) {
            assignment.order[i] = -1;
            found = true;
        }
    }
    return found;
}

int satisfied_alternative(const RailwayInstance& instance, const Disjunction& d, const Schedule& schedule) {
    (void)instance;
    const auto da = schedule.at(d.a, d.rank_a);
    const auto db = schedule.at(d.b, d.rank_b);
    if (db >= da + d.lag_ab) return 1;
    if (da >= db + d.lag_ba) return -1;
    return 0;
}

PrecedenceAssignment assignment_from_schedule(const RailwayInstance& instance, const std::vector<Disjunction>& list,
                                              const Schedule& schedule) {
    PrecedenceAssignment out = open_assignment(list);
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& d = list[i];
        const auto sat = satisfied_alternative(instance, d, schedule);
        if (sat != 0) {
            out.order[i] = static_cast<std::int8_t>(sat);
        } else {
            const auto ta = leave_time(instance, schedule, d.a, d.rank_a);
            const auto tb = leave_time(instance, schedule, d.b, d.rank_b);
            out.order[i] = tb >= ta ? 1 : -1;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Difference constraints
// ---------------------------------------------------------------------------

namespace {

struct Edge {
    std::size_t from;
    std::size_t to;
    Minutes weight;   ///< d_to >= d_from + weight
};

class ConstraintGraph {
public:
    explicit ConstraintGraph(const RailwayInstance& instance) : instance_(instance) {
        for (TrainIndex j = 0; j < instance.train_count(); ++j) {
            offset_.push_back(lower_.size());
            for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
                lower_.push_back(instance.unavoidable_delay(j, k));
                upper_.push_back(instance.unavoidable_delay(j, k) + instance.scenario().d_max[j]);
                node_.emplace_back(j, k);
            }
        }
        for (TrainIndex j = 0; j < instance.train_count(); ++j) {
            for (std::size_t k = 0; k + 1 < instance.decision_count(j); ++k) {
                base_.push_back({node(j, k), node(j, k + 1), -alpha(instance, j, k)});
            }
        }
        for (const auto& t : instance.scenario().turnovers) {
            const auto last = instance.decision_count(t.from) - 1;
            base_.push_back({node(t.from, last), node(t.to, 0), 1 - turnover_reserve(instance, t)});
        }
    }

    [[nodiscard]] std::size_t node(TrainIndex j, std::size_t k) const { return offset_[j] + k; }

    EarliestResult solve(const std::vector<Disjunction>& list, const PrecedenceAssignment& assignment,
                         bool bounded) const {
        std::vector<Edge> edges = base_;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& d = list[i];
            if (assignment.order[i] > 0) edges.push_back({node(d.a, d.rank_a), node(d.b, d.rank_b), d.lag_ab});
            if (assignment.order[i] < 0) edges.push_back({node(d.b, d.rank_b), node(d.a, d.rank_a), d.lag_ba});
        }
        return relax(edges, bounded);
    }

private:
    EarliestResult relax(const std::vector<Edge>& edges, bool bounded) const {
        const auto n = lower_.size();
        std::vector<Minutes> d = lower_;
        std::vector<std::size_t> pred(n, edges.size());
        EarliestResult result;
        std::size_t last_changed = n;
        for (std::size_t round = 0; round <= n; ++round) {
            bool changed = false;
            for (std::size_t e = 0; e < edges.size(); ++e) {
                const auto& edge = edges[e];
                if (d[edge.from] + edge.weight > d[edge.to]) {
                    d[edge.to] = d[edge.from] + edge.weight;
                    pred[edge.to] = e;
                    changed = true;
                    last_changed = edge.to;
                    if (bounded && d[edge.to] > upper_[edge.to]) {
                        const auto [j, k] = node_[edge.to];
                        result.reason = "delay of '" + instance_.route(j).id + "' at station '" +
                                        instance_.block(instance_.route(j).stations[k]).id + "' exceeds d_max";
                        return result;
                    }
                }
            }
            if (!changed) {
                Schedule schedule;
                schedule.delays.resize(instance_.train_count());
                for (std::size_t v = 0; v < n; ++v) schedule.delays[node_[v].first].push_back(d[v]);
                result.schedule = std::move(schedule);
                return result;
            }
        }
        // still relaxing after n rounds: walk predecessors into the cycle
        auto v = last_changed;
        for (std::size_t i = 0; i < n; ++i) v = edges[pred[v]].from;
        const auto start = v;
        do {
            result.cycle.push_back(node_[v]);
            v = edges[pred[v]].from;
        } while (v != start);
        std::reverse(result.cycle.begin(), result.cycle.end());
        result.reason = "cyclic precedence";
        return result;
    }

    const RailwayInstance& instance_;
    std::vector<std::size_t> offset_;
    std::vector<Minutes> lower_;
    std::vector<Minutes> upper_;
    std::vector<std::pair<TrainIndex, std::size_t>> node_;
    std::vector<Edge> base_;
};

/// Open disjunctions the schedule violates, most urgent first: earliest involved entry time,
/// then block, then trains.
std::vector<std::size_t> violated(const RailwayInstance& instance, const std::vector<Disjunction>& list,
                                  const PrecedenceAssignment& assignment, const Schedule& schedule) {
    std::vector<std::tuple<Minutes, BlockIndex, TrainIndex, TrainIndex, std::size_t>> keyed;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (assignment.order[i] != 0) continue;
        const auto& d = list[i];
        if (satisfied_alternative(instance, d, schedule) != 0) continue;
        const auto t = std::min(leave_time(instance, schedule, d.a, d.rank_a),
                                leave_time(instance, schedule, d.b, d.rank_b));
        keyed.emplace_back(t, d.block, d.a, d.b, i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> out;
    for (const auto& k : keyed) out.push_back(std::get<4>(k));
    return out;
}

void finish(const RailwayInstance& instance, const std::vector<Disjunction>& list, ReferenceResult& result) {
    result.objective = objective_value(instance, result.schedule);
    result.summary = summarize(instance, result.schedule);
    result.report = check_feasibility(instance, result.schedule);
    result.within_bounds = result.report.count(Condition::delay_bounds) == 0;
    result.assignment = assignment_from_schedule(instance, list, result.schedule);
}

/// Depth-first search over open disjunctions violated by the relaxed earliest schedule,
/// minimizing `key`, which must be monotone under componentwise increase of the delays.
template <class Key>
class PrecedenceSearch {
public:
    PrecedenceSearch(const RailwayInstance& instance, bool bounded, std::function<Key(const Schedule&)> key)
        : instance_(instance), graph_(instance), list_(disjunctions(instance)), bounded_(bounded),
          key_(std::move(key)) {}

    void run() {
        auto assignment = open_assignment(list_);
        dfs(assignment);
    }

    [[nodiscard]] const std::optional<Schedule>& best() const { return best_; }
    [[nodiscard]] std::size_t nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<Disjunction>& list() const { return list_; }

private:
    void dfs(PrecedenceAssignment& assignment) {
        ++nodes_;
        const auto relaxed = graph_.solve(list_, assignment, bounded_);
        if (!relaxed.feasible()) return;
        const auto& schedule = *relaxed.schedule;
        // the relaxation is componentwise below every completion, so its key bounds the subtree
        const auto key = key_(schedule);
        if (best_key_ && !(key < *best_key_)) return;
        const auto open = violated(instance_, list_, assignment, schedule);
        if (open.empty()) {
            best_ = schedule;
            best_key_ = key;
            return;
        }
        const auto i = open.front();
        const auto& d = list_[i];
        const bool a_leads = leave_time(instance_, schedule, d.a, d.rank_a) <=
                             leave_time(instance_, schedule, d.b, d.rank_b);
        for (const std::int8_t choice : {a_leads ? std::int8_t{1} : std::int8_t{-1},
                                         a_leads ? std::int8_t{-1} : std::int8_t{1}}) {
            assignment.order[i] = choice;
            dfs(assignment);
        }
        assignment.order[i] = 0;
    }

    const RailwayInstance& instance_;
    ConstraintGraph graph_;
    std::vector<Disjunction> list_;
    bool bounded_;
    std::function<Key(const Schedule&)> key_;
    std::optional<Schedule> best_;
    std::optional<Key> best_key_;
    std::size_t nodes_ = 0;
};

enum class Rule { first_come, first_leave };

ReferenceResult greedy(const RailwayInstance& instance, Rule rule) {
    ReferenceResult result;
    result.method = rule == Rule::first_come ? "fcfs" : "flfs";
    const ConstraintGraph graph(instance);
    const auto list = disjunctions(instance);
    auto assignment = open_assignment(list);

    auto propagate_implied = [&]() -> bool {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (assignment.order[i] != 0) continue;
                assignment.order[i] = 1;
                const bool a_ok = graph.solve(list, assignment, false).feasible();
                assignment.order[i] = -1;
                const bool b_ok = graph.solve(list, assignment, false).feasible();
                assignment.order[i] = 0;
                if (!a_ok && !b_ok) return false;
                if (a_ok != b_ok) {
                    assignment.order[i] = a_ok ? 1 : -1;
                    changed = true;
                }
            }
        }
        return true;
    };

    while (true) {
        ++result.nodes;
        const auto relaxed = graph.solve(list, assignment, false);
        if (!relaxed.feasible()) {
            result.message = relaxed.reason;
            return result;
        }
        const auto& schedule = *relaxed.schedule;
        const auto open = violated(instance, list, assignment, schedule);
        if (open.empty()) {
            result.feasible = true;
            result.schedule = schedule;
            break;
        }
        const auto i = open.front();
        const auto& d = list[i];
        Minutes ta = leave_time(instance, schedule, d.a, d.rank_a);
        Minutes tb = leave_time(instance, schedule, d.b, d.rank_b);
        if (rule == Rule::first_leave) {
            ta += tau2(instance, d.a, d.rank_a);
            tb += tau2(instance, d.b, d.rank_b);
        }
        assignment.order[i] = tb < ta ? -1 : 1;   // ties go to the lower train index
        if (!propagate_implied()) {
            result.message = "no consistent order after fixing a conflict";
            return result;
        }
    }
    finish(instance, list, result);
    if (!result.within_bounds) result.message = "schedule exceeds d_max";
    return result;
}

} // namespace

EarliestResult earliest_schedule(const RailwayInstance& instance, const std::vector<Disjunction>& list,
                                 const PrecedenceAssignment& assignment, bool bounded) {
    if (assignment.order.size() != list.size()) throw DomainError("assignment does not match the disjunction list");
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (assignment.order[i] < -1 || assignment.order[i] > 1) throw DomainError("assignment entries must be -1, 0 or 1");
    }
    return ConstraintGraph(instance).solve(list, assignment, bounded);
}

EarliestResult earliest_schedule(const RailwayInstance& instance, const PrecedenceAssignment& assignment,
                                 bool bounded) {
    return earliest_schedule(instance, disjunctions(instance), assignment, bounded);
}

ReferenceResult exact_precedence_solve(const RailwayInstance& instance) {
    using Key = std::pair<Rational, std::vector<Minutes>>;
    PrecedenceSearch<Key> search(instance, true, [&](const Schedule& s) {
        return Key{objective_value(instance, s), flatten(s)};
    });
    search.run();
    ReferenceResult result;
    result.method = "exact";
    result.nodes = search.nodes();
    if (!search.best()) {
        result.message = "no precedence order fits within the d_max bounds";
        return result;
    }
    result.feasible = true;
    result.schedule = *search.best();
    finish(instance, search.list(), result);
    return result;
}

ReferenceResult fcfs(const RailwayInstance& instance) {
    return greedy(instance, Rule::first_come);
}

ReferenceResult flfs(const RailwayInstance& instance) {
    return greedy(instance, Rule::first_leave);
}

ReferenceResult amcc(const RailwayInstance& instance) {
    using Key = std::tuple<Minutes, Minutes, std::vector<Minutes>>;
    PrecedenceSearch<Key> search(instance, false, [&](const Schedule& s) {
        const auto summary = summarize(instance, s);
        return Key{summary.max_secondary, summary.sum_secondary_final, flatten(s)};
    });
    search.run();
    ReferenceResult result;
    result.method = "amcc";
    result.nodes = search.nodes();
    if (!search.best()) {
        result.message = "no acyclic precedence order";
        return result;
    }
    result.feasible = true;
    result.schedule = *search.best();
    finish(instance, search.list(), result);
    if (!result.within_bounds) result.message = "schedule exceeds d_max";
    return result;
}

} // namespace railq
