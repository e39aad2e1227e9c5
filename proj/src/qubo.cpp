#include "railq/qubo.hpp"

#include "railq/errors.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace railq {

// ---------------------------------------------------------------------------
// QuboMatrix
// ---------------------------------------------------------------------------

Rational QuboMatrix::at(std::size_t i, std::size_t j) const {
    if (i == j) return diagonal(i);
    auto it = upper_.find(i < j ? std::pair{i, j} : std::pair{j, i});
    return it == upper_.end() ? Rational(0) : it->second;
}

void QuboMatrix::add_diagonal(std::size_t i, const Rational& value) {
    diagonal_.at(i) += value;
}

void QuboMatrix::add_symmetric(std::size_t i, std::size_t j, const Rational& value) {
    if (i == j) throw DomainError("add_symmetric on the diagonal");
    if (i >= size() || j >= size()) throw DomainError("column out of range");
    const auto key = i < j ? std::pair{i, j} : std::pair{j, i};
    auto& slot = upper_[key];
    slot += value;
    if (slot.numerator() == 0) upper_.erase(key);
}

double QuboMatrix::density() const {
    const auto n = static_cast<double>(size());
    return n < 2 ? 0.0 : static_cast<double>(edge_count()) / (n * (n - 1) / 2);
}

std::vector<std::vector<Rational>> QuboMatrix::dense() const {
    std::vector<std::vector<Rational>> m(size(), std::vector<Rational>(size()));
    for (std::size_t i = 0; i < size(); ++i) m[i][i] = diagonal_[i];
    for (const auto& [key, value] : upper_) {
        m[key.first][key.second] = value;
        m[key.second][key.first] = value;
    }
    return m;
}

Rational QuboMatrix::energy(const Bits& x) const {
    if (x.size() != size()) {
        throw DomainError("state has " + std::to_string(x.size()) + " bits, problem has " + std::to_string(size()));
    }
    Rational e = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (x[i]) e += diagonal_[i];
    }
    for (const auto& [key, value] : upper_) {
        if (x[key.first] && x[key.second]) e += 2 * value;
    }
    return e;
}

// ---------------------------------------------------------------------------
// VarIndex
// ---------------------------------------------------------------------------

VarIndex::VarIndex(const RailwayInstance& instance) {
    group_lookup_.resize(instance.train_count());
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        const auto dmax = instance.scenario().d_max[j];
        for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
            const auto lo = instance.unavoidable_delay(j, k);
            if (dmax < 0) {
                throw InfeasibleModelError("empty delay range for train '" + instance.route(j).id + "'");
            }
            VarGroup g{j, k, keys_.size(), static_cast<std::size_t>(dmax + 1), lo};
            group_lookup_[j].push_back(groups_.size());
            for (Minutes d = lo; d <= lo + dmax; ++d) {
                keys_.push_back({j, k, d});
                group_of_.push_back(groups_.size());
            }
            groups_.push_back(g);
        }
    }
}

std::optional<std::size_t> VarIndex::column(TrainIndex j, std::size_t rank, Minutes delay) const {
    if (j >= group_lookup_.size() || rank >= group_lookup_[j].size()) return std::nullopt;
    const auto& g = groups_[group_lookup_[j][rank]];
    if (delay < g.min_delay || delay >= g.min_delay + static_cast<Minutes>(g.size)) return std::nullopt;
    return g.first + static_cast<std::size_t>(delay - g.min_delay);
}

const VarGroup& VarIndex::group(TrainIndex j, std::size_t rank) const {
    return groups_.at(group_lookup_.at(j).at(rank));
}

std::string_view to_string(Family family) {
    switch (family) {
    case Family::min_pass: return "min_pass";
    case Family::single_block: return "single_block";
    case Family::deadlock: return "deadlock";
    case Family::rolling_stock: return "rolling_stock";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

namespace {

class PairCollector {
public:
    explicit PairCollector(const VarIndex& index) : index_(index) {}

    /// Excludes x_{j,k,d} x_{j',k',d'} for every d in A_{j,k} and d' in [d + lo, d + hi] ∩ A_{j',k'}.
    void shifted_window(Family f, TrainIndex j, std::size_t k, TrainIndex jp, std::size_t kp, Minutes lo,
                        Minutes hi) {
        const auto& g = index_.group(j, k);
        const auto& gp = index_.group(jp, kp);
        const Minutes gp_lo = gp.min_delay;
        const Minutes gp_hi = gp.min_delay + static_cast<Minutes>(gp.size) - 1;
        for (std::size_t a = 0; a < g.size; ++a) {
            const Minutes d = g.min_delay + static_cast<Minutes>(a);
            for (Minutes dp = std::max(d + lo, gp_lo); dp <= std::min(d + hi, gp_hi); ++dp) {
                add(f, g.first + a, gp.first + static_cast<std::size_t>(dp - gp_lo));
            }
        }
    }

    void add(Family f, std::size_t a, std::size_t b) {
        auto key = a < b ? std::pair{a, b} : std::pair{b, a};
        pairs_[key] |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(f));
    }

    [[nodiscard]] const std::map<std::pair<std::size_t, std::size_t>, std::uint8_t>& pairs() const { return pairs_; }

private:
    const VarIndex& index_;
    std::map<std::pair<std::size_t, std::size_t>, std::uint8_t> pairs_;
};

constexpr Minutes unbounded = std::numeric_limits<Minutes>::max() / 4;

void collect_min_pass(const RailwayInstance& instance, PairCollector& pairs) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        // S_j^**: the next station must itself be a decision station
        for (std::size_t k = 0; k + 1 < instance.decision_count(j); ++k) {
            // d' < d - alpha
            pairs.shifted_window(Family::min_pass, j, k, j, k + 1, -unbounded, -alpha(instance, j, k) - 1);
        }
    }
}

void collect_single_block(const RailwayInstance& instance, PairCollector& pairs) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (TrainIndex jp = 0; jp < instance.train_count(); ++jp) {
            if (j == jp || instance.route(j).direction != instance.route(jp).direction) continue;
            for (auto s : common_path(instance, j, jp).truncated) {
                const auto k = *instance.station_rank(j, s);
                const auto kp = *instance.station_rank(jp, s);
                if (k >= instance.decision_count(j) || kp >= instance.decision_count(jp)) continue;
                const auto delta = leave_offset(instance, j, k, jp, kp);
                const auto tau = tau1(instance, j, k);
                pairs.shifted_window(Family::single_block, j, k, jp, kp, delta, delta + tau - 1);
            }
        }
    }
}

void collect_deadlock(const RailwayInstance& instance, PairCollector& pairs) {
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (TrainIndex jp = 0; jp < instance.train_count(); ++jp) {
            if (instance.route(j).direction == instance.route(jp).direction) continue;
            for (auto s : common_path(instance, j, jp).truncated) {
                const auto k = *instance.station_rank(j, s);
                if (k >= instance.decision_count(j)) continue;
                const auto next = instance.route(j).stations[k + 1];
                const auto kp = instance.station_rank(jp, next);
                if (!kp || *kp >= instance.decision_count(jp)) continue;
                const auto delta = leave_offset(instance, j, k, jp, *kp);
                const auto tau = tau2(instance, j, k);
                pairs.shifted_window(Family::deadlock, j, k, jp, *kp, delta, delta + tau - 1);
            }
        }
    }
}

void collect_rolling_stock(const RailwayInstance& instance, PairCollector& pairs) {
    for (const auto& t : instance.scenario().turnovers) {
        const auto last = instance.decision_count(t.from) - 1;
        // d' <= d - R
        pairs.shifted_window(Family::rolling_stock, t.from, last, t.to, 0, -unbounded,
                             -turnover_reserve(instance, t));
    }
}

} // namespace

QuboProblem build_qubo(const RailwayInstance& instance, const BuildOptions& options) {
    if (options.penalties.p_sum <= 0 || options.penalties.p_pair <= 0) {
        throw ParameterError("p_sum and p_pair must be positive");
    }
    for (const auto& [family, value] : options.pair_overrides) {
        if (value <= 0) throw ParameterError("override for " + std::string(to_string(family)) + " must be positive");
    }

    QuboProblem problem;
    problem.index = VarIndex(instance);
    problem.Q = QuboMatrix(problem.index.size());
    problem.p_sum = options.penalties.p_sum;
    problem.p_pair = options.penalties.p_pair;
    problem.offset_L = problem.p_sum * static_cast<std::int64_t>(problem.index.groups().size());

    auto& Q = problem.Q;
    for (const auto& g : problem.index.groups()) {
        for (std::size_t a = 0; a < g.size; ++a) {
            Q.add_diagonal(g.first + a, -problem.p_sum);
            for (std::size_t b = a + 1; b < g.size; ++b) Q.add_symmetric(g.first + a, g.first + b, problem.p_sum);
        }
        if (g.rank + 1 == instance.decision_count(g.train)) {
            const auto& w = instance.scenario().weights[g.train];
            const auto dmax = instance.scenario().d_max[g.train];
            for (std::size_t a = 0; a < g.size; ++a) {
                Q.add_diagonal(g.first + a, w * Rational(static_cast<std::int64_t>(a), dmax));
            }
        }
    }

    PairCollector pairs(problem.index);
    collect_min_pass(instance, pairs);
    collect_single_block(instance, pairs);
    collect_deadlock(instance, pairs);
    collect_rolling_stock(instance, pairs);

    for (auto f : all_families) {
        auto it = options.pair_overrides.find(f);
        problem.pair_coefficient[f] = it == options.pair_overrides.end() ? problem.p_pair : it->second;
        problem.family_counts[f] = 0;
    }
    for (const auto& [key, mask] : pairs.pairs()) {
        ExcludedPair pair{key.first, key.second, mask};
        Rational coefficient = 0;
        for (auto f : all_families) {
            if (pair.has(f)) {
                ++problem.family_counts[f];
                coefficient = std::max(coefficient, problem.pair_coefficient[f]);
            }
        }
        Q.add_symmetric(key.first, key.second, coefficient);
        problem.excluded.push_back(pair);
    }
    return problem;
}

QuboProblem build_qubo(const RailwayInstance& instance, const Rational& p_sum, const Rational& p_pair) {
    BuildOptions options;
    options.penalties = {p_sum, p_pair};
    return build_qubo(instance, options);
}

QuboProblem build_qubo(const RailwayInstance& instance) {
    BuildOptions options;
    options.penalties = instance.penalties();
    return build_qubo(instance, options);
}

// ---------------------------------------------------------------------------
// Decode / encode
// ---------------------------------------------------------------------------

DecodeResult decode(const QuboProblem& problem, const Bits& x) {
    if (x.size() != problem.size()) {
        throw DomainError("state has " + std::to_string(x.size()) + " bits, problem has " +
                          std::to_string(problem.size()));
    }
    DecodeResult result;
    for (const auto& g : problem.index.groups()) {
        if (result.partial.delays.size() <= g.train) result.partial.delays.resize(g.train + 1);
        std::size_t set = 0;
        Minutes delay = -1;
        for (std::size_t a = 0; a < g.size; ++a) {
            if (x[g.first + a]) {
                ++set;
                delay = g.min_delay + static_cast<Minutes>(a);
            }
        }
        if (set != 1) {
            result.broken.push_back({g.train, g.rank, set});
            delay = -1;
        }
        result.partial.delays[g.train].push_back(delay);
    }
    if (result.broken.empty()) result.schedule = result.partial;
    return result;
}

Bits encode(const QuboProblem& problem, const Schedule& schedule) {
    Bits x(problem.size(), 0);
    for (const auto& g : problem.index.groups()) {
        if (g.train >= schedule.delays.size() || g.rank >= schedule.delays[g.train].size()) {
            throw DomainError("schedule does not cover every decision station");
        }
        const auto column = problem.index.column(g.train, g.rank, schedule.delays[g.train][g.rank]);
        if (!column) {
            throw DomainError("delay " + std::to_string(schedule.delays[g.train][g.rank]) + " of train " +
                              std::to_string(g.train) + " at rank " + std::to_string(g.rank) + " is out of range");
        }
        x[*column] = 1;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Ising
// ---------------------------------------------------------------------------

Rational IsingProblem::energy(const std::vector<int>& spins) const {
    if (spins.size() != size()) throw DomainError("spin vector length mismatch");
    Rational e = 0;
    for (std::size_t i = 0; i < size(); ++i) e += h[i] * spins[i];
    for (const auto& [key, value] : J) e += value * (spins[key.first] * spins[key.second]);
    return e;
}

IsingProblem qubo_to_ising(const QuboMatrix& Q) {
    // x = (s + 1) / 2
    IsingProblem ising;
    ising.h.resize(Q.size());
    Rational constant = 0;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        ising.h[i] += Q.diagonal(i) / 2;
        constant += Q.diagonal(i) / 2;
    }
    for (const auto& [key, value] : Q.couplings()) {
        ising.J[key] = value / 2;
        ising.h[key.first] += value / 2;
        ising.h[key.second] += value / 2;
        constant += value / 2;
    }
    ising.offset = -constant;
    return ising;
}

QuboWithOffset ising_to_qubo(const IsingProblem& ising) {
    // s = 2x - 1
    QuboWithOffset out{QuboMatrix(ising.size()), 0};
    for (std::size_t i = 0; i < ising.size(); ++i) {
        out.Q.add_diagonal(i, 2 * ising.h[i]);
        out.offset -= ising.h[i];
    }
    for (const auto& [key, value] : ising.J) {
        if (key.first == key.second) throw DomainError("self coupling in Ising problem");
        out.Q.add_symmetric(key.first, key.second, 2 * value);
        out.Q.add_diagonal(key.first, -2 * value);
        out.Q.add_diagonal(key.second, -2 * value);
        out.offset += value;
    }
    return out;
}

std::vector<int> to_spins(const Bits& x) {
    std::vector<int> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? 1 : -1;
    return s;
}

Bits to_bits(const std::vector<int>& spins) {
    Bits x(spins.size());
    for (std::size_t i = 0; i < spins.size(); ++i) x[i] = spins[i] > 0 ? 1 : 0;
    return x;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void write_qubo(std::ostream& out, const QuboMatrix& Q) {
    out << Q.size() << '\n';
    const auto& upper = Q.couplings();
    for (std::size_t i = 0; i < Q.size(); ++i) {
        if (Q.diagonal(i).numerator() != 0) out << i << ' ' << i << ' ' << format_rational(Q.diagonal(i)) << '\n';
        for (auto it = upper.lower_bound({i, 0}); it != upper.end() && it->first.first == i; ++it) {
            out << i << ' ' << it->first.second << ' ' << format_rational(2 * it->second) << '\n';
        }
    }
}

void write_variable_map(std::ostream& out, const RailwayInstance& instance, const VarIndex& index) {
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto& key = index.key(i);
        out << i << ' ' << instance.route(key.train).id << ' '
            << instance.block(instance.route(key.train).stations[key.rank]).id << ' ' << key.delay << '\n';
    }
}

QuboMatrix read_qubo(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw ModelError("qubo file: missing size line");
    std::size_t n = 0;
    {
        std::istringstream header(line);
        if (!(header >> n)) throw ModelError("qubo file line " + std::to_string(lineno) + ": bad size");
    }
    QuboMatrix Q(n);
    while (next_line()) {
        std::istringstream row(line);
        std::size_t i = 0;
        std::size_t j = 0;
        std::string value;
        if (!(row >> i >> j >> value) || i >= n || j >= n || i > j) {
            throw ModelError("qubo file line " + std::to_string(lineno) + ": expected 'i j value' with i <= j < n");
        }
        const auto v = parse_rational(value);
        if (i == j) {
            Q.add_diagonal(i, v);
        } else {
            Q.add_symmetric(i, j, v / 2);
        }
    }
    return Q;
}

} // namespace railq
