#pragma once

#include "railq/rail_model.hpp"
#include "railq/schedule.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace railq {

using Bits = std::vector<std::uint8_t>;

/// Sparse symmetric rational matrix. Off-diagonal values are the per-half entries Q_ij = Q_ji,
/// so xᵀQx = Σ Q_ii x_i + 2 Σ_{i<j} Q_ij x_i x_j.
class QuboMatrix {
public:
    QuboMatrix() = default;
    explicit QuboMatrix(std::size_t n) : diagonal_(n) {}

    [[nodiscard]] std::size_t size() const { return diagonal_.size(); }

    [[nodiscard]] const Rational& diagonal(std::size_t i) const { return diagonal_.at(i); }
    /// Q_ij for any i, j (symmetric access).
    [[nodiscard]] Rational at(std::size_t i, std::size_t j) const;

    void add_diagonal(std::size_t i, const Rational& value);
    /// Adds `value` to both Q_ij and Q_ji.
    void add_symmetric(std::size_t i, std::size_t j, const Rational& value);

    /// Upper-triangle off-diagonal entries keyed (i, j), i < j; zero entries are dropped.
    [[nodiscard]] const std::map<std::pair<std::size_t, std::size_t>, Rational>& couplings() const {
        return upper_;
    }
    [[nodiscard]] std::size_t edge_count() const { return upper_.size(); }
    [[nodiscard]] double density() const;

    [[nodiscard]] std::vector<std::vector<Rational>> dense() const;

    /// xᵀQx in exact arithmetic; throws DomainError on length mismatch.
    [[nodiscard]] Rational energy(const Bits& x) const;

    bool operator==(const QuboMatrix&) const = default;

private:
    std::vector<Rational> diagonal_;
    std::map<std::pair<std::size_t, std::size_t>, Rational> upper_;
};

/// Column of the QUBO variable x_{j,s,d}.
struct VarKey {
    TrainIndex train = 0;
    std::size_t rank = 0;    ///< station rank in S_j^*
    Minutes delay = 0;       ///< absolute delay d, not the secondary part

    bool operator==(const VarKey&) const = default;
};

/// One-hot group of the decision (j, s): columns [first, first + size).
struct VarGroup {
    TrainIndex train = 0;
    std::size_t rank = 0;
    std::size_t first = 0;
    std::size_t size = 0;
    Minutes min_delay = 0;
};

/// Bijection (train, station, delay) <-> column, grouped train-major then by station then delay.
class VarIndex {
public:
    VarIndex() = default;
    /// Throws InfeasibleModelError if some group would be empty.
    explicit VarIndex(const RailwayInstance& instance);

    [[nodiscard]] std::size_t size() const { return keys_.size(); }
    [[nodiscard]] const VarKey& key(std::size_t column) const { return keys_.at(column); }
    [[nodiscard]] std::optional<std::size_t> column(TrainIndex j, std::size_t rank, Minutes delay) const;
    [[nodiscard]] const std::vector<VarGroup>& groups() const { return groups_; }
    [[nodiscard]] const VarGroup& group(TrainIndex j, std::size_t rank) const;
    [[nodiscard]] std::size_t group_of(std::size_t column) const { return group_of_.at(column); }

private:
    std::vector<VarKey> keys_;
    std::vector<VarGroup> groups_;
    std::vector<std::size_t> group_of_;
    std::vector<std::vector<std::size_t>> group_lookup_;   ///< [train][rank] -> group
};

enum class Family : std::uint8_t { min_pass, single_block, deadlock, rolling_stock };
inline constexpr std::array<Family, 4> all_families{Family::min_pass, Family::single_block, Family::deadlock,
                                                   Family::rolling_stock};
std::string_view to_string(Family family);

/// An unordered pair of columns that may not both be 1, with the families that exclude it.
struct ExcludedPair {
    std::size_t first = 0;
    std::size_t second = 0;    ///< first < second
    std::uint8_t families = 0;   ///< bit set over Family

    [[nodiscard]] bool has(Family f) const { return (families >> static_cast<unsigned>(f)) & 1U; }
};

struct BuildOptions {
    Penalties penalties;
    /// Replaces p_pair for pairs excluded by the given family; a pair in several families
    /// takes the largest applicable coefficient.
    std::map<Family, Rational> pair_overrides;
};

struct QuboProblem {
    QuboMatrix Q;
    VarIndex index;
    Rational p_sum;
    Rational p_pair;
    Rational offset_L;    ///< p_sum times the number of one-hot groups
    std::vector<ExcludedPair> excluded;
    std::map<Family, std::size_t> family_counts;   ///< distinct pairs per family (overlaps count in each)
    std::map<Family, Rational> pair_coefficient;   ///< effective per-family coefficient

    [[nodiscard]] std::size_t size() const { return Q.size(); }
    [[nodiscard]] Rational energy(const Bits& x) const { return Q.energy(x); }
};

QuboProblem build_qubo(const RailwayInstance& instance, const BuildOptions& options);
QuboProblem build_qubo(const RailwayInstance& instance, const Rational& p_sum, const Rational& p_pair);
/// Penalties taken from the instance.
QuboProblem build_qubo(const RailwayInstance& instance);

struct BrokenGroup {
    TrainIndex train = 0;
    std::size_t rank = 0;
    std::size_t bits_set = 0;
};

struct DecodeResult {
    std::optional<Schedule> schedule;   ///< set iff no group is broken
    Schedule partial;                   ///< decoded groups; -1 where broken
    std::vector<BrokenGroup> broken;

    [[nodiscard]] bool ok() const { return schedule.has_value(); }
};

DecodeResult decode(const QuboProblem& problem, const Bits& x);

/// Throws DomainError for a delay outside its group's range.
Bits encode(const QuboProblem& problem, const Schedule& schedule);

/// E(s) = Σ_{i<j} J_ij s_i s_j + Σ h_i s_i, related to the QUBO by E_ising(s(x)) = E_qubo(x) + offset.
struct IsingProblem {
    std::vector<Rational> h;
    std::map<std::pair<std::size_t, std::size_t>, Rational> J;   ///< i < j
    Rational offset;

    [[nodiscard]] std::size_t size() const { return h.size(); }
    [[nodiscard]] Rational energy(const std::vector<int>& spins) const;
};

IsingProblem qubo_to_ising(const QuboMatrix& Q);

struct QuboWithOffset {
    QuboMatrix Q;
    Rational offset;   ///< E_ising(s(x)) = xᵀQx + offset
};

/// Ignores ising.offset; the returned offset is recomputed from J and h.
QuboWithOffset ising_to_qubo(const IsingProblem& ising);

std::vector<int> to_spins(const Bits& x);
Bits to_bits(const std::vector<int>& spins);

/// "n" line, then upper-triangle "i j value" lines; off-diagonal values are 2·Q_ij so the
/// triples reproduce the energy directly.
void write_qubo(std::ostream& out, const QuboMatrix& Q);
/// "i train station delay" lines.
void write_variable_map(std::ostream& out, const RailwayInstance& instance, const VarIndex& index);

QuboMatrix read_qubo(std::istream& in);

} // namespace railq
