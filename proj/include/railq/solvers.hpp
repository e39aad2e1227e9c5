#pragma once

#include "railq/qubo.hpp"
#include "railq/rail_model.hpp"
#include "railq/schedule.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace railq {

struct SpectrumEntry {
    Rational energy;
    std::vector<Bits> states;   ///< lexicographically sorted

    [[nodiscard]] std::size_t degeneracy() const { return states.size(); }
};

enum class SpectrumMethod { automatic, gray_code, branch_and_bound };

struct SpectrumOptions {
    std::size_t k_levels = 1;
    /// Hard limit; above it CapacityError points at simulated_annealing.
    std::size_t max_vars = 64;
    /// Plain Gray-code enumeration is used up to this size in automatic mode.
    std::size_t gray_code_max_vars = 26;
    /// 0: RAILQ_THREADS if set, else hardware concurrency.
    unsigned threads = 0;
    SpectrumMethod method = SpectrumMethod::automatic;
};

/// The k lowest distinct energies with complete state lists, ascending. Exact.
/// The one-hot groups of the problem drive the branch-and-bound bounds.
std::vector<SpectrumEntry> brute_force_spectrum(const QuboProblem& problem, const SpectrumOptions& options = {});
/// Generic matrix; every column is its own group.
std::vector<SpectrumEntry> brute_force_spectrum(const QuboMatrix& Q, const SpectrumOptions& options = {});

/// Every state with energy strictly below `threshold`, grouped by energy, ascending.
std::vector<SpectrumEntry> enumerate_below(const QuboProblem& problem, const Rational& threshold,
                                           const SpectrumOptions& options = {});

struct AnnealParams {
    std::size_t num_reads = 1000;
    std::size_t sweeps = 1000;
    double beta_min = 0.1;
    double beta_max = 4.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct SampleRead {
    Bits state;
    Rational energy;
    std::size_t multiplicity = 0;
};

struct SampleSet {
    std::vector<SampleRead> reads;   ///< distinct states, ascending energy then state
    AnnealParams params;

    [[nodiscard]] std::size_t total() const;
};

/// Single-flip Metropolis with a geometric beta schedule; reads seeded from (seed, read index).
SampleSet simulated_annealing(const QuboMatrix& Q, const AnnealParams& params = {});

struct FeasibleSample {
    Bits state;
    Rational energy;
    Schedule schedule;
};

/// Lowest-energy read that decodes and passes check_feasibility (capacity included).
std::optional<FeasibleSample> best_feasible(const SampleSet& samples, const QuboProblem& problem,
                                            const RailwayInstance& instance);

std::string bit_string(const Bits& x);

/// energy,degeneracy,state,feasible
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& spectrum, const QuboProblem& problem,
                        const RailwayInstance& instance);
/// energy,multiplicity,state,feasible
void write_samples_csv(std::ostream& out, const SampleSet& samples, const QuboProblem& problem,
                       const RailwayInstance& instance);

/// Worker count from RAILQ_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

} // namespace railq
