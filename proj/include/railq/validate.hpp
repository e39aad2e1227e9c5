#pragma once

#include "railq/qubo.hpp"
#include "railq/rail_model.hpp"
#include "railq/schedule.hpp"

#include <string>
#include <vector>

namespace railq {

enum class Condition { delay_bounds, one_hot, min_pass, single_block, deadlock, rolling_stock, capacity };
std::string_view to_string(Condition condition);

struct Violation {
    Condition condition = Condition::delay_bounds;
    std::vector<TrainIndex> trains;
    std::vector<BlockIndex> blocks;
    Minutes deficit = 0;   ///< missing slack in minutes (or surplus trains for capacity)
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool feasible() const { return violations.empty(); }
    /// True when the only violations (if any) are capacity ones.
    [[nodiscard]] bool feasible_ignoring_capacity() const;
    [[nodiscard]] std::size_t count(Condition condition) const;
};

struct CheckOptions {
    bool capacity = true;
};

/// Audits a schedule directly against the delay-representation inequalities.
/// Throws DomainError only on a shape mismatch; semantic problems go to the report.
FeasibilityReport check_feasibility(const RailwayInstance& instance, const Schedule& schedule,
                                    const CheckOptions& options = {});

/// Decodes x and audits it; broken groups become one_hot violations.
FeasibilityReport check_state(const RailwayInstance& instance, const QuboProblem& problem, const Bits& x,
                              const CheckOptions& options = {});

/// P_pair(x) + P_sum(x) + L, computed from the excluded pairs and groups rather than from Q.
Rational hard_penalty(const QuboProblem& problem, const Bits& x);

/// Same leave order at every shared station for same-direction pairs, same segment entry
/// order for opposite-direction pairs.
bool dispatching_equivalent(const RailwayInstance& instance, const Schedule& a, const Schedule& b);

/// Σ_j w_j (d(j, s_end-1) - d_U(j, s_end-1)) / d_max(j).
Rational objective_value(const RailwayInstance& instance, const Schedule& schedule);

/// Stable "key: value" rendering for diffing.
std::string format_report(const RailwayInstance& instance, const FeasibilityReport& report);

} // namespace railq
