#pragma once

/*======================================================================================================================
 * Seeded property suites.
 *
 * Every trial draws its instance from an independent stream derived from (seed, suite, trial index), so trials can be
 * sharded across threads and the merged report is identical for every schedule.
 *====================================================================================================================*/

#include <cstdint>
#include <string>
#include <vector>

namespace mtpdb {

struct SuiteReport
{
    std::string name;
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::size_t failed = 0;
    /// Trials for which the generator found no admissible instance.
    std::size_t skipped = 0;
    /// Largest checked discrepancy over all passing and failing trials.
    double max_error = 0.0;
    /// Descriptions of failing trials, smallest first, at most three.
    std::vector<std::string> counterexamples;

    bool ok() const { return failed == 0 and skipped == 0; }
};

struct SuiteOptions
{
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    /// Shard trials across threads.
    bool parallel = true;
};

/// prob_lifted against prob_ground on random safe queries with at most 12 uncertain tuples.
SuiteReport suite_lifted_vs_ground(const SuiteOptions &options);
/// Raising one tuple probability never lowers a query probability.
SuiteReport suite_monotonicity(const SuiteOptions &options);
/// Lifted evaluation with independent conjunctions disabled (forcing inclusion-exclusion) agrees with the default.
SuiteReport suite_inclusion_exclusion(const SuiteOptions &options);
/// Printing and re-parsing is the identity; inversion-free implies hierarchical; ground sizes follow the formula.
SuiteReport suite_query_analysis(const SuiteOptions &options);
/// Exact budgeted program against brute force on inversion-free queries, including witness re-evaluation.
SuiteReport suite_exact_vs_bruteforce(const SuiteOptions &options);
/// Closed world <= exact budgeted bound <= full completion; the bound grows with the budget and reaches the full
/// completion of the constrained relation.
SuiteReport suite_budget_bounds(const SuiteOptions &options);
/// S(X + x) - S(X) >= S(Y + x) - S(Y) for X within Y and x outside Y; S is monotone; the conditioned gain formula
/// matches full re-evaluation.
SuiteReport suite_submodularity(const SuiteOptions &options);
/// The brute-force optimum lies in the greedy interval and the greedy gain reaches (1 - 1/e) of the optimal gain.
SuiteReport suite_greedy_guarantee(const SuiteOptions &options);
/// Fractional completions on a grid of step lambda/10 never beat the best {0, lambda} completion by more than the
/// largest single-tuple gain, and a best grid point has at most one coordinate strictly inside (0, lambda).
SuiteReport suite_vertex_attainment(const SuiteOptions &options);
/// verify_maxmatch on random 3DM instances with three nodes per side.
SuiteReport suite_three_dm(const SuiteOptions &options);

/// Every suite above, in declaration order.
std::vector<SuiteReport> property_suites(const SuiteOptions &options);

/// Fixed-format text rendering; identical inputs give identical bytes.
std::string format_reports(const std::vector<SuiteReport> &reports);

}
