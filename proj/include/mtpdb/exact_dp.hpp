#pragma once

/*======================================================================================================================
 * Exact MTP-constrained upper bound by dynamic programming over budgets.
 *
 * The lifted plan of the query is evaluated with a budget curve in place of each probability: entry b of a curve is
 * the best value of the sub-query when at most b open tuples of the constrained relation may be added at lambda,
 * together with one witness set achieving it.  Independent disjunctions (including separator branches, one per
 * domain constant) and independent conjunctions combine curves by max-plus convolution over the budget split.
 * Inclusion-exclusion is only allowed over sub-queries that contain no open tuple of the constrained relation.
 *====================================================================================================================*/

#include "mtpdb/engine.hpp"
#include "mtpdb/open_world.hpp"

#include <cstdint>
#include <vector>

namespace mtpdb {

struct BudgetEntry
{
    Prob value;
    /// Sorted indices into `open_tuples(g, relation)`.
    std::vector<std::uint32_t> witness;
};

/// Entry b holds the optimum for budget at most b.  A curve shorter than the budget is saturated: budgets beyond its
/// last index have the value of the last entry.
class BudgetCurve
{
    std::vector<BudgetEntry> entries_;

    public:
    BudgetCurve() = default;
    explicit BudgetCurve(std::vector<BudgetEntry> entries) : entries_(std::move(entries)) { }

    static BudgetCurve constant(Prob value) { return BudgetCurve({{value, {}}}); }

    const BudgetEntry &at(std::size_t b) const { return entries_[std::min(b, entries_.size() - 1)]; }
    std::size_t length() const { return entries_.size(); }
    const std::vector<BudgetEntry> &entries() const { return entries_; }
};

/// One separator step: D'(b) = max over k in 0..b of 1 - (1 - D(b - k)) (1 - A(k)).  Curves must be over disjoint
/// tuples.  Ties prefer smaller, then lexicographically smaller witnesses.
BudgetCurve dp_eliminate(const BudgetCurve &d_prev, const BudgetCurve &a, std::size_t budget);

/// Independent conjunction: C(b) = max over k in 0..b of X(b - k) * Y(k).
BudgetCurve dp_conjoin(const BudgetCurve &x, const BudgetCurve &y, std::size_t budget);

/// Budget curve of `q` over the open tuples of `relation`, up to `budget`.  Substitutions are expressed by constants in
/// `q`.  Throws `NotInversionFree` when the query needs inclusion-exclusion over open tuples of the relation.
BudgetCurve build_a_table(const OpenPDB &g, const std::string &relation, std::size_t budget, const UCQ &q,
                          const EngineOptions &options = {});

/// Maximum probability of `q` over completions adding at most `budget.max_added` open tuples of `budget.relation`.
/// Relations other than the constrained one stay closed.
BoundResult mtp_upper_exact(const OpenPDB &g, const Budget &budget, const UCQ &q, const EngineOptions &options = {});
BoundResult mtp_upper_exact(const OpenPDB &g, const MTPConstraint &c, const UCQ &q,
                            MtpDenominator denominator = MtpDenominator::Herbrand, const EngineOptions &options = {});

}
