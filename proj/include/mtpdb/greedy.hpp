#pragma once

#include "mtpdb/engine.hpp"
#include "mtpdb/open_world.hpp"

#include <vector>

namespace mtpdb {

/// S(X): probability of the query when the open tuples in X are added at lambda.  The lifted plan is compiled once.
class SetQueryFunction
{
    const OpenPDB *g_;
    LiftedPlan plan_;

    public:
    /// Throws `UnsafeQuery` for unsafe queries.
    SetQueryFunction(const OpenPDB &g, const UCQ &q, const EngineOptions &options = {});

    Prob value(const std::vector<AtomId> &x) const;
    double operator()(const std::vector<AtomId> &x) const { return value(x).p; }
    /// S'(X) = S(X) - S({}).
    double normalized(const std::vector<AtomId> &x) const;
    /// S(X + t) - S(X) for t not in X, computed as lambda * (P(q | X, t true) - S(X)).
    double marginal_gain(const std::vector<AtomId> &x, AtomId t) const;

    const LiftedPlan &plan() const { return plan_; }
    const OpenPDB &open_pdb() const { return *g_; }
};

double set_query_prob(const OpenPDB &g, const UCQ &q, const std::vector<AtomId> &x);
double normalized_set_query_prob(const OpenPDB &g, const UCQ &q, const std::vector<AtomId> &x);

enum class GreedyStrategy
{
    Lazy,         ///< stale gains in a priority queue, re-evaluated on demand
    ParallelScan, ///< every gain re-evaluated each round, candidates sharded across threads
    SerialScan,   ///< reference implementation of the scan
};

struct GreedyOptions
{
    GreedyStrategy strategy = GreedyStrategy::Lazy;
    /// Run on queries with self-joins; the approximation guarantee is then not claimed.
    bool allow_self_joins = false;
    EngineOptions engine;
};

struct GreedyPick
{
    AtomId atom;
    double gain = 0.0;
};

struct GreedyTrace
{
    std::vector<GreedyPick> picks;
    Prob p_closed;
    Prob p_greedy;
    double lower = 0.0;
    /// (e * p_greedy - p_closed) / (e - 1); may exceed 1.
    double upper = 0.0;
    /// The same bound as a probability: clamped to 1, with its complement tracked.
    Prob upper_clamped;
    /// False for queries with self-joins, where submodularity is not established.
    bool guarantee = true;
    std::size_t gain_evaluations = 0;
};

/// Adds the open tuple of largest marginal gain (ties: canonical order) until the budget is spent or no tuple has a
/// positive gain.  Throws `InvalidArgument` for queries with self-joins unless `allow_self_joins` is set.
GreedyTrace greedy_trace(const OpenPDB &g, const Budget &budget, const UCQ &q, const GreedyOptions &options = {});

/// Bound with interval [p_greedy, min(1, upper)] and the picked tuples as witness.
BoundResult greedy_upper(const OpenPDB &g, const Budget &budget, const UCQ &q, const GreedyOptions &options = {});
BoundResult greedy_upper(const OpenPDB &g, const MTPConstraint &c, const UCQ &q,
                         MtpDenominator denominator = MtpDenominator::Herbrand, const GreedyOptions &options = {});

}
