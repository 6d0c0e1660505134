#pragma once

/*======================================================================================================================
 * Closed-world evaluation.
 *
 * Lifted inference runs in two phases.  `compile_lifted` walks the rules of the lifted algorithm (ground atom lookup,
 * CNF rewriting, independent conjunction, inclusion-exclusion, independent disjunction, separator variables) once per
 * query and schema and records the result as a DAG of arithmetic nodes whose leaves are ground atoms.  Evaluating the
 * plan against a `ProbabilityView` is then a single bottom-up pass, so the many evaluations of one query under
 * different completions share all symbolic work.
 *
 * `prob_ground` enumerates possible worlds over the uncertain tuples of the query lineage and serves as an oracle.
 *====================================================================================================================*/

#include "mtpdb/database.hpp"
#include "mtpdb/normal_form.hpp"
#include "mtpdb/probability.hpp"
#include "mtpdb/query.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mtpdb {

struct EngineOptions
{
    /// Never split a conjunction into independent factors; every conjunction goes through inclusion-exclusion.
    bool disable_independent_conjunction = false;
    /// When false, reaching inclusion-exclusion throws `NotInversionFree`.
    bool allow_inclusion_exclusion = true;
    std::size_t max_cnf_clauses = 4096;
    int max_ie_clauses = 16;
    std::size_t max_plan_nodes = 4'000'000;
};

class LiftedPlan
{
    public:
    enum class Op : std::uint8_t
    {
        False,
        True,
        Leaf, ///< probability of one ground atom
        Or,   ///< independent disjunction of the children
        And,  ///< independent conjunction of the children
        Sum,  ///< inclusion-exclusion: sum of coefficient * child
    };

    struct Node
    {
        Op op = Op::False;
        AtomId atom;
        std::vector<std::int32_t> children;
        std::vector<double> coefficients;
    };

    /// Nodes in topological order (children precede parents); the root is the last node.
    const std::vector<Node> &nodes() const { return nodes_; }
    std::int32_t root() const { return static_cast<std::int32_t>(nodes_.size()) - 1; }
    std::size_t size() const { return nodes_.size(); }

    /// Value of every node; the final entry is the query probability.  `clamp`, if given, receives the largest
    /// distance any inclusion-exclusion node or the root had to be moved back into [0, 1].
    std::vector<Prob> evaluate_all(const ProbabilityView &view, double *clamp = nullptr) const;
    Prob evaluate(const ProbabilityView &view, double *clamp = nullptr) const;

    /// Ground atoms at the leaves, sorted.
    std::vector<AtomId> leaves() const;

    private:
    std::vector<Node> nodes_;

    friend class PlanBuilder;
};

/// Throws `UnsafeQuery` when no rule applies, `NotInversionFree` when inclusion-exclusion is needed but disallowed, and
/// `ResourceLimit` when a cap is exceeded.
LiftedPlan compile_lifted(const nf::DNF &q, const Schema &schema, const EngineOptions &options = {});
LiftedPlan compile_lifted(const UCQ &q, const Schema &schema, const EngineOptions &options = {});

struct LiftedResult
{
    Prob value;
    double clamp = 0.0;
    std::size_t plan_nodes = 0;
};

LiftedResult prob_lifted_detailed(const UCQ &q, const ProbabilityView &view, const EngineOptions &options = {});
double prob_lifted(const UCQ &q, const ProbabilityView &view, const EngineOptions &options = {});
double prob_lifted(const UCQ &q, const Database &db, const EngineOptions &options = {});

/// Probability with the listed atoms overridden to 1 (true) or 0 (false).
double prob_conditioned(const UCQ &q, const ProbabilityView &view, const std::vector<std::pair<AtomId, bool>> &fixed,
                        const EngineOptions &options = {});
double prob_conditioned(const UCQ &q, const Database &db, const std::vector<std::pair<AtomId, bool>> &fixed,
                        const EngineOptions &options = {});

struct GroundOptions
{
    /// Most uncertain tuples (0 < p < 1) in the lineage; 2^max_uncertain worlds are enumerated at most.
    std::size_t max_uncertain = 24;
    std::uint64_t max_conjuncts = kDefaultMaxConjuncts;
    bool parallel = true;
};

/// Sum over possible worlds of the uncertain lineage tuples.  The parallel and serial variants split the worlds into
/// the same fixed chunks and add chunk sums in order, so they return identical results.
double prob_ground(const UCQ &q, const ProbabilityView &view, const GroundOptions &options = {});
double prob_ground(const UCQ &q, const Database &db, const GroundOptions &options = {});

}
