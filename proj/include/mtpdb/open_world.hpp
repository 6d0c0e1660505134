#pragma once

#include "mtpdb/database.hpp"
#include "mtpdb/engine.hpp"
#include "mtpdb/probability.hpp"
#include "mtpdb/query.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mtpdb {

/// A probabilistic database together with the open-world threshold: every absent atom may take any probability in
/// [0, lambda].
struct OpenPDB
{
    Database pdb;
    double lambda = 0.0;

    OpenPDB(Database pdb, double lambda);
};

/// Strict upper bound on the mean tuple probability of one relation in the completed database.
struct MTPConstraint
{
    std::string relation;
    double mean_bound = 1.0;
};

/// Denominator of the mean: every ground atom of the relation, or only its tuples with non-zero probability.
enum class MtpDenominator { Herbrand, Support };

struct Budget
{
    std::string relation;
    std::size_t max_added = 0;
    /// The existing tuples alone already violate the constraint.
    bool infeasible = false;
};

/// Open tuples of the constrained relation added at probability lambda.
struct CompletionChoice
{
    std::vector<AtomId> added;
};

enum class BoundKind { Closed, OpenUpper, MtpExact, MtpGreedy, MtpOracle };

const char *to_string(BoundKind kind);

struct Interval
{
    Prob lower;
    Prob upper;
};

struct BoundResult
{
    BoundKind kind = BoundKind::Closed;
    Prob value;
    std::optional<Interval> interval;
    std::optional<CompletionChoice> witness;
};

/// Ground atoms of `relation` absent from the database, in index (lexicographic domain) order.  Throws `SchemaError`
/// for unknown relations and `ResourceLimit` when the Herbrand base of the relation exceeds `max_atoms`.
std::vector<AtomId> open_tuples(const OpenPDB &g, const std::string &relation, std::uint64_t max_atoms = 50'000'000);

/// [closed world, full lambda-completion of every relation].
BoundResult interval_unconstrained(const OpenPDB &g, const UCQ &q, const EngineOptions &options = {});

/// Largest b with (existing mass + b * lambda) / N < mean_bound - 1e-9, capped at the number of open tuples.
Budget budget_from_mtp(const OpenPDB &g, const MTPConstraint &c, MtpDenominator denominator = MtpDenominator::Herbrand);

/// Several constraints on one relation combine to the smallest budget; constraints on different relations are
/// rejected with `InvalidArgument`.
Budget budget_from_mtp(const OpenPDB &g, const std::vector<MTPConstraint> &constraints,
                       MtpDenominator denominator = MtpDenominator::Herbrand);

/// Copy of the database with every chosen atom inserted at lambda.  Throws `InvalidArgument` if a chosen atom is
/// already present or repeated.
Database apply_completion(const OpenPDB &g, const CompletionChoice &choice);

/// The same completion as a view over `g.pdb`, without copying.
ProbabilityView completion_view(const OpenPDB &g, const CompletionChoice &choice);

}
